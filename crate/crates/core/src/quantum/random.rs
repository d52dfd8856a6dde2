//! Random states, unitaries and projectors for property checks.

use rand::Rng;
use rand_distr::StandardNormal;

use super::matrix::{c, ComplexMatrix, C64};
use super::state::{DensityOperator, PureState};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let a: f64 = rng.sample(StandardNormal);
    let b: f64 = rng.sample(StandardNormal);
    c(a, b)
}

pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Haar-random unitary (QR of a Ginibre matrix with phase correction).
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let g = ginibre(dim, dim, rng).into_inner();
    let qr = g.qr();
    let q = qr.q();
    let r = qr.r();
    let mut u = q;
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { c(1.0, 0.0) };
        for i in 0..dim {
            u[(i, j)] *= phase;
        }
    }
    ComplexMatrix::from_dmatrix(u)
}

pub fn random_pure_state<R: Rng + ?Sized>(num_qubits: usize, rng: &mut R) -> PureState {
    let v: Vec<C64> = (0..1usize << num_qubits).map(|_| gaussian(rng)).collect();
    PureState::normalized(v).expect("gaussian vector is nonzero")
}

/// Random density operator of the given rank (Wishart construction).
pub fn random_density<R: Rng + ?Sized>(num_qubits: usize, rank: usize, rng: &mut R) -> DensityOperator {
    let d = 1usize << num_qubits;
    let g = ginibre(d, rank.max(1), rng);
    let w = &g * &g.adjoint();
    let tr = w.trace().re;
    DensityOperator::from_matrix_unchecked(w.scale(1.0 / tr).hermitian_part())
}

/// Projector onto a Haar-random `rank`-dimensional subspace.
pub fn random_projector<R: Rng + ?Sized>(dim: usize, rank: usize, rng: &mut R) -> ComplexMatrix {
    let u = random_unitary(dim, rng);
    let mut p = ComplexMatrix::zeros(dim, dim);
    for k in 0..rank.min(dim) {
        let col = u.column(k);
        p = &p + &ComplexMatrix::projector(&col);
    }
    p.hermitian_part()
}
