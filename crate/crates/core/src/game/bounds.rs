//! Finite-size checks of the two per-instance bounds used to control the
//! winning probability.

use serde::{Deserialize, Serialize};

use super::exact::{fixed_theta_bound, IDENTITY_TOL};
use crate::bits::{BasisString, BitString};
use crate::entropy::Povm;
use crate::error::{Error, Result};
use crate::quantum::matrix::vec_inner;
use crate::quantum::projectors::apply_m1;
use crate::quantum::{agreement_projector, block_projectors, commutator_norm, theta_basis_state, ComplexMatrix, DensityOperator, C64};

pub const MAX_RANDOM_THETA_BITS: usize = 4;
pub const MAX_FIXED_THETA_BITS: usize = 3;
pub const MAX_FIXED_THETA_SIDE_DIM: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub value: f64,
    pub bound: f64,
    pub ok: bool,
}

impl BoundCheck {
    fn new(value: f64, bound: f64) -> Self {
        Self { value, bound, ok: value <= bound + IDENTITY_TOL }
    }
}

/// `(M1 ⊗ I_extra) X`, column by column.
fn m1_left(x: &ComplexMatrix, n: usize, s: usize, extra: usize) -> Result<ComplexMatrix> {
    let d = x.rows();
    let mut out = ComplexMatrix::zeros(d, d);
    for j in 0..d {
        let col = apply_m1(&x.column(j), n, s, extra)?;
        for (i, v) in col.into_iter().enumerate() {
            out.set(i, j, v);
        }
    }
    Ok(out)
}

/// `E_θ tr(Σ_x |xx⟩⟨xx|_θ M1 ρ_AB)` by summing over every θ, against
/// `2^{-n/s}`.
pub fn verify_random_theta_bound(rho_ab: &DensityOperator, s: usize) -> Result<BoundCheck> {
    let nq = rho_ab.num_qubits();
    if !nq.is_multiple_of(2) || nq == 0 {
        return Err(Error::InvalidRegister(format!("{nq} qubits do not split into A and B")));
    }
    let n = nq / 2;
    if n > MAX_RANDOM_THETA_BITS {
        return Err(Error::InvalidParameter(format!("n = {n} exceeds {MAX_RANDOM_THETA_BITS}")));
    }
    if s == 0 || !n.is_multiple_of(s) {
        return Err(Error::NotADivisor { n, block: s });
    }
    let x = m1_left(rho_ab.matrix(), n, s, 0)?;
    let mut total = 0.0;
    for theta in BasisString::all(n) {
        total += agreement_projector(&theta)?.trace_product(&x).re;
    }
    let value = total / (1u64 << n) as f64;
    Ok(BoundCheck::new(value, 1.0 / 2f64.powi((n / s) as i32)))
}

/// `tr((Σ_x |xx⟩⟨xx|_θ ⊗ Q_x) M0 ρ_ABE)` against `√((n/s)/2^s)`, with `E`
/// the trailing qubits of `ρ`.
pub fn verify_fixed_theta_bound(
    rho_abe: &DensityOperator,
    povm: &Povm,
    theta: &BasisString,
    s: usize,
) -> Result<BoundCheck> {
    let n = theta.len();
    let nq = rho_abe.num_qubits();
    if n == 0 || n > MAX_FIXED_THETA_BITS || nq < 2 * n {
        return Err(Error::InvalidParameter(format!("n = {n} with {nq} total qubits")));
    }
    if s == 0 || !n.is_multiple_of(s) {
        return Err(Error::NotADivisor { n, block: s });
    }
    let e = nq - 2 * n;
    let de = 1usize << e;
    if de > MAX_FIXED_THETA_SIDE_DIM {
        return Err(Error::DimensionOverflow { dim: de, cap: MAX_FIXED_THETA_SIDE_DIM });
    }
    if povm.elements.iter().any(|(l, q)| l.len() != n || q.rows() != de || q.cols() != de) || !povm.is_feasible() {
        return Err(Error::InvalidPovm(format!("expected a POVM on {de} dimensions labelled by {n} bits")));
    }
    let rho = rho_abe.matrix();
    let y = rho - &m1_left(rho, n, s, e)?;
    let dab = 1usize << (2 * n);
    let mut value = C64::default();
    for (x, q) in &povm.elements {
        let half = theta_basis_state(x, theta)?;
        let pair = half.tensor(&half)?;
        let ev = pair.amplitudes();
        // B_{ji} = (⟨xx|_θ ⊗ ⟨j|) Y (|xx⟩_θ ⊗ |i⟩)
        let mut b = ComplexMatrix::zeros(de, de);
        for j in 0..de {
            for i in 0..de {
                let mut acc = C64::default();
                for a in (0..dab).filter(|&a| ev[a].norm_sqr() > 0.0) {
                    let row: Vec<C64> = (0..dab).map(|bb| y.get(a * de + j, bb * de + i)).collect();
                    acc += ev[a].conj() * row.iter().zip(ev).map(|(r, e)| r * e).sum::<C64>();
                }
                b.set(j, i, acc);
            }
        }
        value += q.trace_product(&b);
    }
    let bound = fixed_theta_bound(n, s);
    let mut check = BoundCheck::new(value.re, bound);
    check.ok &= value.norm() <= bound + IDENTITY_TOL;
    Ok(check)
}

/// `max_θ ‖[Σ_x |xx⟩⟨xx|_θ, M1]‖`.
pub fn commutation_deviation(n: usize, s: usize) -> Result<f64> {
    let (_, m1) = block_projectors(n, s)?;
    let mut worst: f64 = 0.0;
    for theta in BasisString::all(n) {
        worst = worst.max(commutator_norm(&agreement_projector(&theta)?, &m1));
    }
    Ok(worst)
}

/// `⟨xx|_θ M0 |xx⟩_θ`, which is at most `(n/s)/2^s`.
pub fn m0_overlap(x: &BitString, theta: &BasisString, s: usize) -> Result<f64> {
    let n = theta.len();
    let half = theta_basis_state(x, theta)?;
    let pair = half.tensor(&half)?;
    let m1v = apply_m1(pair.amplitudes(), n, s, 0)?;
    let m0v: Vec<C64> = pair.amplitudes().iter().zip(&m1v).map(|(a, b)| a - b).collect();
    Ok(vec_inner(&m0v, &m0v).re)
}
