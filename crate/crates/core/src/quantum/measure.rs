//! θ-basis measurements on a register of a global state.

use rand::Rng;

use super::layout::RegisterLayout;
use super::matrix::{ComplexMatrix, C64, ZERO};
use super::projectors::{apply_hadamard_theta, HADAMARD};
use super::state::{DensityOperator, PureState};
use crate::bits::{BasisString, BitString};
use crate::error::{Error, Result};

/// Outcomes with probability at or below this are treated as impossible.
pub const DEGENERATE_PROBABILITY: f64 = 1e-14;

/// Register-local outcome of each global basis index.
fn local_outcome(index: usize, total: usize, start: usize, len: usize) -> usize {
    (index >> (total - start - len)) & ((1 << len) - 1)
}

/// Draws an index with probability proportional to `probs`.
pub fn sample_index<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random::<f64>() * probs.iter().sum::<f64>();
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(0)
}

/// Outcome distribution of a θ-basis measurement on register `name`.
pub fn theta_outcome_distribution(
    state: &DensityOperator,
    layout: &RegisterLayout,
    name: &str,
    theta: &BasisString,
) -> Result<Vec<f64>> {
    let reg = layout.register(name)?.clone();
    check_sizes(state.num_qubits(), layout, reg.len, theta)?;
    let rotated = rotate(state, reg.start, theta);
    let total = layout.total_qubits();
    let mut probs = vec![0.0; 1 << reg.len];
    for i in 0..state.dim() {
        probs[local_outcome(i, total, reg.start, reg.len)] += rotated.matrix().get(i, i).re;
    }
    Ok(probs)
}

fn check_sizes(qubits: usize, layout: &RegisterLayout, len: usize, theta: &BasisString) -> Result<()> {
    if layout.total_qubits() != qubits {
        return Err(Error::DimensionMismatch { left: qubits, right: layout.total_qubits() });
    }
    if len != theta.len() {
        return Err(Error::LengthMismatch { expected: len, got: theta.len() });
    }
    Ok(())
}

fn rotate(state: &DensityOperator, start: usize, theta: &BasisString) -> DensityOperator {
    let mut out = state.clone();
    for (i, b) in theta.bits().enumerate() {
        if b {
            out.conjugate_local(start + i, &HADAMARD);
        }
    }
    out
}

/// Measures register `name` in basis `theta`; returns the outcome and the
/// renormalized post-measurement state.
pub fn measure_theta_basis<R: Rng + ?Sized>(
    state: &DensityOperator,
    layout: &RegisterLayout,
    name: &str,
    theta: &BasisString,
    rng: &mut R,
) -> Result<(BitString, DensityOperator)> {
    let reg = layout.register(name)?.clone();
    check_sizes(state.num_qubits(), layout, reg.len, theta)?;
    let total = layout.total_qubits();
    let rotated = rotate(state, reg.start, theta);
    let mut probs = vec![0.0; 1 << reg.len];
    for i in 0..state.dim() {
        probs[local_outcome(i, total, reg.start, reg.len)] += rotated.matrix().get(i, i).re.max(0.0);
    }
    let x = sample_index(&probs, rng);
    let p = probs[x];
    if p <= DEGENERATE_PROBABILITY {
        return Err(Error::DegenerateMeasurement { probability: p });
    }
    let raw = rotated.matrix().inner();
    let d = state.dim();
    let keep = |i: usize| local_outcome(i, total, reg.start, reg.len) == x;
    let projected = ComplexMatrix::from_fn(d, d, |i, j| {
        if keep(i) && keep(j) {
            raw[(i, j)] / p
        } else {
            ZERO
        }
    });
    let mut post = DensityOperator::from_matrix_unchecked(projected);
    for (i, b) in theta.bits().enumerate() {
        if b {
            post.conjugate_local(reg.start + i, &HADAMARD);
        }
    }
    Ok((BitString::from_value(reg.len, x as u128), post))
}

/// Pure-state variant: measures the `len = |θ|` qubits starting at `start`.
pub fn measure_theta_basis_pure<R: Rng + ?Sized>(
    state: &PureState,
    start: usize,
    theta: &BasisString,
    rng: &mut R,
) -> Result<(BitString, PureState)> {
    let total = state.num_qubits();
    let len = theta.len();
    if start + len > total {
        return Err(Error::InvalidRegister(format!("qubits {start}..{} out of range", start + len)));
    }
    let mut v: Vec<C64> = state.amplitudes().to_vec();
    apply_hadamard_theta(&mut v, total, start, theta);
    let mut probs = vec![0.0; 1 << len];
    for (i, a) in v.iter().enumerate() {
        probs[local_outcome(i, total, start, len)] += a.norm_sqr();
    }
    let x = sample_index(&probs, rng);
    let p = probs[x];
    if p <= DEGENERATE_PROBABILITY {
        return Err(Error::DegenerateMeasurement { probability: p });
    }
    let scale = 1.0 / p.sqrt();
    for (i, a) in v.iter_mut().enumerate() {
        *a = if local_outcome(i, total, start, len) == x { *a * scale } else { ZERO };
    }
    apply_hadamard_theta(&mut v, total, start, theta);
    Ok((BitString::from_value(len, x as u128), PureState::from_amplitudes_unchecked(v)))
}

/// Measures single qubit `q` in the computational basis.
pub fn measure_qubit_pure<R: Rng + ?Sized>(state: &PureState, q: usize, rng: &mut R) -> Result<(bool, PureState)> {
    let theta = BasisString::zeros(1);
    let (x, post) = measure_theta_basis_pure(state, q, &theta, rng)?;
    Ok((x.bit(0), post))
}
