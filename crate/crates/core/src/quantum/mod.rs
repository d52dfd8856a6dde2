//! Dense state-vector and density-matrix simulation.

pub mod layout;
pub mod lemmas;
pub mod matrix;
pub mod measure;
pub mod projectors;
pub mod random;
pub mod state;

pub use layout::{partial_trace, partial_trace_qubits, Register, RegisterLayout};
pub use matrix::{c, re, ComplexMatrix, Eigh, C64, ONE, ZERO};
pub use measure::{measure_theta_basis, measure_theta_basis_pure, sample_index, theta_outcome_distribution};
pub use projectors::{
    agreement_projector, average_agreement_projector, bell_mixture_power, bell_state, block_projectors,
    epr_pairs, hadamard, hadamard_theta, interleaved_to_a_first, pauli_i, pauli_x, pauli_y, pauli_z,
    permute_qubits, permute_qubits_vec, theta_basis_state, BellLabel,
};
pub use state::{DensityOperator, Gate, PureState};

use crate::error::{Error, Result};

/// Largest operator dimension handled densely.
pub const MAX_OPERATOR_DIM: usize = 1 << 13;
/// Largest state-vector dimension.
pub const MAX_STATE_DIM: usize = 1 << 20;

pub const STRUCTURAL_TOL: f64 = 1e-12;
pub const EIGEN_TOL: f64 = 1e-9;
pub const NORMALIZATION_TOL: f64 = 1e-10;

/// Kronecker product, capped at [`MAX_OPERATOR_DIM`] for operators and
/// [`MAX_STATE_DIM`] for column vectors.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let vectors = a.cols() == 1 && b.cols() == 1;
    let cap = if vectors { MAX_STATE_DIM } else { MAX_OPERATOR_DIM };
    tensor_with_cap(a, b, cap)
}

pub fn tensor_with_cap(a: &ComplexMatrix, b: &ComplexMatrix, cap: usize) -> Result<ComplexMatrix> {
    let vectors = a.cols() == 1 && b.cols() == 1;
    if !vectors && !(a.is_square() && b.is_square()) {
        return Err(Error::NotSquare { rows: a.rows(), cols: a.cols().max(b.cols()) });
    }
    let dim = a.rows() * b.rows();
    if dim > cap {
        return Err(Error::DimensionOverflow { dim, cap });
    }
    Ok(a.kron(b))
}

/// `½‖ρ − σ‖₁`
pub fn trace_distance(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    trace_distance_matrices(rho.matrix(), sigma.matrix())
}

pub fn trace_distance_matrices(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    if a.rows() != b.rows() || !a.is_square() || !b.is_square() {
        return Err(Error::DimensionMismatch { left: a.rows(), right: b.rows() });
    }
    Ok(0.5 * (a - b).trace_norm_hermitian())
}

/// Outcome of an operator-inequality check `a ≤ b`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LeqWitness {
    pub holds: bool,
    /// Smallest eigenvalue of `b − a`.
    pub min_eigenvalue: f64,
}

pub fn operator_leq(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> Result<LeqWitness> {
    if a.rows() != b.rows() {
        return Err(Error::DimensionMismatch { left: a.rows(), right: b.rows() });
    }
    matrix::ensure_hermitian(a, tol)?;
    matrix::ensure_hermitian(b, tol)?;
    let min_eigenvalue = (b - a).min_eigenvalue();
    Ok(LeqWitness { holds: min_eigenvalue >= -tol, min_eigenvalue })
}

/// Operator norm of `ab − ba`.
pub fn commutator_norm(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    (&(a * b) - &(b * a)).operator_norm()
}

pub fn column(v: &[C64]) -> ComplexMatrix {
    ComplexMatrix::from_row_slice(v.len(), 1, v)
}
