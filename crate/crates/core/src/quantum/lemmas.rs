//! Exact checks of the structural operator identities on small instances.

use super::matrix::ComplexMatrix;
use super::projectors::{agreement_projector, average_agreement_projector, bell_mixture_power, epr_pairs};
use super::{operator_leq, tensor, LeqWitness};
use crate::bits::BasisString;
use crate::error::Result;

/// Checks `I − ⊗_i P_i ≤ Σ_i I ⊗ … ⊗ (I − P_i) ⊗ … ⊗ I`.
pub fn operator_union_bound(ps: &[ComplexMatrix], tol: f64) -> Result<LeqWitness> {
    let dims: Vec<usize> = ps.iter().map(ComplexMatrix::rows).collect();
    let total: usize = dims.iter().product();
    let mut prod = ComplexMatrix::identity(1);
    for p in ps {
        prod = tensor(&prod, p)?;
    }
    let lhs = &ComplexMatrix::identity(total) - &prod;
    let mut rhs = ComplexMatrix::zeros(total, total);
    for (i, p) in ps.iter().enumerate() {
        let mut term = ComplexMatrix::identity(1);
        for (j, &d) in dims.iter().enumerate() {
            let factor = if i == j { &ComplexMatrix::identity(d) - p } else { ComplexMatrix::identity(d) };
            term = tensor(&term, &factor)?;
        }
        rhs = &rhs + &term;
    }
    operator_leq(&lhs, &rhs, tol)
}

/// Largest `‖P_θ|φ⁺⟩^{⊗n} − |φ⁺⟩^{⊗n}‖` over all θ.
pub fn epr_support_deviation(n: usize) -> Result<f64> {
    let epr = epr_pairs(n)?;
    let mut worst: f64 = 0.0;
    for theta in BasisString::all(n) {
        let p = agreement_projector(&theta)?;
        let v = p.apply(epr.amplitudes());
        let dev = v
            .iter()
            .zip(epr.amplitudes())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        worst = worst.max(dev);
    }
    Ok(worst)
}

/// Entrywise deviation between `E_θ P_θ` (summed over every θ) and the
/// Bell-mixture tensor power.
pub fn averaged_projector_deviation(n: usize) -> Result<f64> {
    let dim = 1usize << (2 * n);
    let mut sum = ComplexMatrix::zeros(dim, dim);
    for theta in BasisString::all(n) {
        sum = &sum + &agreement_projector(&theta)?;
    }
    let avg = sum.scale(1.0 / (1u64 << n) as f64);
    let target = bell_mixture_power(n)?;
    let factored = average_agreement_projector(n)?;
    Ok((&avg - &target).max_abs().max((&factored - &target).max_abs()))
}
