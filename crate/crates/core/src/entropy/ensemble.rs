use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::quantum::{ComplexMatrix, DensityOperator, NORMALIZATION_TOL};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CqEntry {
    pub label: BitString,
    pub prob: f64,
    pub state: DensityOperator,
}

/// `Σ_x p_x |x⟩⟨x| ⊗ ρ_x`
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CqEnsemble {
    entries: Vec<CqEntry>,
}

impl CqEnsemble {
    pub fn new(entries: Vec<CqEntry>) -> Result<Self> {
        let first = entries
            .first()
            .ok_or_else(|| Error::InvalidEnsemble("no entries".into()))?
            .state
            .dim();
        let mut total = 0.0;
        for (i, e) in entries.iter().enumerate() {
            if !(e.prob >= 0.0) || !e.prob.is_finite() {
                return Err(Error::InvalidEnsemble(format!("probability {} of {}", e.prob, e.label)));
            }
            if e.state.dim() != first {
                return Err(Error::DimensionMismatch { left: first, right: e.state.dim() });
            }
            if entries[..i].iter().any(|o| o.label == e.label) {
                return Err(Error::InvalidEnsemble(format!("duplicate label {}", e.label)));
            }
            total += e.prob;
        }
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidEnsemble(format!("probabilities sum to {total}")));
        }
        Ok(Self { entries })
    }

    pub fn from_triples(triples: Vec<(BitString, f64, DensityOperator)>) -> Result<Self> {
        Self::new(triples.into_iter().map(|(label, prob, state)| CqEntry { label, prob, state }).collect())
    }

    /// Builds an ensemble from unnormalized `p_x ρ_x`; zero-weight labels are dropped.
    pub fn from_weighted(ops: Vec<(BitString, ComplexMatrix)>) -> Result<Self> {
        let total: f64 = ops.iter().map(|(_, a)| a.trace().re).sum();
        if total <= 0.0 {
            return Err(Error::InvalidEnsemble("zero total weight".into()));
        }
        let mut entries = Vec::new();
        for (label, a) in ops {
            let w = a.trace().re;
            if w <= 0.0 {
                continue;
            }
            let state = DensityOperator::new(a.scale(1.0 / w).hermitian_part())?;
            entries.push(CqEntry { label, prob: w / total, state });
        }
        Self::new(entries)
    }

    pub fn entries(&self) -> &[CqEntry] {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries[0].state.dim()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `(x, p_x ρ_x)` pairs.
    pub fn weighted_operators(&self) -> Vec<(BitString, ComplexMatrix)> {
        self.entries.iter().map(|e| (e.label, e.state.matrix().scale(e.prob))).collect()
    }

    pub fn max_prob(&self) -> f64 {
        self.entries.iter().map(|e| e.prob).fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Povm {
    pub elements: Vec<(BitString, ComplexMatrix)>,
}

impl Povm {
    /// Largest deviation of `Σ E_x` from the identity, and the smallest
    /// eigenvalue over all elements.
    pub fn feasibility(&self) -> (f64, f64) {
        let d = self.elements.first().map_or(0, |(_, e)| e.rows());
        let mut sum = ComplexMatrix::zeros(d, d);
        let mut min_eig = f64::INFINITY;
        for (_, e) in &self.elements {
            sum = &sum + e;
            min_eig = min_eig.min(e.hermitian_part().min_eigenvalue());
        }
        ((&sum - &ComplexMatrix::identity(d)).max_abs(), min_eig)
    }

    pub fn is_feasible(&self) -> bool {
        let (dev, min_eig) = self.feasibility();
        dev <= 1e-9 && min_eig >= -NORMALIZATION_TOL
    }

    /// `Σ_x tr(A_x E_x)` over labels present in both.
    pub fn success_probability(&self, ops: &[(BitString, ComplexMatrix)]) -> f64 {
        ops.iter()
            .map(|(label, a)| {
                self.elements
                    .iter()
                    .filter(|(l, _)| l == label)
                    .map(|(_, e)| a.trace_product(e).re)
                    .sum::<f64>()
            })
            .sum()
    }
}
