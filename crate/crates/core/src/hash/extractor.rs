//! Seeded extraction by universal hashing and its exact strong-extractor
//! distance.

use serde::{Deserialize, Serialize};

use super::universal::{HashSeed, UniversalHashFamily};
use crate::bits::BitString;
use crate::entropy::CqEnsemble;
use crate::error::{Error, Result};
use crate::quantum::ComplexMatrix;

pub const MAX_DISTANCE_SOURCE_BITS: usize = 8;
pub const MAX_DISTANCE_SIDE_DIM: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtractorSpec {
    pub source_bits: usize,
    pub output_bits: usize,
    pub epsilon: f64,
    pub min_entropy: f64,
}

impl ExtractorSpec {
    /// Rejects parameters with `k < ℓ + 2 log₂(1/ε)`.
    pub fn new(source_bits: usize, output_bits: usize, epsilon: f64, min_entropy: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(Error::InvalidParameter(format!("epsilon {epsilon} not in (0, 1]")));
        }
        if output_bits > source_bits {
            return Err(Error::InvalidParameter(format!("output {output_bits} exceeds source {source_bits} bits")));
        }
        let required = output_bits as f64 + 2.0 * (1.0 / epsilon).log2();
        if min_entropy + 1e-12 < required {
            return Err(Error::ExtractorEntropy { k: min_entropy, required });
        }
        Ok(Self { source_bits, output_bits, epsilon, min_entropy })
    }

    pub fn family(&self) -> UniversalHashFamily {
        UniversalHashFamily::new(self.source_bits, self.output_bits).expect("validated at construction")
    }
}

pub fn extract(spec: &ExtractorSpec, seed: &HashSeed, x: &BitString) -> Result<BitString> {
    spec.family().eval(seed, x)
}

/// Exact `Td(ρ_{YSB}, τ_Y ⊗ ρ_{SB})` for the source `Σ_x p_x |x⟩⟨x| ⊗ ρ_x`.
///
/// Shifting `b` only relabels outputs, so the average over seeds reduces to
/// an average over `a`.
pub fn extractor_distance(spec: &ExtractorSpec, source: &CqEnsemble) -> Result<f64> {
    let n = spec.source_bits;
    if n > MAX_DISTANCE_SOURCE_BITS {
        return Err(Error::SizeCap(format!("source has {n} bits, limit {MAX_DISTANCE_SOURCE_BITS}")));
    }
    let side = source.dim();
    if side > MAX_DISTANCE_SIDE_DIM {
        return Err(Error::SizeCap(format!("side information dimension {side}, limit {MAX_DISTANCE_SIDE_DIM}")));
    }
    if let Some(e) = source.entries().iter().find(|e| e.label.len() != n) {
        return Err(Error::LengthMismatch { expected: n, got: e.label.len() });
    }
    let family = spec.family();
    let outputs = 1usize << spec.output_bits;
    let ops = source.weighted_operators();
    let mut rho_b = ComplexMatrix::zeros(side, side);
    for (_, a) in &ops {
        rho_b = &rho_b + a;
    }
    let uniform = rho_b.scale(1.0 / outputs as f64);
    let mut total = 0.0;
    for a in 0..1u128 << n {
        let seed = HashSeed { a, b: 0 };
        let mut per_output = vec![ComplexMatrix::zeros(side, side); outputs];
        for (x, op) in &ops {
            let y = family.eval_raw(&seed, x.value()) as usize;
            per_output[y] = &per_output[y] + op;
        }
        total += per_output
            .iter()
            .map(|m| {
                let diff = m - &uniform;
                if side == 1 {
                    diff.get(0, 0).re.abs()
                } else {
                    diff.trace_norm_hermitian()
                }
            })
            .sum::<f64>();
    }
    Ok(0.5 * total / (1u64 << n) as f64)
}
