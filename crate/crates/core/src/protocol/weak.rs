//! Weak everlasting security: min-entropy of the key given Eve's registers,
//! with the key replaced by a uniform string whenever Alice and Bob disagree.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::adversary::{Adversary, MAX_ATTACK_KEY_BITS};
use super::niqkd::run_niqkd;
use crate::bits::BitString;
use crate::entropy::{pguess_block_diagonal, EntropyBracket, SolverOptions};
use crate::error::{Error, Result};
use crate::game::binomial;
use crate::nike::Nike;
use crate::quantum::{epr_pairs, ComplexMatrix, PureState, C64};
use crate::rng::substream;

/// Largest retained register for the exact path.
pub const MAX_WEAK_MEMORY_QUBITS: usize = 4;

/// Largest discarded register for the exact path.
pub const MAX_WEAK_ENVIRONMENT_QUBITS: usize = 4;

/// Eve's state for one value of her classical view.
#[derive(Clone, Debug, PartialEq)]
pub struct WeakBlock {
    /// Serialized public tuple.
    pub view: String,
    /// `Σ w σ_{kk}` per key `k`.
    pub agree: Vec<ComplexMatrix>,
    /// `Σ w Σ_{ka≠kb} σ_{ka,kb}`.
    pub disagree: ComplexMatrix,
}

impl WeakBlock {
    /// `p_k ρ_E^k` with the disagreement part spread uniformly over keys.
    pub fn operators(&self, n: usize) -> Vec<(BitString, ComplexMatrix)> {
        let share = 1.0 / (1u64 << n) as f64;
        self.agree
            .iter()
            .enumerate()
            .map(|(k, a)| {
                let mut op = a.clone();
                op.add_scaled(&self.disagree, share);
                (BitString::from_value(n, k as u128), op)
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeakEnsemble {
    pub key_bits: usize,
    pub memory_qubits: usize,
    pub blocks: Vec<WeakBlock>,
}

impl WeakEnsemble {
    pub fn agree_probability(&self) -> f64 {
        self.blocks.iter().flat_map(|b| b.agree.iter()).map(|a| a.trace().re).sum()
    }

    pub fn total_trace(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| b.agree.iter().map(|a| a.trace().re).sum::<f64>() + b.disagree.trace().re)
            .sum()
    }

    pub fn operator_blocks(&self) -> Vec<Vec<(BitString, ComplexMatrix)>> {
        self.blocks.iter().map(|b| b.operators(self.key_bits)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeakSecReport {
    pub hmin: EntropyBracket,
    pub pguess_lower: f64,
    pub pguess_upper: f64,
    pub converged: bool,
    pub agree_rate: f64,
    pub sampled_agree_rate: Option<f64>,
    pub sampled_agree_stderr: Option<f64>,
    pub eve_guess_rate: Option<f64>,
    pub eve_guess_stderr: Option<f64>,
    pub trials: usize,
}

/// `σ_{ka,kb} = Tr_R |v⟩⟨v|` for one `(ka, kb)` block of the rotated state.
fn memory_operator(v: &[C64], de: usize, dr: usize) -> ComplexMatrix {
    let m = ComplexMatrix::from_row_slice(de, dr, v);
    &m * &m.adjoint()
}

/// Exact `ρ_{KE}` conditioned on every enumerable public tuple.
pub fn weak_security_ensemble<N: Nike>(scheme: &N, adversary: Option<&dyn Adversary>) -> Result<WeakEnsemble> {
    let n = scheme.key_bits();
    if n > MAX_ATTACK_KEY_BITS {
        return Err(Error::SizeCap(format!("exact ensemble limited to n ≤ {MAX_ATTACK_KEY_BITS}")));
    }
    let z = scheme.enumerate_z().ok_or_else(|| Error::NotEnumerable(scheme.name().into()))?;
    let (e, r) = adversary.map_or((0, 0), |a| (a.memory_qubits(n), a.environment_qubits(n)));
    if e > MAX_WEAK_MEMORY_QUBITS || r > MAX_WEAK_ENVIRONMENT_QUBITS {
        return Err(Error::SizeCap(format!("memory {e} and environment {r} qubits exceed the exact cap")));
    }
    let state: PureState = match adversary {
        Some(a) => a.intercept(&epr_pairs(n)?, n)?,
        None => epr_pairs(n)?,
    };
    let (de, dr) = (1usize << e, 1usize << r);
    let c = e + r;
    let keys = 1usize << n;
    let mut blocks: BTreeMap<String, WeakBlock> = BTreeMap::new();
    for (w, sample) in z {
        let view = serde_json::to_string(&sample.p).map_err(|err| Error::InvalidParameter(err.to_string()))?;
        let entry = blocks.entry(view.clone()).or_insert_with(|| WeakBlock {
            view,
            agree: vec![ComplexMatrix::zeros(de, de); keys],
            disagree: ComplexMatrix::zeros(de, de),
        });
        let v = crate::game::rotated(state.amplitudes(), n, c, &sample.theta);
        for ka in 0..keys {
            for kb in 0..keys {
                let start = ((ka << n) | kb) << c;
                let sigma = memory_operator(&v[start..start + (1 << c)], de, dr);
                if ka == kb {
                    entry.agree[ka].add_scaled(&sigma, w);
                } else {
                    entry.disagree.add_scaled(&sigma, w);
                }
            }
        }
    }
    Ok(WeakEnsemble { key_bits: n, memory_qubits: e, blocks: blocks.into_values().collect() })
}

/// Exact min-entropy bracket and, when `trials > 0`, sampled agreement and
/// the hit rate of the adversary's decoder against `K`.
pub fn weak_security_report<N: Nike>(
    scheme: &N,
    adversary: Option<&dyn Adversary>,
    trials: usize,
    seed: u64,
) -> Result<WeakSecReport> {
    let ens = weak_security_ensemble(scheme, adversary)?;
    let bracket = pguess_block_diagonal(&ens.operator_blocks(), &SolverOptions::default())?;
    let mut report = WeakSecReport {
        hmin: bracket.entropy(),
        pguess_lower: bracket.lower,
        pguess_upper: bracket.upper,
        converged: bracket.converged,
        agree_rate: ens.agree_probability(),
        sampled_agree_rate: None,
        sampled_agree_stderr: None,
        eve_guess_rate: None,
        eve_guess_stderr: None,
        trials,
    };
    if trials == 0 {
        return Ok(report);
    }
    let n = scheme.key_bits();
    let outcomes: Vec<(bool, Option<bool>)> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = substream(seed, t);
            let tr = run_niqkd(scheme, n, adversary, &mut rng)?;
            let agree = tr.key_a == tr.key_b;
            let mut fresh = substream(seed ^ RESAMPLE_STREAM, t);
            let k = if agree { tr.key_a } else { BitString::random(n, &mut fresh) };
            Ok((agree, tr.eve_guess.map(|g| g.key_a == k)))
        })
        .collect::<Result<_>>()?;
    let agreed = outcomes.iter().filter(|o| o.0).count();
    let (p, se) = binomial(agreed, trials);
    report.sampled_agree_rate = Some(p);
    report.sampled_agree_stderr = Some(se);
    if outcomes.iter().all(|o| o.1.is_some()) {
        let hits = outcomes.iter().filter(|o| o.1 == Some(true)).count();
        let (p, se) = binomial(hits, trials);
        report.eve_guess_rate = Some(p);
        report.eve_guess_stderr = Some(se);
    }
    Ok(report)
}

/// Separates the resampling stream from the protocol stream.
const RESAMPLE_STREAM: u64 = 0x005e_ed0f_4e5a_3b1d;
