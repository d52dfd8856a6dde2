//! Exact distance of each party's final key from uniform given Eve's
//! registers, for an adversary on the first sub-protocol only.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::adversary::Adversary;
use super::two_round::{DigestKind, TwoRoundConfig};
use crate::error::{Error, Result};
use crate::hash::{HashSeed, UniversalHashFamily};
use crate::nike::Nike;
use crate::quantum::{epr_pairs, ComplexMatrix, PureState};

/// Largest key length for the exhaustive construction.
pub const MAX_EVERLASTING_KEY_BITS: usize = 2;

/// Largest retained register for the exhaustive construction.
pub const MAX_EVERLASTING_MEMORY_QUBITS: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EverlastingReport {
    /// `Td(ρ_{E K*_A}, ρ_{E U_A})`.
    pub alice: f64,
    pub bob: f64,
    pub epsilon: f64,
    pub alice_abort: f64,
    pub bob_abort: f64,
    /// Whether seeds, digest functions and digest values are part of Eve's view.
    pub transcript_visible: bool,
}

/// `Σ_{θ in view} w σ^θ_{ka,kb}` per NIKE view, indexed `ka·2^n + kb`.
fn memory_operators<N: Nike>(scheme: &N, adversary: Option<&dyn Adversary>) -> Result<(usize, Vec<Vec<ComplexMatrix>>)> {
    let n = scheme.key_bits();
    let z = scheme.enumerate_z().ok_or_else(|| Error::NotEnumerable(scheme.name().into()))?;
    let (e, r) = adversary.map_or((0, 0), |a| (a.memory_qubits(n), a.environment_qubits(n)));
    if e > MAX_EVERLASTING_MEMORY_QUBITS {
        return Err(Error::SizeCap(format!("memory of {e} qubits exceeds {MAX_EVERLASTING_MEMORY_QUBITS}")));
    }
    let state: PureState = match adversary {
        Some(a) => a.intercept(&epr_pairs(n)?, n)?,
        None => epr_pairs(n)?,
    };
    let (de, dr, c) = (1usize << e, 1usize << r, e + r);
    let keys = 1usize << n;
    let mut views: BTreeMap<String, Vec<ComplexMatrix>> = BTreeMap::new();
    for (w, sample) in z {
        let view = serde_json::to_string(&sample.p).map_err(|err| Error::InvalidParameter(err.to_string()))?;
        let ops = views.entry(view).or_insert_with(|| vec![ComplexMatrix::zeros(de, de); keys * keys]);
        let v = crate::game::rotated(state.amplitudes(), n, c, &sample.theta);
        for (i, op) in ops.iter_mut().enumerate() {
            let start = i << c;
            let m = ComplexMatrix::from_row_slice(de, dr, &v[start..start + (1 << c)]);
            op.add_scaled(&(&m * &m.adjoint()), w);
        }
    }
    Ok((de, views.into_values().collect()))
}

fn trace_norm(m: &ComplexMatrix) -> f64 {
    if m.rows() == 1 {
        m.get(0, 0).re.abs()
    } else {
        m.trace_norm_hermitian()
    }
}

/// `Σ_c ‖τ_c − 2^{-ℓ} Σ_{c'} τ_{c'}‖₁` over non-abort labels.
fn label_distance(taus: &[ComplexMatrix], outputs: usize) -> f64 {
    if outputs == 2 {
        return trace_norm(&(&taus[0] - &taus[1]));
    }
    let mut total = taus[0].clone();
    for t in &taus[1..outputs] {
        total = &total + t;
    }
    let uniform = total.scale(1.0 / outputs as f64);
    taus[..outputs].iter().map(|t| trace_norm(&(t - &uniform))).sum()
}

struct Tally {
    alice: f64,
    bob: f64,
    alice_abort: f64,
    bob_abort: f64,
}

impl Tally {
    fn zero() -> Self {
        Self { alice: 0.0, bob: 0.0, alice_abort: 0.0, bob_abort: 0.0 }
    }

    fn add(self, o: Self) -> Self {
        Self {
            alice: self.alice + o.alice,
            bob: self.bob + o.bob,
            alice_abort: self.alice_abort + o.alice_abort,
            bob_abort: self.bob_abort + o.bob_abort,
        }
    }
}

/// Exhaustive construction over NIKE samples, raw keys, extractor seeds and
/// digest functions. With a visible transcript the additive seed parts are
/// fixed to zero, since Eve can undo them; otherwise they are averaged over.
pub fn everlasting_distance_report<N: Nike>(
    scheme: &N,
    cfg: &TwoRoundConfig,
    adversary: Option<&dyn Adversary>,
    transcript_visible: bool,
) -> Result<EverlastingReport> {
    cfg.validate()?;
    let n = cfg.key_bits;
    if n != scheme.key_bits() {
        return Err(Error::LengthMismatch { expected: scheme.key_bits(), got: n });
    }
    if n > MAX_EVERLASTING_KEY_BITS {
        return Err(Error::SizeCap(format!("exhaustive construction limited to n ≤ {MAX_EVERLASTING_KEY_BITS}")));
    }
    if cfg.digest != DigestKind::Universal {
        return Err(Error::InvalidParameter("exhaustive construction needs the universal digest".into()));
    }
    if cfg.attacked[1] {
        return Err(Error::InvalidParameter("only the first sub-protocol may be attacked".into()));
    }
    let adversary = if cfg.attacked[0] { adversary } else { None };
    let (de, views) = memory_operators(scheme, adversary)?;
    let spec = cfg.extractor()?;
    let ext = spec.family();
    let dig = UniversalHashFamily::new(n, cfg.digest_bits)?;
    let (keys, outputs, m) = (1usize << n, 1usize << spec.output_bits, cfg.digest_bits);
    let key_share = 1.0 / keys as f64;
    let dig_seeds = 1u128 << n;
    let dh = |a: u128, x: usize| dig.eval_raw(&HashSeed { a, b: 0 }, x as u128) as usize;
    let zero = ComplexMatrix::zeros(de, de);

    let tally = if transcript_visible {
        let ext_seeds = 1u128 << (2 * n);
        let combos = ext_seeds * dig_seeds.pow(4);
        let weight = 1.0 / combos as f64;
        (0..combos)
            .into_par_iter()
            .map(|idx| {
                let mut rest = idx;
                let mut next = |base: u128| {
                    let v = rest % base;
                    rest /= base;
                    v
                };
                let ea = HashSeed { a: next(ext_seeds), b: 0 };
                let [h0s, h0r, h1s, h1r] = [0; 4].map(|_| next(dig_seeds));
                let values = 1usize << (4 * m);
                let mut t = Tally::zero();
                for ops in &views {
                    let mut tau_a = vec![vec![zero.clone(); outputs + 1]; values];
                    let mut tau_b = tau_a.clone();
                    for ka in 0..keys {
                        for kb in 0..keys {
                            let sigma = &ops[ka * keys + kb];
                            if sigma.trace().re == 0.0 {
                                continue;
                            }
                            let (v0s, v0r) = (dh(h0s, ka), dh(h0r, kb));
                            let a0 = (dh(h0r, ka) == v0r).then_some(ka);
                            let b0 = (dh(h0s, kb) == v0s).then_some(kb);
                            for k1 in 0..keys {
                                let u = (((v0s << m | v0r) << m | dh(h1s, k1)) << m) | dh(h1r, k1);
                                let label = |k0: Option<usize>| {
                                    k0.map_or(outputs, |k0| ext.eval_raw(&ea, ((k0 << n) | k1) as u128) as usize)
                                };
                                tau_a[u][label(a0)].add_scaled(sigma, key_share);
                                tau_b[u][label(b0)].add_scaled(sigma, key_share);
                            }
                        }
                    }
                    for u in 0..values {
                        t.alice += label_distance(&tau_a[u], outputs);
                        t.bob += label_distance(&tau_b[u], outputs);
                        t.alice_abort += tau_a[u][outputs].trace().re;
                        t.bob_abort += tau_b[u][outputs].trace().re;
                    }
                }
                Tally {
                    alice: t.alice * weight,
                    bob: t.bob * weight,
                    alice_abort: t.alice_abort * weight,
                    bob_abort: t.bob_abort * weight,
                }
            })
            .reduce(Tally::zero, Tally::add)
    } else {
        let field = 1u128 << (2 * n);
        let weight = 1.0 / (field * field * dig_seeds) as f64;
        let mut t = Tally::zero();
        for ops in &views {
            let mut tau_a = vec![zero.clone(); outputs + 1];
            let mut tau_b = tau_a.clone();
            for a in 0..field {
                for b in 0..field {
                    let es = HashSeed { a, b };
                    // Each party's gate uses the other's digest; one index
                    // serves both marginals.
                    for h in 0..dig_seeds {
                        for ka in 0..keys {
                            for kb in 0..keys {
                                let sigma = &ops[ka * keys + kb];
                                let a0 = (dh(h, ka) == dh(h, kb)).then_some(ka);
                                let b0 = (dh(h, kb) == dh(h, ka)).then_some(kb);
                                for k1 in 0..keys {
                                    let label = |k0: Option<usize>| {
                                        k0.map_or(outputs, |k0| ext.eval_raw(&es, ((k0 << n) | k1) as u128) as usize)
                                    };
                                    tau_a[label(a0)].add_scaled(sigma, key_share * weight);
                                    tau_b[label(b0)].add_scaled(sigma, key_share * weight);
                                }
                            }
                        }
                    }
                }
            }
            t.alice += label_distance(&tau_a, outputs);
            t.bob += label_distance(&tau_b, outputs);
            t.alice_abort += tau_a[outputs].trace().re;
            t.bob_abort += tau_b[outputs].trace().re;
        }
        t
    };
    Ok(EverlastingReport {
        alice: 0.5 * tally.alice,
        bob: 0.5 * tally.bob,
        epsilon: spec.epsilon,
        alice_abort: tally.alice_abort,
        bob_abort: tally.bob_abort,
        transcript_visible,
    })
}
