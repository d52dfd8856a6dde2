//! Exact and sampled winning probabilities and the three-term split.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::strategy::{PublicView, Strategy, MAX_CHARLIE_QUBITS, MAX_GAME_KEY_BITS};
use crate::bits::BasisString;
use crate::entropy::Povm;
use crate::error::{Error, Result};
use crate::nike::{sample_z, Nike};
use crate::quantum::matrix::vec_inner;
use crate::quantum::projectors::{apply_hadamard_theta, apply_m1};
use crate::quantum::{sample_index, ComplexMatrix, PureState, C64};
use crate::rng::substream;

pub const IDENTITY_TOL: f64 = 1e-9;

/// `(H^θ ⊗ H^θ ⊗ I_C) ψ`; the block of `(k_A, k_B)` is then the contiguous
/// slice starting at `((k_A << n) | k_B) << c`.
pub(crate) fn rotated(psi: &[C64], n: usize, c: usize, theta: &BasisString) -> Vec<C64> {
    let total = 2 * n + c;
    let mut v = psi.to_vec();
    apply_hadamard_theta(&mut v, total, 0, theta);
    apply_hadamard_theta(&mut v, total, n, theta);
    v
}

fn block(v: &[C64], n: usize, c: usize, ka: usize, kb: usize) -> &[C64] {
    let start = ((ka << n) | kb) << c;
    &v[start..start + (1 << c)]
}

fn sandwich(u: &[C64], e: &ComplexMatrix, w: &[C64]) -> C64 {
    vec_inner(u, &e.apply(w))
}

fn povm_by_label(povm: &Povm, n: usize, dim: usize) -> Result<Vec<Option<&ComplexMatrix>>> {
    let mut out = vec![None; 1 << n];
    for (label, e) in &povm.elements {
        if label.len() != n {
            return Err(Error::LengthMismatch { expected: n, got: label.len() });
        }
        if e.rows() != dim || e.cols() != dim {
            return Err(Error::DimensionMismatch { left: dim, right: e.rows().max(e.cols()) });
        }
        if out[label.index()].is_some() {
            return Err(Error::InvalidPovm(format!("label {label} repeated")));
        }
        out[label.index()] = Some(e);
    }
    Ok(out)
}

/// Scalar terms of the split of `tr(ρ_KC Σ_k |k⟩⟨k| ⊗ E_k)` for one θ, plus
/// the directly evaluated left-hand side.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    /// `Σ_k tr((|kk⟩⟨kk|_θ M0 ⊗ E_k) ρ)`.
    pub agree_m0: f64,
    /// `Σ_k tr((|kk⟩⟨kk|_θ M1 ⊗ E_k) ρ)`.
    pub agree_m1: f64,
    /// `2^{-n} tr((Σ_{k_A ≠ k_B} |k_A k_B⟩⟨k_A k_B|_θ ⊗ I) ρ)`.
    pub disagree: f64,
    pub direct: f64,
}

impl Decomposition {
    pub fn sum(&self) -> f64 {
        self.agree_m0 + self.agree_m1 + self.disagree
    }

    pub fn identity_error(&self) -> f64 {
        (self.sum() - self.direct).abs()
    }

    fn scaled_add(&mut self, other: &Decomposition, w: f64) {
        self.agree_m0 += w * other.agree_m0;
        self.agree_m1 += w * other.agree_m1;
        self.disagree += w * other.disagree;
        self.direct += w * other.direct;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionReport {
    pub terms: Decomposition,
    /// `√((n/s)/2^s)`.
    pub agree_m0_bound: f64,
    /// `2^{-n}`.
    pub disagree_bound: f64,
}

impl DecompositionReport {
    pub fn holds(&self) -> bool {
        self.terms.agree_m0 <= self.agree_m0_bound + IDENTITY_TOL
            && self.terms.disagree <= self.disagree_bound + IDENTITY_TOL
            && self.terms.identity_error() <= IDENTITY_TOL
    }
}

pub fn fixed_theta_bound(n: usize, s: usize) -> f64 {
    ((n / s) as f64 / (1u64 << s) as f64).sqrt()
}

#[derive(Clone, Copy, Debug, Default)]
struct ThetaTerms {
    pwin: f64,
    agree: f64,
    split: Decomposition,
}

fn theta_terms(psi: &PureState, n: usize, s: usize, theta: &BasisString, povm: &Povm) -> Result<ThetaTerms> {
    let total = psi.num_qubits();
    if total < 2 * n || theta.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: theta.len() });
    }
    let c = total - 2 * n;
    let dim = 1usize << c;
    let elems = povm_by_label(povm, n, dim)?;
    let v = rotated(psi.amplitudes(), n, c, theta);
    let m1psi = apply_m1(psi.amplitudes(), n, s, c)?;
    let w = rotated(&m1psi, n, c, theta);
    let keys = 1usize << n;
    let mut out = ThetaTerms::default();
    let mut off_diag = ComplexMatrix::zeros(dim, dim);
    for ka in 0..keys {
        for kb in 0..keys {
            let vb = block(&v, n, c, ka, kb);
            if ka == kb {
                out.agree += vb.iter().map(|a| a.norm_sqr()).sum::<f64>();
            } else {
                off_diag = &off_diag + &ComplexMatrix::outer(vb, vb);
            }
        }
    }
    let mix = 1.0 / keys as f64;
    out.split.disagree = mix * off_diag.trace().re;
    for (k, e) in elems.iter().enumerate() {
        let Some(e) = e else { continue };
        let vk = block(&v, n, c, k, k);
        let wk = block(&w, n, c, k, k);
        let m0k: Vec<C64> = vk.iter().zip(wk).map(|(a, b)| a - b).collect();
        let win = sandwich(vk, e, vk).re;
        out.pwin += win;
        out.split.agree_m0 += sandwich(vk, e, &m0k).re;
        out.split.agree_m1 += sandwich(vk, e, wk).re;
        let sigma = &ComplexMatrix::outer(vk, vk) + &off_diag.scale(mix);
        out.split.direct += sigma.trace_product(e).re;
    }
    Ok(out)
}

/// Three-term split for a prepared state `ψ` on `A B C` and a fixed θ.
/// Mixed preparations enter through a purifying ancilla inside `C`.
pub fn decomposition_terms(psi: &PureState, theta: &BasisString, s: usize, povm: &Povm) -> Result<DecompositionReport> {
    let n = theta.len();
    let t = theta_terms(psi, n, s, theta, povm)?;
    Ok(DecompositionReport {
        terms: t.split,
        agree_m0_bound: fixed_theta_bound(n, s),
        disagree_bound: 1.0 / (1u64 << n) as f64,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameResult {
    pub pwin: f64,
    pub pwin_stderr: f64,
    pub agree_rate: f64,
    pub agree_stderr: f64,
    /// Averaged three-term split; present for exact evaluations only.
    pub decomposition: Option<Decomposition>,
    /// Number of trials for sampled estimates.
    pub trials: Option<usize>,
}

/// Largest divisor of `n` not exceeding `√n`.
pub fn default_block(n: usize) -> usize {
    (1..=n).filter(|s| n.is_multiple_of(*s) && s * s <= n).max().unwrap_or(1)
}

fn check_game(strategy: &dyn Strategy, n: usize, scheme_bits: usize) -> Result<()> {
    if strategy.key_bits() != n {
        return Err(Error::LengthMismatch { expected: n, got: strategy.key_bits() });
    }
    if scheme_bits != n {
        return Err(Error::LengthMismatch { expected: n, got: scheme_bits });
    }
    if n > MAX_GAME_KEY_BITS || strategy.charlie_qubits() > MAX_CHARLIE_QUBITS {
        return Err(Error::InvalidParameter(format!(
            "game size n={n}, c={} exceeds caps {MAX_GAME_KEY_BITS}/{MAX_CHARLIE_QUBITS}",
            strategy.charlie_qubits()
        )));
    }
    Ok(())
}

/// Exact expectation over an explicit `(weight, view, θ)` distribution.
pub fn exact_pwin_over(
    strategy: &dyn Strategy,
    distribution: &[(f64, PublicView, BasisString)],
    s: usize,
) -> Result<GameResult> {
    let n = strategy.key_bits();
    let mut pwin = 0.0;
    let mut agree = 0.0;
    let mut split = Decomposition::default();
    for (w, view, theta) in distribution {
        let psi = strategy.prepare(view)?;
        if psi.num_qubits() != 2 * n + strategy.charlie_qubits() {
            return Err(Error::InvalidState(format!("strategy prepared {} qubits", psi.num_qubits())));
        }
        let povm = strategy.charlie_povm(theta)?;
        let t = theta_terms(&psi, n, s, theta, &povm)?;
        pwin += w * t.pwin;
        agree += w * t.agree;
        split.scaled_add(&t.split, *w);
    }
    Ok(GameResult {
        pwin,
        pwin_stderr: 0.0,
        agree_rate: agree,
        agree_stderr: 0.0,
        decomposition: Some(split),
        trials: None,
    })
}

pub fn exact_pwin<N: Nike>(scheme: &N, strategy: &dyn Strategy, n: usize) -> Result<GameResult> {
    exact_pwin_with_block(scheme, strategy, n, default_block(n))
}

pub fn exact_pwin_with_block<N: Nike>(scheme: &N, strategy: &dyn Strategy, n: usize, s: usize) -> Result<GameResult> {
    check_game(strategy, n, scheme.key_bits())?;
    let support = scheme.enumerate_z().ok_or_else(|| Error::NotEnumerable(scheme.name().into()))?;
    let dist: Vec<(f64, PublicView, BasisString)> = support
        .into_iter()
        .map(|(w, z)| (w, PublicView { leak: scheme.efficient_leak(&z.p) }, z.theta))
        .collect();
    exact_pwin_over(strategy, &dist, s)
}

fn play_once<N: Nike, R: Rng + ?Sized>(scheme: &N, strategy: &dyn Strategy, rng: &mut R) -> Result<(bool, bool)> {
    let n = strategy.key_bits();
    let c = strategy.charlie_qubits();
    let z = sample_z(scheme, rng)?;
    let psi = strategy.prepare(&PublicView { leak: scheme.efficient_leak(&z.p) })?;
    let v = rotated(psi.amplitudes(), n, c, &z.theta);
    let keys = 1usize << n;
    let probs: Vec<f64> = (0..keys * keys)
        .map(|i| block(&v, n, c, i >> n, i & (keys - 1)).iter().map(|a| a.norm_sqr()).sum())
        .collect();
    let pair = sample_index(&probs, rng);
    let (ka, kb) = (pair >> n, pair & (keys - 1));
    let rest = block(&v, n, c, ka, kb);
    let povm = strategy.charlie_povm(&z.theta)?;
    let weights: Vec<f64> = povm.elements.iter().map(|(_, e)| sandwich(rest, e, rest).re.max(0.0)).collect();
    let guess = povm.elements[sample_index(&weights, rng)].0.index();
    Ok((ka == kb && kb == guess, ka == kb))
}

/// Monte-Carlo play of the four game phases with per-trial streams drawn
/// from one master seed.
pub fn sampled_pwin<N: Nike, R: Rng + ?Sized>(
    scheme: &N,
    strategy: &dyn Strategy,
    n: usize,
    trials: usize,
    rng: &mut R,
) -> Result<GameResult> {
    check_game(strategy, n, scheme.key_bits())?;
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be positive".into()));
    }
    let seed: u64 = rng.random();
    let outcomes = (0..trials as u64)
        .into_par_iter()
        .map(|t| play_once(scheme, strategy, &mut substream(seed, t)))
        .collect::<Result<Vec<_>>>()?;
    let wins = outcomes.iter().filter(|o| o.0).count();
    let agrees = outcomes.iter().filter(|o| o.1).count();
    let (pwin, pwin_stderr) = binomial(wins, trials);
    let (agree_rate, agree_stderr) = binomial(agrees, trials);
    Ok(GameResult { pwin, pwin_stderr, agree_rate, agree_stderr, decomposition: None, trials: Some(trials) })
}

/// Rate and its binomial standard error.
pub fn binomial(successes: usize, trials: usize) -> (f64, f64) {
    let t = trials as f64;
    let p = successes as f64 / t;
    (p, (p * (1.0 - p) / t).sqrt())
}
