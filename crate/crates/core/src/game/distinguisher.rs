//! The efficient reduction from the game to distinguishing `(p, θ)` from
//! `(p, θ*)`: prepare, measure `{M0, M1}`, and on outcome 1 check agreement
//! in the supplied basis.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::exact::{binomial, rotated};
use super::strategy::{PublicView, Strategy};
use crate::bits::BasisString;
use crate::error::{Error, Result};
use crate::nike::{sample_z, Nike};
use crate::quantum::projectors::apply_m1;
use crate::quantum::{PureState, C64};
use crate::rng::substream;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistinguisherResult {
    /// `Pr[1 | real θ] − Pr[1 | uniform θ*]`.
    pub advantage: f64,
    pub stderr: f64,
    pub real_rate: f64,
    pub ideal_rate: f64,
}

/// `Σ_k ‖(⟨kk|_θ ⊗ I) M1 ψ‖²`, the probability that the reduction outputs 1.
pub fn reduction_acceptance(psi: &PureState, n: usize, s: usize, basis: &BasisString) -> Result<f64> {
    let c = psi.num_qubits() - 2 * n;
    let u = apply_m1(psi.amplitudes(), n, s, c)?;
    Ok(agreeing_weight(&u, n, c, basis))
}

fn agreeing_weight(u: &[C64], n: usize, c: usize, basis: &BasisString) -> f64 {
    let w = rotated(u, n, c, basis);
    (0..1usize << n)
        .map(|k| {
            let start = ((k << n) | k) << c;
            w[start..start + (1 << c)].iter().map(|a| a.norm_sqr()).sum::<f64>()
        })
        .sum()
}

/// One run of the reduction with sampled measurement outcomes.
fn reduce_once<R: Rng + ?Sized>(psi: &PureState, n: usize, s: usize, basis: &BasisString, rng: &mut R) -> Result<bool> {
    let c = psi.num_qubits() - 2 * n;
    let u = apply_m1(psi.amplitudes(), n, s, c)?;
    let p1: f64 = u.iter().map(|a| a.norm_sqr()).sum();
    if rng.random::<f64>() >= p1 {
        return Ok(false);
    }
    let agree = agreeing_weight(&u, n, c, basis) / p1;
    Ok(rng.random::<f64>() < agree)
}

pub fn distinguisher_advantage<N: Nike, R: Rng + ?Sized>(
    scheme: &N,
    strategy: &dyn Strategy,
    s: usize,
    trials: usize,
    rng: &mut R,
) -> Result<DistinguisherResult> {
    let n = strategy.key_bits();
    if scheme.key_bits() != n {
        return Err(Error::LengthMismatch { expected: n, got: scheme.key_bits() });
    }
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be positive".into()));
    }
    let seed: u64 = rng.random();
    let outcomes = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut r = substream(seed, t);
            let z = sample_z(scheme, &mut r)?;
            let psi = strategy.prepare(&PublicView { leak: scheme.efficient_leak(&z.p) })?;
            let uniform = BasisString::random(n, &mut r);
            Ok((reduce_once(&psi, n, s, &z.theta, &mut r)?, reduce_once(&psi, n, s, &uniform, &mut r)?))
        })
        .collect::<Result<Vec<(bool, bool)>>>()?;
    let (real_rate, real_se) = binomial(outcomes.iter().filter(|o| o.0).count(), trials);
    let (ideal_rate, ideal_se) = binomial(outcomes.iter().filter(|o| o.1).count(), trials);
    Ok(DistinguisherResult {
        advantage: real_rate - ideal_rate,
        stderr: (real_se * real_se + ideal_se * ideal_se).sqrt(),
        real_rate,
        ideal_rate,
    })
}

/// Exact bias of the reduction for an enumerable scheme.
pub fn exact_reduction_bias<N: Nike>(scheme: &N, strategy: &dyn Strategy, s: usize) -> Result<f64> {
    let n = strategy.key_bits();
    let support = scheme.enumerate_z().ok_or_else(|| Error::NotEnumerable(scheme.name().into()))?;
    let mut bias = 0.0;
    for (w, z) in support {
        let psi = strategy.prepare(&PublicView { leak: scheme.efficient_leak(&z.p) })?;
        let real = reduction_acceptance(&psi, n, s, &z.theta)?;
        let ideal: f64 = BasisString::all(n).map(|t| reduction_acceptance(&psi, n, s, &t)).sum::<Result<f64>>()?
            / (1u64 << n) as f64;
        bias += w * (real - ideal);
    }
    Ok(bias)
}
