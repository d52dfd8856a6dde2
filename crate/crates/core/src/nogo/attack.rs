//! Eve's two-phase key-recovery attack: repeated non-destructive simulated
//! measurements online, then conditional sampling offline.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::protocol::{ClassicalKeyProtocol, PartySample, Payload};
use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::game::binomial;
use crate::rng::substream;

/// Largest randomness length for which `Γ` sets are enumerated.
pub const MAX_ENUMERATION_BITS: usize = 20;

/// Candidate budget for rejection sampling and for the `Γ_B` scan.
pub const DEFAULT_CANDIDATE_CAP: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttackConfig {
    /// Number of simulated measurements per side.
    pub samples: usize,
    pub candidate_cap: usize,
}

impl AttackConfig {
    /// `2r` samples per side.
    pub fn for_protocol(proto: &ClassicalKeyProtocol) -> Self {
        Self { samples: 2 * proto.randomness_bits, candidate_cap: DEFAULT_CANDIDATE_CAP }
    }
}

/// What Eve records online: `α_t = f(R_A, R_B^{(t)})` and `β_t = f(R_A^{(t)}, R_B)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttackState {
    pub alphas: Vec<(u128, u128)>,
    pub betas: Vec<(u128, u128)>,
}

impl AttackState {
    pub fn in_gamma_a(&self, proto: &ClassicalKeyProtocol, ra: u128) -> bool {
        self.alphas.iter().all(|&(rb, k)| proto.key(ra, rb) == k)
    }

    pub fn in_gamma_b(&self, proto: &ClassicalKeyProtocol, rb: u128) -> bool {
        self.betas.iter().all(|&(ra, k)| proto.key(ra, rb) == k)
    }
}

/// Online phase on the intercepted messages; payloads are measured in place
/// and forwarded.
pub fn eve_online<R: Rng + ?Sized>(
    proto: &ClassicalKeyProtocol,
    cfg: &AttackConfig,
    public_a: u128,
    public_b: u128,
    payload_a: &mut Payload,
    payload_b: &mut Payload,
    rng: &mut R,
) -> AttackState {
    let mut alphas = Vec::with_capacity(cfg.samples);
    let mut betas = Vec::with_capacity(cfg.samples);
    for _ in 0..cfg.samples {
        let fake_bob = proto.sample_party(rng);
        alphas.push((fake_bob.randomness, proto.measure(fake_bob.randomness, false, public_a, payload_a, rng)));
        let fake_alice = proto.sample_party(rng);
        betas.push((fake_alice.randomness, proto.measure(fake_alice.randomness, true, public_b, payload_b, rng)));
    }
    AttackState { alphas, betas }
}

/// How Eve's sample of `R*_A` was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplingMethod {
    Exact,
    Rejection,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OfflineGuess {
    pub ra: Option<u128>,
    pub rb: Option<u128>,
    pub key: Option<BitString>,
    pub method: SamplingMethod,
}

/// `R*_A` uniform on `Γ_A`: exact for `r ≤ 20`, rejection sampling otherwise.
pub fn sample_gamma_a<R: Rng + ?Sized>(
    proto: &ClassicalKeyProtocol,
    cfg: &AttackConfig,
    state: &AttackState,
    rng: &mut R,
) -> (Option<u128>, SamplingMethod) {
    let r = proto.randomness_bits;
    if r <= MAX_ENUMERATION_BITS {
        let members: Vec<u128> = (0..1u128 << r).filter(|&x| state.in_gamma_a(proto, x)).collect();
        if members.is_empty() {
            return (None, SamplingMethod::Exact);
        }
        return (Some(members[rng.random_range(0..members.len())]), SamplingMethod::Exact);
    }
    let mask = (1u128 << r) - 1;
    let found = (0..cfg.candidate_cap).map(|_| rng.random::<u128>() & mask).find(|&x| state.in_gamma_a(proto, x));
    (found, SamplingMethod::Rejection)
}

/// Smallest member of `Γ_B` within the candidate budget.
pub fn first_gamma_b(proto: &ClassicalKeyProtocol, cfg: &AttackConfig, state: &AttackState) -> Option<u128> {
    let r = proto.randomness_bits;
    let limit = if r <= MAX_ENUMERATION_BITS { 1u128 << r } else { cfg.candidate_cap as u128 };
    (0..limit).find(|&x| state.in_gamma_b(proto, x))
}

/// Offline phase: `f(R*_A, R*_B)`, or no guess if a budget ran out.
pub fn eve_offline<R: Rng + ?Sized>(
    proto: &ClassicalKeyProtocol,
    cfg: &AttackConfig,
    state: &AttackState,
    rng: &mut R,
) -> OfflineGuess {
    let (ra, method) = sample_gamma_a(proto, cfg, state, rng);
    let rb = first_gamma_b(proto, cfg, state);
    let key = ra.zip(rb).map(|(a, b)| proto.key_string(a, b));
    OfflineGuess { ra, rb, key, method }
}

/// One attacked execution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttackTrial {
    pub alice: PartySample,
    pub bob: PartySample,
    pub state: AttackState,
    pub guess: OfflineGuess,
    pub key_a: BitString,
    pub key_b: BitString,
    /// Payloads reached the parties exactly as sent.
    pub undisturbed: bool,
}

impl AttackTrial {
    pub fn honest_key(&self, proto: &ClassicalKeyProtocol) -> BitString {
        proto.key_string(self.alice.randomness, self.bob.randomness)
    }

    pub fn success(&self, proto: &ClassicalKeyProtocol) -> bool {
        self.guess.key == Some(self.honest_key(proto))
    }
}

pub fn attack_trial<R: Rng + ?Sized>(proto: &ClassicalKeyProtocol, cfg: &AttackConfig, rng: &mut R) -> AttackTrial {
    let alice = proto.sample_party(rng);
    let bob = proto.sample_party(rng);
    let (mut to_bob, mut to_alice) = (alice.payload.clone(), bob.payload.clone());
    let state = eve_online(proto, cfg, alice.public, bob.public, &mut to_bob, &mut to_alice, rng);
    let undisturbed = to_bob == alice.payload && to_alice == bob.payload;
    let key_a = proto.measure(alice.randomness, true, bob.public, &mut to_alice, rng);
    let key_b = proto.measure(bob.randomness, false, alice.public, &mut to_bob, rng);
    let guess = eve_offline(proto, cfg, &state, rng);
    let m = proto.key_bits;
    AttackTrial {
        alice,
        bob,
        state,
        guess,
        key_a: BitString::from_value(m, key_a),
        key_b: BitString::from_value(m, key_b),
        undisturbed,
    }
}

/// `1/3 − 2 (8/9)^r`.
pub fn nogo_bound(r: usize) -> f64 {
    1.0 / 3.0 - 2.0 * (8.0f64 / 9.0).powi(r as i32)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NogoReport {
    pub trials: usize,
    pub rate: f64,
    pub stderr: f64,
    /// `max(0, 1/3 − 2 (8/9)^r)`.
    pub bound: f64,
    pub passed: bool,
    /// Trials with `K_A = K_B = f(R_A, R_B)` after the attack.
    pub honest_ok: usize,
    pub undisturbed: usize,
    /// Trials with `R_A ∈ Γ_A`.
    pub premise_ok: usize,
    /// Trials where a sampling budget ran out.
    pub budget_failures: usize,
    pub method: SamplingMethod,
}

/// Success rate over `trials` independent attacks on substreams of `seed`.
pub fn attack_success_rate(
    proto: &ClassicalKeyProtocol,
    cfg: &AttackConfig,
    trials: usize,
    seed: u64,
) -> Result<NogoReport> {
    if trials == 0 {
        return Err(Error::InvalidParameter("at least one trial is required".into()));
    }
    let flags: Vec<[bool; 5]> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let tr = attack_trial(proto, cfg, &mut substream(seed, t));
            let honest = tr.honest_key(proto);
            [
                tr.success(proto),
                tr.key_a == honest && tr.key_b == honest,
                tr.undisturbed,
                tr.state.in_gamma_a(proto, tr.alice.randomness),
                tr.guess.key.is_none(),
            ]
        })
        .collect();
    let count = |i: usize| flags.iter().filter(|f| f[i]).count();
    let (rate, stderr) = binomial(count(0), trials);
    let bound = nogo_bound(proto.randomness_bits).max(0.0);
    let method =
        if proto.randomness_bits <= MAX_ENUMERATION_BITS { SamplingMethod::Exact } else { SamplingMethod::Rejection };
    Ok(NogoReport {
        trials,
        rate,
        stderr,
        bound,
        passed: rate >= bound - 3.0 * stderr,
        honest_ok: count(1),
        undisturbed: count(2),
        premise_ok: count(3),
        budget_failures: count(4),
        method,
    })
}
