//! Adversaries acting on the qubits Alice sends to Bob.
//!
//! Each adversary is an isometry from the transit register `T` to Bob's
//! delivered register `B`, a retained memory `E` and an environment `R` that
//! is traced out. Classical messages are never modified.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::{BasisString, BitString};
use crate::error::{Error, Result};
use crate::quantum::{measure_theta_basis_pure, PureState, C64, MAX_STATE_DIM};

/// Largest key length for which adversaries are simulated on the joint state.
pub const MAX_ATTACK_KEY_BITS: usize = 4;

/// Eve's offline guess of both parties' raw keys.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EveGuess {
    pub key_a: BitString,
    pub key_b: BitString,
}

pub trait Adversary: Send + Sync {
    fn name(&self) -> &'static str;

    /// Size of the retained register `E`.
    fn memory_qubits(&self, n: usize) -> usize;

    /// Size of the discarded register `R`.
    fn environment_qubits(&self, _n: usize) -> usize {
        0
    }

    /// Maps a state on `A T` to a state on `A B E R`.
    fn intercept(&self, state: &PureState, n: usize) -> Result<PureState>;

    /// Unbounded offline phase on the post-measurement state `A B E R`;
    /// `basis` is whatever Eve computed for θ.
    fn decode(
        &self,
        _post: &PureState,
        _n: usize,
        _basis: &BasisString,
        _rng: &mut dyn rand::RngCore,
    ) -> Result<Option<EveGuess>> {
        Ok(None)
    }
}

fn check_state(state: &PureState, n: usize) -> Result<()> {
    if state.num_qubits() != 2 * n {
        return Err(Error::InvalidState(format!("expected {} qubits on A T, got {}", 2 * n, state.num_qubits())));
    }
    if n > MAX_ATTACK_KEY_BITS {
        return Err(Error::SizeCap(format!("attack simulation limited to n ≤ {MAX_ATTACK_KEY_BITS}")));
    }
    Ok(())
}

/// Builds `Σ_{a,t} ψ(a,t) |a⟩ ⊗ f(t)` where `f(t)` is a vector on `B E R`.
fn lift(state: &PureState, n: usize, out_qubits: usize, f: impl Fn(usize) -> Vec<(usize, C64)>) -> Result<PureState> {
    let total = n + out_qubits;
    if 1usize << total > MAX_STATE_DIM {
        return Err(Error::DimensionOverflow { dim: 1 << total, cap: MAX_STATE_DIM });
    }
    let mut out = vec![C64::default(); 1 << total];
    let amps = state.amplitudes();
    for (i, &amp) in amps.iter().enumerate() {
        if amp == C64::default() {
            continue;
        }
        let (a, t) = (i >> n, i & ((1 << n) - 1));
        for (rest, coef) in f(t) {
            out[(a << out_qubits) | rest] += amp * coef;
        }
    }
    PureState::new(out)
}

/// Passes the transit qubits through untouched.
#[derive(Clone, Copy, Debug, Default)]
pub struct IdentityAdversary;

impl Adversary for IdentityAdversary {
    fn name(&self) -> &'static str {
        "identity"
    }
    fn memory_qubits(&self, _n: usize) -> usize {
        0
    }
    fn intercept(&self, state: &PureState, n: usize) -> Result<PureState> {
        check_state(state, n)?;
        Ok(state.clone())
    }
}

/// Keeps the transit qubits and hands Bob halves of fresh EPR pairs; the
/// memory holds the kept qubits followed by the fresh partners.
#[derive(Clone, Copy, Debug, Default)]
pub struct SwapEpr;

impl Adversary for SwapEpr {
    fn name(&self) -> &'static str {
        "swap-epr"
    }
    fn memory_qubits(&self, n: usize) -> usize {
        2 * n
    }
    fn intercept(&self, state: &PureState, n: usize) -> Result<PureState> {
        check_state(state, n)?;
        let amp = C64::new(1.0 / ((1u64 << n) as f64).sqrt(), 0.0);
        lift(state, n, 3 * n, |t| (0..1usize << n).map(|b| ((b << (2 * n)) | (t << n) | b, amp)).collect())
    }
    fn decode(
        &self,
        post: &PureState,
        n: usize,
        basis: &BasisString,
        rng: &mut dyn rand::RngCore,
    ) -> Result<Option<EveGuess>> {
        let (key_a, after) = measure_theta_basis_pure(post, 2 * n, basis, rng)?;
        let (key_b, _) = measure_theta_basis_pure(&after, 3 * n, basis, rng)?;
        Ok(Some(EveGuess { key_a, key_b }))
    }
}

/// Measures each transit qubit in the computational basis, forwards the
/// outcome to Bob and stores a copy.
#[derive(Clone, Copy, Debug, Default)]
pub struct ClassicalClone;

impl Adversary for ClassicalClone {
    fn name(&self) -> &'static str {
        "classical-clone"
    }
    fn memory_qubits(&self, n: usize) -> usize {
        n
    }
    fn environment_qubits(&self, n: usize) -> usize {
        n
    }
    fn intercept(&self, state: &PureState, n: usize) -> Result<PureState> {
        check_state(state, n)?;
        lift(state, n, 3 * n, |t| vec![((t << (2 * n)) | (t << n) | t, C64::new(1.0, 0.0))])
    }
    fn decode(
        &self,
        post: &PureState,
        n: usize,
        _basis: &BasisString,
        rng: &mut dyn rand::RngCore,
    ) -> Result<Option<EveGuess>> {
        let (copy, _) = measure_theta_basis_pure(post, 2 * n, &BasisString::zeros(n), rng)?;
        Ok(Some(EveGuess { key_a: copy, key_b: copy }))
    }
}

/// Forwards the transit qubits but rotates one memory qubit per transit
/// qubit by `angle` when that qubit is `|1⟩`.
#[derive(Clone, Copy, Debug)]
pub struct PartialClone {
    pub angle: f64,
}

impl Adversary for PartialClone {
    fn name(&self) -> &'static str {
        "partial-clone"
    }
    fn memory_qubits(&self, n: usize) -> usize {
        n
    }
    fn intercept(&self, state: &PureState, n: usize) -> Result<PureState> {
        check_state(state, n)?;
        let (c, s) = (self.angle.cos(), self.angle.sin());
        lift(state, n, 2 * n, |t| {
            (0..1usize << n)
                .filter_map(|e| {
                    let mut coef = 1.0;
                    for q in 0..n {
                        let tb = (t >> q) & 1;
                        let eb = (e >> q) & 1;
                        coef *= match (tb, eb) {
                            (0, 0) => 1.0,
                            (0, _) => 0.0,
                            (_, 0) => c,
                            _ => s,
                        };
                    }
                    (coef != 0.0).then(|| ((t << n) | e, C64::new(coef, 0.0)))
                })
                .collect()
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AdversaryKind {
    None,
    Identity,
    SwapEpr,
    ClassicalClone,
    PartialClone,
}

impl AdversaryKind {
    pub const ALL: [AdversaryKind; 5] =
        [Self::None, Self::Identity, Self::SwapEpr, Self::ClassicalClone, Self::PartialClone];

    pub fn label(&self) -> &'static str {
        match self {
            Self::None => "none",
            Self::Identity => "identity",
            Self::SwapEpr => "swap-epr",
            Self::ClassicalClone => "classical-clone",
            Self::PartialClone => "partial-clone",
        }
    }

    /// The partial clone rotates by π/8.
    pub fn build(&self) -> Option<Box<dyn Adversary>> {
        match self {
            Self::None => None,
            Self::Identity => Some(Box::new(IdentityAdversary)),
            Self::SwapEpr => Some(Box::new(SwapEpr)),
            Self::ClassicalClone => Some(Box::new(ClassicalClone)),
            Self::PartialClone => Some(Box::new(PartialClone { angle: std::f64::consts::FRAC_PI_8 })),
        }
    }
}

impl std::str::FromStr for AdversaryKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.label() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown adversary {s:?}")))
    }
}

/// A uniformly random basis, used when the public tuple does not determine θ.
pub(crate) fn guess_basis<R: Rng + ?Sized>(n: usize, rng: &mut R) -> BasisString {
    BasisString::random(n, rng)
}
