//! Built-in strategies for Bob and Charlie.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use super::exact::rotated;
use crate::bits::{BasisString, BitString};
use crate::entropy::{pretty_good_measurement, Povm};
use crate::error::{Error, Result};
use crate::quantum::random::random_pure_state;
use crate::quantum::{c, epr_pairs, theta_basis_state, ComplexMatrix, PureState, C64};

pub const MAX_GAME_KEY_BITS: usize = 4;
pub const MAX_CHARLIE_QUBITS: usize = 4;

/// What the preparation phase may depend on: the public tuple only through
/// what is efficiently computable from it.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PublicView {
    pub leak: Option<BasisString>,
}

/// A preparation of registers `A` (n qubits), `B` (n qubits) and `C`, in that
/// order, plus Charlie's θ-dependent measurement of `C`.
pub trait Strategy: Send + Sync {
    fn name(&self) -> &'static str;
    fn key_bits(&self) -> usize;
    fn charlie_qubits(&self) -> usize;
    fn prepare(&self, view: &PublicView) -> Result<PureState>;
    /// POVM on `C` labelled by n-bit guesses; absent labels are never output.
    fn charlie_povm(&self, theta: &BasisString) -> Result<Povm>;
}

fn check_key_bits(n: usize) -> Result<()> {
    if n == 0 || n > MAX_GAME_KEY_BITS {
        return Err(Error::InvalidParameter(format!("game key length {n} outside 1..={MAX_GAME_KEY_BITS}")));
    }
    Ok(())
}

/// EPR pairs between Alice and Bob; Charlie guesses uniformly.
#[derive(Clone, Debug)]
pub struct Honest {
    n: usize,
}

impl Honest {
    pub fn new(n: usize) -> Result<Self> {
        check_key_bits(n)?;
        Ok(Self { n })
    }
}

impl Strategy for Honest {
    fn name(&self) -> &'static str {
        "honest"
    }
    fn key_bits(&self) -> usize {
        self.n
    }
    fn charlie_qubits(&self) -> usize {
        0
    }
    fn prepare(&self, _view: &PublicView) -> Result<PureState> {
        epr_pairs(self.n)
    }
    fn charlie_povm(&self, _theta: &BasisString) -> Result<Povm> {
        let w = 1.0 / (1u64 << self.n) as f64;
        let elements = BitString::all(self.n).map(|k| (k, ComplexMatrix::identity(1).scale(w))).collect();
        Ok(Povm { elements })
    }
}

/// Charlie keeps Alice's EPR partners and hands Bob halves of fresh pairs
/// whose other halves he also keeps; when that would exceed the register cap
/// Bob gets `|0…0⟩` instead. Charlie answers with the θ-measurement of the
/// kept partners.
#[derive(Clone, Debug)]
pub struct InterceptResend {
    n: usize,
}

impl InterceptResend {
    pub fn new(n: usize) -> Result<Self> {
        check_key_bits(n)?;
        Ok(Self { n })
    }

    fn fresh_pairs(&self) -> bool {
        2 * self.n <= MAX_CHARLIE_QUBITS
    }
}

impl Strategy for InterceptResend {
    fn name(&self) -> &'static str {
        "intercept-resend"
    }
    fn key_bits(&self) -> usize {
        self.n
    }
    fn charlie_qubits(&self) -> usize {
        if self.fresh_pairs() { 2 * self.n } else { self.n }
    }
    fn prepare(&self, _view: &PublicView) -> Result<PureState> {
        let n = self.n;
        let total = 2 * n + self.charlie_qubits();
        let mut amps = vec![C64::default(); 1 << total];
        if self.fresh_pairs() {
            let amp = c(1.0 / (1u64 << n) as f64, 0.0);
            for a in 0..1usize << n {
                for b in 0..1usize << n {
                    amps[(a << (3 * n)) | (b << (2 * n)) | (a << n) | b] = amp;
                }
            }
        } else {
            let amp = c(1.0 / ((1u64 << n) as f64).sqrt(), 0.0);
            for a in 0..1usize << n {
                amps[(a << (2 * n)) | a] = amp;
            }
        }
        PureState::new(amps)
    }
    fn charlie_povm(&self, theta: &BasisString) -> Result<Povm> {
        let rest = ComplexMatrix::identity(1 << (self.charlie_qubits() - self.n));
        let elements = BitString::all(self.n)
            .map(|k| {
                let v = theta_basis_state(&k, theta)?;
                Ok((k, ComplexMatrix::projector(v.amplitudes()).kron(&rest)))
            })
            .collect::<Result<_>>()?;
        Ok(Povm { elements })
    }
}

/// Prepares `|0…0⟩_θ'` on both A and B for the leaked basis `θ'` (all zeros
/// when nothing leaks); Charlie always answers `0…0`.
#[derive(Clone, Debug)]
pub struct BasisAware {
    n: usize,
}

impl BasisAware {
    pub fn new(n: usize) -> Result<Self> {
        check_key_bits(n)?;
        Ok(Self { n })
    }
}

impl Strategy for BasisAware {
    fn name(&self) -> &'static str {
        "basis-aware"
    }
    fn key_bits(&self) -> usize {
        self.n
    }
    fn charlie_qubits(&self) -> usize {
        0
    }
    fn prepare(&self, view: &PublicView) -> Result<PureState> {
        let basis = view.leak.unwrap_or_else(|| BasisString::zeros(self.n));
        if basis.len() != self.n {
            return Err(Error::LengthMismatch { expected: self.n, got: basis.len() });
        }
        let half = theta_basis_state(&BitString::zeros(self.n), &basis)?;
        half.tensor(&half)
    }
    fn charlie_povm(&self, _theta: &BasisString) -> Result<Povm> {
        Ok(Povm { elements: vec![(BitString::zeros(self.n), ComplexMatrix::identity(1))] })
    }
}

/// A fixed Haar-random state; Charlie uses the pretty-good measurement for
/// the agreeing part of `K` given `C`.
#[derive(Clone, Debug)]
pub struct RandomStrategy {
    n: usize,
    charlie: usize,
    state: PureState,
}

impl RandomStrategy {
    pub fn new(n: usize, charlie_qubits: usize, seed: u64) -> Result<Self> {
        check_key_bits(n)?;
        if charlie_qubits > MAX_CHARLIE_QUBITS {
            return Err(Error::InvalidParameter(format!("Charlie register {charlie_qubits} exceeds {MAX_CHARLIE_QUBITS}")));
        }
        let state = random_pure_state(2 * n + charlie_qubits, &mut ChaCha20Rng::seed_from_u64(seed));
        Ok(Self { n, charlie: charlie_qubits, state })
    }
}

impl Strategy for RandomStrategy {
    fn name(&self) -> &'static str {
        "random"
    }
    fn key_bits(&self) -> usize {
        self.n
    }
    fn charlie_qubits(&self) -> usize {
        self.charlie
    }
    fn prepare(&self, _view: &PublicView) -> Result<PureState> {
        Ok(self.state.clone())
    }
    fn charlie_povm(&self, theta: &BasisString) -> Result<Povm> {
        let (n, cq) = (self.n, self.charlie);
        let v = rotated(self.state.amplitudes(), n, cq, theta);
        let d = 1usize << cq;
        let ops: Vec<ComplexMatrix> = (0..1usize << n)
            .map(|k| {
                let start = ((k << n) | k) << cq;
                ComplexMatrix::projector(&v[start..start + d])
            })
            .collect();
        let pgm = pretty_good_measurement(&ops);
        Ok(Povm { elements: BitString::all(n).zip(pgm).collect() })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrategyKind {
    Honest,
    #[serde(alias = "intercept")]
    InterceptResend,
    BasisAware,
    Random,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 4] = [Self::Honest, Self::InterceptResend, Self::BasisAware, Self::Random];

    pub fn label(&self) -> &'static str {
        match self {
            Self::Honest => "honest",
            Self::InterceptResend => "intercept-resend",
            Self::BasisAware => "basis-aware",
            Self::Random => "random",
        }
    }

    /// The random strategy uses two Charlie qubits and `seed`.
    pub fn build(&self, n: usize, seed: u64) -> Result<Box<dyn Strategy>> {
        Ok(match self {
            Self::Honest => Box::new(Honest::new(n)?),
            Self::InterceptResend => Box::new(InterceptResend::new(n)?),
            Self::BasisAware => Box::new(BasisAware::new(n)?),
            Self::Random => Box::new(RandomStrategy::new(n, 2, seed)?),
        })
    }
}

impl std::str::FromStr for StrategyKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = if s == "intercept" { "intercept-resend" } else { s };
        Self::ALL
            .into_iter()
            .find(|k| k.label() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown strategy {s:?}")))
    }
}
