//! The two-round protocol: two one-round instances with swapped roles,
//! digest comparison and seeded extraction of the concatenated keys.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::adversary::Adversary;
use super::niqkd::{run_niqkd, NiqkdTranscript};
use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::game::binomial;
use crate::hash::{extract, CrHash, ExtractorSpec, HashSeed, KeyDigest, UniversalDigest, UniversalHashFamily};
use crate::nike::Nike;
use crate::rng::substream;

/// Bytes of key material in a SHA-256 digest descriptor.
pub const DIGEST_KEY_BYTES: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DigestKind {
    Sha256,
    Universal,
}

impl DigestKind {
    pub fn label(&self) -> &'static str {
        match self {
            Self::Sha256 => "sha256",
            Self::Universal => "universal",
        }
    }
}

impl std::str::FromStr for DigestKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        [Self::Sha256, Self::Universal]
            .into_iter()
            .find(|k| k.label() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown digest {s:?}")))
    }
}

/// A transmitted digest function.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DigestDescriptor {
    Sha256 { key: Vec<u8>, bits: usize },
    Universal { seed: HashSeed, input_bits: usize, bits: usize },
}

impl DigestDescriptor {
    pub fn sample<R: Rng + ?Sized>(kind: DigestKind, input_bits: usize, bits: usize, rng: &mut R) -> Result<Self> {
        Ok(match kind {
            DigestKind::Sha256 => {
                let mut key = vec![0u8; DIGEST_KEY_BYTES];
                rng.fill(&mut key[..]);
                Self::Sha256 { key, bits }
            }
            DigestKind::Universal => {
                let family = UniversalHashFamily::new(input_bits, bits)?;
                Self::Universal { seed: family.random_seed(rng), input_bits, bits }
            }
        })
    }

    pub fn digest(&self, x: &BitString) -> Result<BitString> {
        match self {
            Self::Sha256 { key, bits } => CrHash::new(key.clone(), *bits)?.digest(x),
            Self::Universal { seed, input_bits, bits } => {
                UniversalDigest { family: UniversalHashFamily::new(*input_bits, *bits)?, seed: *seed }.digest(x)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoRoundConfig {
    pub key_bits: usize,
    pub digest_bits: usize,
    pub output_bits: usize,
    pub digest: DigestKind,
    /// Which sub-protocols the adversary acts on.
    pub attacked: [bool; 2],
}

impl TwoRoundConfig {
    /// Digest length `max(1, n/4)` and output length `min(m, ⌊2n/3⌋)`.
    pub fn new(n: usize) -> Result<Self> {
        Self::with_digest_bits(n, (n / 4).max(1))
    }

    pub fn with_digest_bits(n: usize, m: usize) -> Result<Self> {
        let cfg = Self {
            key_bits: n,
            digest_bits: m,
            output_bits: m.min(2 * n / 3).max(1),
            digest: DigestKind::Sha256,
            attacked: [true, false],
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.key_bits == 0 || self.digest_bits == 0 || self.output_bits == 0 {
            return Err(Error::InvalidParameter("key, digest and output lengths must be positive".into()));
        }
        if self.digest == DigestKind::Universal && self.digest_bits > self.key_bits {
            return Err(Error::InvalidParameter(format!(
                "universal digest of {} bits exceeds key length {}",
                self.digest_bits, self.key_bits
            )));
        }
        self.extractor().map(|_| ())
    }

    /// Source `2n`, output `ℓ`, `ε = 2^{-ℓ}` and assumed entropy `3ℓ`.
    pub fn extractor(&self) -> Result<ExtractorSpec> {
        let l = self.output_bits;
        if 3 * l > 2 * self.key_bits {
            return Err(Error::InvalidParameter(format!(
                "output length {l} needs 3ℓ ≤ 2n = {}",
                2 * self.key_bits
            )));
        }
        ExtractorSpec::new(2 * self.key_bits, l, 0.5f64.powi(l as i32), 3.0 * l as f64)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Party {
    Alice,
    Bob,
}

/// One sub-protocol with its second-round messages.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubProtocol<P, K> {
    pub sender: Party,
    /// Raw keys are `key_a` for the sender and `key_b` for the receiver.
    pub run: NiqkdTranscript<P, K>,
    pub seed: HashSeed,
    pub sender_digest: DigestDescriptor,
    pub sender_value: BitString,
    pub receiver_digest: DigestDescriptor,
    pub receiver_value: BitString,
    pub sender_output: Option<BitString>,
    pub receiver_output: Option<BitString>,
}

impl<P, K> SubProtocol<P, K> {
    pub fn output(&self, party: Party) -> Option<BitString> {
        if party == self.sender {
            self.sender_output
        } else {
            self.receiver_output
        }
    }

    pub fn raw_key(&self, party: Party) -> BitString {
        if party == self.sender {
            self.run.key_a
        } else {
            self.run.key_b
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoRoundTranscript<P, K> {
    pub config: TwoRoundConfig,
    pub subs: [SubProtocol<P, K>; 2],
    pub extractor_seed: HashSeed,
    pub key_a: Option<BitString>,
    pub key_b: Option<BitString>,
}

pub type Sub<N> = SubProtocol<<N as Nike>::Params, <N as Nike>::PublicKey>;
pub type TwoRound<N> = TwoRoundTranscript<<N as Nike>::Params, <N as Nike>::PublicKey>;

fn run_sub<N: Nike, R: Rng + ?Sized>(
    scheme: &N,
    cfg: &TwoRoundConfig,
    sender: Party,
    adversary: Option<&dyn Adversary>,
    rng: &mut R,
) -> Result<Sub<N>> {
    let n = cfg.key_bits;
    let run = run_niqkd(scheme, n, adversary, rng)?;
    let seed = cfg.extractor()?.family().random_seed(rng);
    let sender_digest = DigestDescriptor::sample(cfg.digest, n, cfg.digest_bits, rng)?;
    let receiver_digest = DigestDescriptor::sample(cfg.digest, n, cfg.digest_bits, rng)?;
    let (ks, kr) = (run.key_a, run.key_b);
    let sender_value = sender_digest.digest(&ks)?;
    let receiver_value = receiver_digest.digest(&kr)?;
    let sender_output = (receiver_digest.digest(&ks)? == receiver_value).then_some(ks);
    let receiver_output = (sender_digest.digest(&kr)? == sender_value).then_some(kr);
    Ok(SubProtocol {
        sender,
        run,
        seed,
        sender_digest,
        sender_value,
        receiver_digest,
        receiver_value,
        sender_output,
        receiver_output,
    })
}

fn xor_seed(a: &HashSeed, b: &HashSeed) -> HashSeed {
    HashSeed { a: a.a ^ b.a, b: a.b ^ b.b }
}

/// Alice sends in sub-protocol 0 and Bob in sub-protocol 1; each party
/// extracts from its two sub-keys with the XOR of both seeds.
pub fn run_two_round<N: Nike, R: Rng + ?Sized>(
    scheme: &N,
    cfg: &TwoRoundConfig,
    adversary: Option<&dyn Adversary>,
    rng: &mut R,
) -> Result<TwoRound<N>> {
    cfg.validate()?;
    if cfg.key_bits != scheme.key_bits() {
        return Err(Error::LengthMismatch { expected: scheme.key_bits(), got: cfg.key_bits });
    }
    let pick = |j: usize| if cfg.attacked[j] { adversary } else { None };
    let s0 = run_sub(scheme, cfg, Party::Alice, pick(0), rng)?;
    let s1 = run_sub(scheme, cfg, Party::Bob, pick(1), rng)?;
    let spec = cfg.extractor()?;
    let extractor_seed = xor_seed(&s0.seed, &s1.seed);
    let finish = |party: Party| -> Result<Option<BitString>> {
        match (s0.output(party), s1.output(party)) {
            (Some(k0), Some(k1)) => Ok(Some(extract(&spec, &extractor_seed, &k0.concat(&k1)?)?)),
            _ => Ok(None),
        }
    };
    let key_a = finish(Party::Alice)?;
    let key_b = finish(Party::Bob)?;
    Ok(TwoRoundTranscript { config: *cfg, subs: [s0, s1], extractor_seed, key_a, key_b })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoRoundStats {
    pub trials: usize,
    /// `K*_A = K*_B ≠ ⊥`.
    pub success_rate: f64,
    pub success_stderr: f64,
    /// `K*_A ≠ K*_B`, with ⊥ a value of its own.
    pub disagree_rate: f64,
    pub disagree_stderr: f64,
    pub both_abort_rate: f64,
    /// Trials whose first sub-protocol produced different raw keys.
    pub raw_mismatches: usize,
    /// Of those, trials where both parties output ⊥.
    pub aborted_on_mismatch: usize,
}

/// Runs `trials` independent executions on per-trial substreams of `seed`.
pub fn two_round_stats<N: Nike>(
    scheme: &N,
    cfg: &TwoRoundConfig,
    adversary: Option<&dyn Adversary>,
    trials: usize,
    seed: u64,
) -> Result<TwoRoundStats> {
    if trials == 0 {
        return Err(Error::InvalidParameter("at least one trial is required".into()));
    }
    let outcomes: Vec<[bool; 5]> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let tr = run_two_round(scheme, cfg, adversary, &mut substream(seed, t))?;
            let raw0 = &tr.subs[0].run;
            let mismatch = raw0.key_a != raw0.key_b;
            let both_abort = tr.key_a.is_none() && tr.key_b.is_none();
            Ok([
                tr.key_a.is_some() && tr.key_a == tr.key_b,
                tr.key_a != tr.key_b,
                both_abort,
                mismatch,
                mismatch && both_abort,
            ])
        })
        .collect::<Result<_>>()?;
    let count = |i: usize| outcomes.iter().filter(|o| o[i]).count();
    let (success_rate, success_stderr) = binomial(count(0), trials);
    let (disagree_rate, disagree_stderr) = binomial(count(1), trials);
    Ok(TwoRoundStats {
        trials,
        success_rate,
        success_stderr,
        disagree_rate,
        disagree_stderr,
        both_abort_rate: count(2) as f64 / trials as f64,
        raw_mismatches: count(3),
        aborted_on_mismatch: count(4),
    })
}

/// Fraction of trials with `K*_A ≠ K*_B`.
pub fn verifiability_rate<N: Nike>(
    scheme: &N,
    cfg: &TwoRoundConfig,
    adversary: Option<&dyn Adversary>,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    Ok(two_round_stats(scheme, cfg, adversary, trials, seed)?.disagree_rate)
}
