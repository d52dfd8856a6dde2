//! A toy one-round protocol whose key is a function of both parties'
//! classical randomness, with unentangled single-qubit payloads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::hash::{HashSeed, UniversalHashFamily};
use crate::quantum::{sample_index, C64};

/// Largest randomness length; `r_A ∥ r_B` must fit one field element.
pub const MAX_RANDOMNESS_BITS: usize = 64;

/// Largest randomness length for an explicit key table.
pub const MAX_TABLE_BITS: usize = 12;

/// A measurement outcome this likely is treated as certain.
pub const CERTAIN_OUTCOME: f64 = 1.0 - 1e-12;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KeyFunction {
    Constant { value: u128 },
    /// Leading `m` bits of `r_A ⊕ r_B`.
    XorPrefix,
    /// Bit `i` is the parity of `rows[i] & (r_A ⊕ r_B)`.
    Linear { rows: Vec<u128> },
    /// One uniform `m`-bit entry per pair, indexed `(r_A << r) | r_B`.
    Table { entries: Vec<u8> },
    /// `msb_m(a · (r_A ∥ r_B) ⊕ b)` over GF(2^{2r}).
    Universal { seed: HashSeed },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KeyFunctionKind {
    Constant,
    XorPrefix,
    Linear,
    Table,
    Universal,
}

impl KeyFunctionKind {
    pub const ALL: [KeyFunctionKind; 5] = [Self::Constant, Self::XorPrefix, Self::Linear, Self::Table, Self::Universal];

    pub fn label(&self) -> &'static str {
        match self {
            Self::Constant => "constant",
            Self::XorPrefix => "xor-prefix",
            Self::Linear => "linear",
            Self::Table => "table",
            Self::Universal => "universal",
        }
    }
}

impl std::str::FromStr for KeyFunctionKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.label() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown key function {s:?}")))
    }
}

fn rank(rows: &[u128]) -> usize {
    let mut basis: Vec<u128> = Vec::new();
    for &row in rows {
        let mut v = row;
        for &b in &basis {
            v = v.min(v ^ b);
        }
        if v != 0 {
            basis.push(v);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    basis.len()
}

fn mask(bits: usize) -> u128 {
    if bits == 128 {
        u128::MAX
    } else {
        (1u128 << bits) - 1
    }
}

/// One qubit of a payload.
pub type QubitState = [C64; 2];

/// Product-state register sent alongside the classical message.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Payload {
    pub qubits: Vec<QubitState>,
}

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

fn encode_qubit(bit: bool, hadamard: bool) -> QubitState {
    let z = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let h = C64::new(FRAC_1_SQRT_2, 0.0);
    match (hadamard, bit) {
        (false, false) => [one, z],
        (false, true) => [z, one],
        (true, false) => [h, h],
        (true, true) => [h, -h],
    }
}

impl Payload {
    /// Projective measurement of qubit `i`; a certain outcome leaves the
    /// qubit untouched, otherwise it collapses.
    fn measure_qubit<R: Rng + ?Sized>(&mut self, i: usize, hadamard: bool, rng: &mut R) -> bool {
        let [a, b] = self.qubits[i];
        let (p0, p1) = if hadamard {
            let s = FRAC_1_SQRT_2;
            (((a + b) * s).norm_sqr(), ((a - b) * s).norm_sqr())
        } else {
            (a.norm_sqr(), b.norm_sqr())
        };
        if p0 >= CERTAIN_OUTCOME {
            return false;
        }
        if p1 >= CERTAIN_OUTCOME {
            return true;
        }
        let bit = sample_index(&[p0, p1], rng) == 1;
        self.qubits[i] = encode_qubit(bit, hadamard);
        bit
    }
}

/// Key derived from `R_A` and `R_B`; `S` is the leading `public_bits` of `R`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassicalKeyProtocol {
    pub randomness_bits: usize,
    pub public_bits: usize,
    pub key_bits: usize,
    pub function: KeyFunction,
}

/// One party's classical sample and payload.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartySample {
    pub randomness: u128,
    pub public: u128,
    pub payload: Payload,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ToyRun {
    pub alice: PartySample,
    pub bob: PartySample,
    pub key_a: BitString,
    pub key_b: BitString,
}

impl ClassicalKeyProtocol {
    /// Builds `f` from `kind`; randomized families draw from `function_seed`.
    pub fn new(kind: KeyFunctionKind, r: usize, m: usize, function_seed: u64) -> Result<Self> {
        if r == 0 || r > MAX_RANDOMNESS_BITS {
            return Err(Error::InvalidParameter(format!("randomness length {r} not in 1..={MAX_RANDOMNESS_BITS}")));
        }
        if m == 0 || m > r {
            return Err(Error::InvalidParameter(format!("key length {m} not in 1..={r}")));
        }
        let mut rng = ChaCha20Rng::seed_from_u64(function_seed);
        let function = match kind {
            KeyFunctionKind::Constant => KeyFunction::Constant { value: rng.random::<u128>() & mask(m) },
            KeyFunctionKind::XorPrefix => KeyFunction::XorPrefix,
            KeyFunctionKind::Linear => loop {
                let rows: Vec<u128> = (0..m).map(|_| rng.random::<u128>() & mask(r)).collect();
                if rank(&rows) == m {
                    break KeyFunction::Linear { rows };
                }
            },
            KeyFunctionKind::Table => {
                if r > MAX_TABLE_BITS || m > 8 {
                    return Err(Error::SizeCap(format!("tables need r ≤ {MAX_TABLE_BITS} and m ≤ 8")));
                }
                let entries = (0..1usize << (2 * r)).map(|_| (rng.random::<u8>() as u128 & mask(m)) as u8).collect();
                KeyFunction::Table { entries }
            }
            KeyFunctionKind::Universal => {
                KeyFunction::Universal { seed: UniversalHashFamily::new(2 * r, m)?.random_seed(&mut rng) }
            }
        };
        Ok(Self { randomness_bits: r, public_bits: r.min(8), key_bits: m, function })
    }

    pub fn kind(&self) -> KeyFunctionKind {
        match self.function {
            KeyFunction::Constant { .. } => KeyFunctionKind::Constant,
            KeyFunction::XorPrefix => KeyFunctionKind::XorPrefix,
            KeyFunction::Linear { .. } => KeyFunctionKind::Linear,
            KeyFunction::Table { .. } => KeyFunctionKind::Table,
            KeyFunction::Universal { .. } => KeyFunctionKind::Universal,
        }
    }

    /// `f(r_A, r_B)` as an `m`-bit value.
    pub fn key(&self, ra: u128, rb: u128) -> u128 {
        let (r, m) = (self.randomness_bits, self.key_bits);
        match &self.function {
            KeyFunction::Constant { value } => *value,
            KeyFunction::XorPrefix => (ra ^ rb) >> (r - m),
            KeyFunction::Linear { rows } => rows
                .iter()
                .fold(0u128, |acc, row| (acc << 1) | ((row & (ra ^ rb)).count_ones() & 1) as u128),
            KeyFunction::Table { entries } => entries[((ra << r) | rb) as usize] as u128,
            KeyFunction::Universal { seed } => {
                let family = UniversalHashFamily::new(2 * r, m).expect("validated at construction");
                family.eval_raw(seed, (ra << r) | rb)
            }
        }
    }

    pub fn key_string(&self, ra: u128, rb: u128) -> BitString {
        BitString::from_value(self.key_bits, self.key(ra, rb))
    }

    pub fn public_part(&self, randomness: u128) -> u128 {
        randomness >> (self.randomness_bits - self.public_bits)
    }

    /// Basis of payload qubit `i`: bit `i mod |S|` of the public part.
    fn hadamard(&self, public: u128, i: usize) -> bool {
        if self.public_bits == 0 {
            return false;
        }
        let j = i % self.public_bits;
        (public >> (self.public_bits - 1 - j)) & 1 == 1
    }

    /// Encodes the randomness, most significant bit first, in the bases fixed
    /// by the public part.
    pub fn payload(&self, randomness: u128) -> Payload {
        let r = self.randomness_bits;
        let public = self.public_part(randomness);
        Payload {
            qubits: (0..r).map(|i| encode_qubit((randomness >> (r - 1 - i)) & 1 == 1, self.hadamard(public, i))).collect(),
        }
    }

    pub fn sample_party<R: Rng + ?Sized>(&self, rng: &mut R) -> PartySample {
        let randomness = rng.random::<u128>() & mask(self.randomness_bits);
        PartySample { randomness, public: self.public_part(randomness), payload: self.payload(randomness) }
    }

    /// The receiver's measurement with local randomness `own` on the other
    /// party's payload; returns the key as `f(sender, own)` or `f(own, sender)`.
    pub fn measure<R: Rng + ?Sized>(
        &self,
        own: u128,
        own_is_alice: bool,
        other_public: u128,
        payload: &mut Payload,
        rng: &mut R,
    ) -> u128 {
        let r = self.randomness_bits;
        let decoded = (0..r).fold(0u128, |acc, i| {
            (acc << 1) | payload.measure_qubit(i, self.hadamard(other_public, i), rng) as u128
        });
        if own_is_alice {
            self.key(own, decoded)
        } else {
            self.key(decoded, own)
        }
    }
}

/// Honest execution: both parties sample, exchange and measure.
pub fn run_toy_protocol<R: Rng + ?Sized>(proto: &ClassicalKeyProtocol, rng: &mut R) -> ToyRun {
    let mut alice = proto.sample_party(rng);
    let mut bob = proto.sample_party(rng);
    let key_a = proto.measure(alice.randomness, true, bob.public, &mut bob.payload, rng);
    let key_b = proto.measure(bob.randomness, false, alice.public, &mut alice.payload, rng);
    let m = proto.key_bits;
    ToyRun { alice, bob, key_a: BitString::from_value(m, key_a), key_b: BitString::from_value(m, key_b) }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_over_gf2() {
        assert_eq!(rank(&[0b011, 0b101, 0b110]), 2);
        assert_eq!(rank(&[0b001, 0b010, 0b100]), 3);
        assert_eq!(rank(&[0, 0]), 0);
    }

    #[test]
    fn eigenstates_are_untouched_and_others_collapse() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let mut p = Payload { qubits: vec![encode_qubit(true, true), encode_qubit(false, true)] };
        let before = p.clone();
        assert!(p.measure_qubit(0, true, &mut rng));
        assert_eq!(p, before);
        let bit = p.measure_qubit(1, false, &mut rng);
        assert_eq!(p.qubits[1], encode_qubit(bit, false));
    }
}
