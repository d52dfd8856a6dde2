//! Fixed-length bit strings.
//!
//! Position 0 is the leftmost bit and corresponds to qubit 0, which is the most
//! significant bit of a computational-basis index. Strings hold at most 128 bits.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub const MAX_BITS: usize = 128;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct BitString {
    len: usize,
    value: u128,
}

/// Per-qubit basis choice: bit 0 selects the computational basis, bit 1 the
/// Hadamard basis.
pub type BasisString = BitString;

fn mask(len: usize) -> u128 {
    if len >= 128 {
        u128::MAX
    } else {
        (1u128 << len) - 1
    }
}

impl BitString {
    pub fn new(len: usize, value: u128) -> Result<Self> {
        if len > MAX_BITS {
            return Err(Error::InvalidParameter(format!(
                "bit string of length {len} exceeds {MAX_BITS}"
            )));
        }
        if value & !mask(len) != 0 {
            return Err(Error::InvalidParameter(format!(
                "value {value:#x} does not fit in {len} bits"
            )));
        }
        Ok(Self { len, value })
    }

    /// Builds from the low `len` bits of `value`, discarding the rest.
    pub fn from_value(len: usize, value: u128) -> Self {
        assert!(len <= MAX_BITS);
        Self { len, value: value & mask(len) }
    }

    pub fn zeros(len: usize) -> Self {
        Self::from_value(len, 0)
    }

    pub fn empty() -> Self {
        Self::zeros(0)
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        assert!(bits.len() <= MAX_BITS);
        let value = bits.iter().fold(0u128, |acc, &b| (acc << 1) | b as u128);
        Self { len: bits.len(), value }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::InvalidParameter(format!("`{s}` is not a bit string"))),
            })
            .collect::<Result<Vec<_>>>()?;
        if bits.len() > MAX_BITS {
            return Err(Error::InvalidParameter(format!("`{s}` is too long")));
        }
        Ok(Self::from_bits(&bits))
    }

    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        Self::from_value(len, rng.random::<u128>())
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn value(&self) -> u128 {
        self.value
    }

    /// Value as a `usize` index; panics if it does not fit.
    pub fn index(&self) -> usize {
        usize::try_from(self.value).expect("bit string too long for an index")
    }

    pub fn bit(&self, i: usize) -> bool {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        (self.value >> (self.len - 1 - i)) & 1 == 1
    }

    pub fn bits(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.bit(i))
    }

    pub fn weight(&self) -> u32 {
        self.value.count_ones()
    }

    pub fn concat(&self, other: &BitString) -> Result<BitString> {
        let len = self.len + other.len;
        if len > MAX_BITS {
            return Err(Error::InvalidParameter(format!(
                "concatenation of length {len} exceeds {MAX_BITS}"
            )));
        }
        let high = if other.len >= 128 { 0 } else { self.value << other.len };
        Ok(BitString { len, value: high | other.value })
    }

    pub fn xor(&self, other: &BitString) -> Result<BitString> {
        if self.len != other.len {
            return Err(Error::LengthMismatch { expected: self.len, got: other.len });
        }
        Ok(BitString { len: self.len, value: self.value ^ other.value })
    }

    /// The leftmost `k` bits.
    pub fn prefix(&self, k: usize) -> BitString {
        assert!(k <= self.len);
        if k == 0 {
            return BitString::empty();
        }
        BitString { len: k, value: self.value >> (self.len - k) }
    }

    /// Bits `[start, start + k)`.
    pub fn slice(&self, start: usize, k: usize) -> BitString {
        assert!(start + k <= self.len);
        let shifted = if self.len - start - k >= 128 { 0 } else { self.value >> (self.len - start - k) };
        BitString::from_value(k, shifted)
    }

    /// All strings of length `len` in lexicographic order.
    pub fn all(len: usize) -> impl Iterator<Item = BitString> {
        assert!(len < 32, "refusing to enumerate 2^{len} strings");
        (0..(1u128 << len)).map(move |v| BitString { len, value: v })
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.bits() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString(\"{self}\")")
    }
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        BitString::parse(&s).map_err(serde::de::Error::custom)
    }
}
