//! Digest interfaces used to compare keys.

use sha2::{Digest, Sha256};
use serde::{Deserialize, Serialize};

use super::universal::{HashSeed, UniversalHashFamily};
use crate::bits::{BitString, MAX_BITS};
use crate::error::{Error, Result};

/// A keyed digest with fixed output length.
pub trait KeyDigest: Send + Sync {
    fn output_bits(&self) -> usize;
    fn digest(&self, x: &BitString) -> Result<BitString>;
    fn describe(&self) -> String;
}

/// SHA-256 of `key ∥ bit-length ∥ packed bits`, truncated to `m` bits.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrHash {
    key: Vec<u8>,
    output_bits: usize,
}

impl CrHash {
    pub fn new(key: Vec<u8>, output_bits: usize) -> Result<Self> {
        if output_bits > MAX_BITS.min(256) {
            return Err(Error::InvalidParameter(format!("digest length {output_bits} exceeds {MAX_BITS}")));
        }
        Ok(Self { key, output_bits })
    }

    pub fn key(&self) -> &[u8] {
        &self.key
    }

    pub fn eval(&self, x: &BitString) -> BitString {
        let mut h = Sha256::new();
        h.update(&self.key);
        h.update((x.len() as u64).to_be_bytes());
        h.update(x.value().to_be_bytes());
        let out = h.finalize();
        let mut top = [0u8; 16];
        top.copy_from_slice(&out[..16]);
        let v = u128::from_be_bytes(top);
        let m = self.output_bits;
        BitString::from_value(m, if m == 0 { 0 } else { v >> (128 - m) })
    }
}

impl KeyDigest for CrHash {
    fn output_bits(&self) -> usize {
        self.output_bits
    }

    fn digest(&self, x: &BitString) -> Result<BitString> {
        Ok(self.eval(x))
    }

    fn describe(&self) -> String {
        format!("sha256-truncated-{}", self.output_bits)
    }
}

/// A member of the affine universal family, usable where an enumerable
/// digest family is needed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct UniversalDigest {
    pub family: UniversalHashFamily,
    pub seed: HashSeed,
}

impl KeyDigest for UniversalDigest {
    fn output_bits(&self) -> usize {
        self.family.output_bits()
    }

    fn digest(&self, x: &BitString) -> Result<BitString> {
        self.family.eval(&self.seed, x)
    }

    fn describe(&self) -> String {
        format!("gf2-affine-{}-{}", self.family.input_bits(), self.family.output_bits())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_separates_outputs() {
        let x = BitString::from_value(64, 0xdead_beef);
        let a = CrHash::new(b"a".to_vec(), 32).unwrap();
        let b = CrHash::new(b"b".to_vec(), 32).unwrap();
        assert_ne!(a.eval(&x), b.eval(&x));
    }

    #[test]
    fn length_prefix_separates_zero_padding() {
        let h = CrHash::new(vec![], 64).unwrap();
        assert_ne!(h.eval(&BitString::zeros(3)), h.eval(&BitString::zeros(4)));
    }
}
