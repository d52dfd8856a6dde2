//! The affine family `h_{a,b}(x) = msb_ℓ(a·x ⊕ b)` over GF(2^n).

use num_rational::Ratio;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::gf2n::Gf2n;
use crate::bits::BitString;
use crate::error::{Error, Result};

/// Largest input width for exhaustive seed enumeration.
pub const MAX_EXHAUSTIVE_BITS: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HashSeed {
    pub a: u128,
    pub b: u128,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct UniversalHashFamily {
    field: Gf2n,
    output_bits: usize,
}

impl UniversalHashFamily {
    pub fn new(input_bits: usize, output_bits: usize) -> Result<Self> {
        let field = Gf2n::new(input_bits)?;
        if output_bits > input_bits {
            return Err(Error::InvalidParameter(format!(
                "output length {output_bits} exceeds input length {input_bits}"
            )));
        }
        Ok(Self { field, output_bits })
    }

    pub fn input_bits(&self) -> usize {
        self.field.bits()
    }

    pub fn output_bits(&self) -> usize {
        self.output_bits
    }

    pub fn field(&self) -> &Gf2n {
        &self.field
    }

    pub fn seed_bits(&self) -> usize {
        2 * self.input_bits()
    }

    pub fn check_seed(&self, seed: &HashSeed) -> Result<()> {
        if !self.field.contains(seed.a) || !self.field.contains(seed.b) {
            return Err(Error::InvalidParameter("seed is not a pair of field elements".into()));
        }
        Ok(())
    }

    pub fn random_seed<R: Rng + ?Sized>(&self, rng: &mut R) -> HashSeed {
        let m = self.field.mask();
        HashSeed { a: rng.random::<u128>() & m, b: rng.random::<u128>() & m }
    }

    /// Keeps the top `ℓ` bits of an n-bit field element.
    fn truncate(&self, v: u128) -> u128 {
        if self.output_bits == 0 {
            0
        } else {
            v >> (self.input_bits() - self.output_bits)
        }
    }

    pub fn eval_raw(&self, seed: &HashSeed, x: u128) -> u128 {
        self.truncate(self.field.mul(seed.a, x) ^ seed.b)
    }

    pub fn eval(&self, seed: &HashSeed, x: &BitString) -> Result<BitString> {
        if x.len() != self.input_bits() {
            return Err(Error::LengthMismatch { expected: self.input_bits(), got: x.len() });
        }
        self.check_seed(seed)?;
        Ok(BitString::from_value(self.output_bits, self.eval_raw(seed, x.value())))
    }

    /// Every seed, `a` major; only for `n ≤ 12`.
    pub fn seeds(&self) -> Result<impl Iterator<Item = HashSeed>> {
        let n = self.input_bits();
        if n > MAX_EXHAUSTIVE_BITS {
            return Err(Error::SizeCap(format!("{n}-bit family is too large to enumerate")));
        }
        let size = 1u128 << n;
        Ok((0..size).flat_map(move |a| (0..size).map(move |b| HashSeed { a, b })))
    }
}

/// `Pr_{a,b}[h_{a,b}(x) = h_{a,b}(y)]` counted over all `2^{2n}` seeds.
///
/// A collision does not depend on `b`, so the count is taken over `a` and
/// scaled by the number of `b` values.
pub fn uh_collision_probability(n: usize, l: usize, x: &BitString, y: &BitString) -> Result<Ratio<u64>> {
    let family = UniversalHashFamily::new(n, l)?;
    if n > MAX_EXHAUSTIVE_BITS {
        return Err(Error::SizeCap(format!("{n}-bit family is too large to enumerate")));
    }
    if x.len() != n || y.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: if x.len() != n { x.len() } else { y.len() } });
    }
    if x == y {
        return Err(Error::InvalidParameter("collision probability needs x ≠ y".into()));
    }
    let size = 1u64 << n;
    let colliding_a = (0..size as u128)
        .filter(|&a| {
            let s = HashSeed { a, b: 0 };
            family.eval_raw(&s, x.value()) == family.eval_raw(&s, y.value())
        })
        .count() as u64;
    Ok(Ratio::new(colliding_a * size, size * size))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_and_identity_seeds() {
        let f = UniversalHashFamily::new(5, 5).unwrap();
        for x in BitString::all(5) {
            assert_eq!(f.eval(&HashSeed { a: 1, b: 0 }, &x).unwrap(), x);
        }
        let g = UniversalHashFamily::new(5, 2).unwrap();
        for x in BitString::all(5) {
            assert_eq!(g.eval(&HashSeed { a: 0, b: 0b10110 }, &x).unwrap().value(), 0b10);
        }
    }

    #[test]
    fn zero_output_bits() {
        let f = UniversalHashFamily::new(4, 0).unwrap();
        let out = f.eval(&HashSeed { a: 3, b: 9 }, &BitString::from_value(4, 7)).unwrap();
        assert!(out.is_empty());
    }
}
