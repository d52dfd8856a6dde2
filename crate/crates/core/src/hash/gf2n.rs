//! Arithmetic in GF(2^n), n ≤ 128, in the polynomial basis.
//!
//! Field elements are `u128` values whose bit `i` is the coefficient of
//! `x^i`. Each `n` uses the numerically smallest irreducible polynomial
//! `x^n + r(x)`; [`REDUCTION_LOW`] lists `r` for `n = 1..=128`.

use crate::error::{Error, Result};

pub const MAX_FIELD_BITS: usize = 128;

/// Low-order terms of the reduction polynomial for `n = index + 1`.
pub const REDUCTION_LOW: [u128; MAX_FIELD_BITS] = [
    0x0,
    0x3,
    0x3,
    0x3,
    0x5,
    0x3,
    0x3,
    0x1b,
    0x3,
    0x9,
    0x5,
    0x9,
    0x1b,
    0x21,
    0x3,
    0x2b,
    0x9,
    0x9,
    0x27,
    0x9,
    0x5,
    0x3,
    0x21,
    0x1b,
    0x9,
    0x1b,
    0x27,
    0x3,
    0x5,
    0x3,
    0x9,
    0x8d,
    0x4b,
    0x1b,
    0x5,
    0x35,
    0x3f,
    0x63,
    0x11,
    0x39,
    0x9,
    0x27,
    0x59,
    0x21,
    0x1b,
    0x3,
    0x21,
    0x2d,
    0x71,
    0x1d,
    0x4b,
    0x9,
    0x47,
    0x7d,
    0x47,
    0x95,
    0x11,
    0x63,
    0x7b,
    0x3,
    0x27,
    0x69,
    0x3,
    0x1b,
    0x1b,
    0x9,
    0x27,
    0xa3,
    0x65,
    0x2b,
    0x2b,
    0x5f,
    0x1d,
    0x47,
    0x4b,
    0x35,
    0x65,
    0x5f,
    0x1d,
    0xaf,
    0x11,
    0xd7,
    0x95,
    0x21,
    0x107,
    0x65,
    0xa3,
    0x3f,
    0x69,
    0x2d,
    0xed,
    0x65,
    0x5,
    0x63,
    0x77,
    0x6f,
    0x41,
    0x99,
    0x4b,
    0x65,
    0xc3,
    0x69,
    0xbd,
    0x1b,
    0x11,
    0x63,
    0xaf,
    0x53,
    0x35,
    0x53,
    0x95,
    0x39,
    0x2d,
    0x2d,
    0xaf,
    0x17,
    0x27,
    0x65,
    0x101,
    0x1b,
    0x123,
    0x47,
    0x5,
    0x7d,
    0xaf,
    0x95,
    0x3,
    0x87,
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Gf2n {
    n: usize,
    low: u128,
}

impl Gf2n {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_FIELD_BITS {
            return Err(Error::InvalidParameter(format!("field size {n} not in 1..=128")));
        }
        Ok(Self { n, low: REDUCTION_LOW[n - 1] })
    }

    pub fn bits(&self) -> usize {
        self.n
    }

    pub fn mask(&self) -> u128 {
        if self.n == 128 {
            u128::MAX
        } else {
            (1u128 << self.n) - 1
        }
    }

    /// `x^n + r(x)` with bit `n` set; `None` for `n = 128`.
    pub fn modulus(&self) -> Option<u128> {
        (self.n < 128).then(|| (1u128 << self.n) | self.low)
    }

    pub fn reduction_low(&self) -> u128 {
        self.low
    }

    pub fn contains(&self, a: u128) -> bool {
        a & !self.mask() == 0
    }

    /// Carry-less product reduced modulo the field polynomial.
    pub fn mul(&self, mut a: u128, mut b: u128) -> u128 {
        let top = 1u128 << (self.n - 1);
        let mask = self.mask();
        let mut acc = 0u128;
        while b != 0 {
            if b & 1 == 1 {
                acc ^= a;
            }
            b >>= 1;
            let carry = a & top != 0;
            a = (a << 1) & mask;
            if carry {
                a ^= self.low;
            }
        }
        acc
    }

    pub fn pow(&self, mut a: u128, mut e: u128) -> u128 {
        let mut acc = 1u128;
        while e != 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        acc
    }
}
