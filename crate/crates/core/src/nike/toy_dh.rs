//! Diffie–Hellman over a small prime field, small enough that the discrete
//! logarithm can be found by exhaustive search.

use std::collections::HashMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Identity, Nike, ZPublic};
use crate::bits::{BasisString, BitString};
use crate::error::{Error, Result};
use crate::hash::{HashSeed, UniversalHashFamily};

/// Largest prime below 2^20.
pub const DEFAULT_PRIME: u64 = 1_048_573;
pub const MAX_PRIME: u64 = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToyDhParams {
    pub prime: u64,
    pub generator: u64,
    /// Public seed of the key-expansion hash.
    pub expansion: HashSeed,
}

#[derive(Clone, Copy, Debug)]
pub struct ToyDhNike {
    key_bits: usize,
    prime: u64,
    generator: u64,
    family: UniversalHashFamily,
}

pub fn mod_pow(mut base: u64, mut exp: u64, modulus: u64) -> u64 {
    let mut acc = 1 % modulus;
    base %= modulus;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % modulus;
        }
        base = base * base % modulus;
        exp >>= 1;
    }
    acc
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn smallest_primitive_root(p: u64) -> u64 {
    let factors = prime_factors(p - 1);
    (2..p)
        .find(|&g| factors.iter().all(|&q| mod_pow(g, (p - 1) / q, p) != 1))
        .unwrap_or(1)
}

/// Linear search for `x` with `g^x = target (mod p)`, `0 ≤ x < p − 1`.
pub fn discrete_log_brute_force(prime: u64, generator: u64, target: u64) -> Result<u64> {
    let mut acc = 1 % prime;
    for x in 0..prime.saturating_sub(1).max(1) {
        if acc == target % prime {
            return Ok(x);
        }
        acc = acc * generator % prime;
    }
    Err(Error::DiscreteLogNotFound { prime, generator, target })
}

/// Baby-step giant-step exhaustive search; same answer as the linear scan.
pub fn discrete_log_bsgs(prime: u64, generator: u64, target: u64) -> Result<u64> {
    let order = prime - 1;
    let m = (order as f64).sqrt().ceil() as u64 + 1;
    let mut baby = HashMap::with_capacity(m as usize);
    let mut acc = 1 % prime;
    for j in 0..m {
        baby.entry(acc).or_insert(j);
        acc = acc * generator % prime;
    }
    let factor = mod_pow(generator, order - (m % order), prime);
    let mut gamma = target % prime;
    for i in 0..=m {
        if let Some(&j) = baby.get(&gamma) {
            let x = (i * m + j) % order;
            if mod_pow(generator, x, prime) == target % prime {
                return Ok(x);
            }
        }
        gamma = gamma * factor % prime;
    }
    Err(Error::DiscreteLogNotFound { prime, generator, target })
}

impl ToyDhNike {
    pub fn new(key_bits: usize) -> Result<Self> {
        Self::with_prime(key_bits, DEFAULT_PRIME)
    }

    pub fn with_prime(key_bits: usize, prime: u64) -> Result<Self> {
        if !is_prime(prime) || !(3..=MAX_PRIME).contains(&prime) {
            return Err(Error::InvalidParameter(format!("{prime} is not a prime in 3..=2^20")));
        }
        let width = 64 - prime.leading_zeros() as usize;
        let family = UniversalHashFamily::new(width, key_bits)?;
        Ok(Self { key_bits, prime, generator: smallest_primitive_root(prime), family })
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn generator(&self) -> u64 {
        self.generator
    }

    fn expand(&self, pp: &ToyDhParams, secret: u64) -> BitString {
        BitString::from_value(self.key_bits, self.family.eval_raw(&pp.expansion, secret as u128))
    }

    /// The unbounded phase: recover Alice's exponent and rederive the key.
    pub fn break_toy_dh(&self, p: &ZPublic<Self>) -> Result<BasisString> {
        if p.pp.prime > MAX_PRIME {
            return Err(Error::InvalidParameter(format!("prime {} too large to break", p.pp.prime)));
        }
        let x = discrete_log_bsgs(p.pp.prime, p.pp.generator, p.pk_a)?;
        Ok(self.expand(&p.pp, mod_pow(p.pk_b, x, p.pp.prime)))
    }
}

impl Nike for ToyDhNike {
    type Params = ToyDhParams;
    type PublicKey = u64;
    type SecretKey = u64;

    fn name(&self) -> &'static str {
        "toy-dh"
    }

    fn key_bits(&self) -> usize {
        self.key_bits
    }

    fn setup<R: Rng + ?Sized>(&self, rng: &mut R) -> ToyDhParams {
        ToyDhParams { prime: self.prime, generator: self.generator, expansion: self.family.random_seed(rng) }
    }

    fn keygen<R: Rng + ?Sized>(&self, pp: &ToyDhParams, _id: &Identity, rng: &mut R) -> (u64, u64) {
        let sk = rng.random_range(1..pp.prime - 1);
        (sk, mod_pow(pp.generator, sk, pp.prime))
    }

    fn shared_key(
        &self,
        pp: &ToyDhParams,
        id_a: &Identity,
        pk_a: &u64,
        id_b: &Identity,
        sk_b: &u64,
    ) -> Option<BitString> {
        if id_a == id_b || *pk_a == 0 || *pk_a >= pp.prime {
            return None;
        }
        Some(self.expand(pp, mod_pow(*pk_a, *sk_b, pp.prime)))
    }

    fn unbounded_recover(&self, p: &ZPublic<Self>) -> Result<Option<BasisString>> {
        self.break_toy_dh(p).map(Some)
    }
}
