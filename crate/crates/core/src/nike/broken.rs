use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Identity, Nike, NikeSample, PublicTuple, ZPublic, ZSample};
use crate::bits::{BasisString, BitString};
use crate::error::Result;

/// Correct but insecure: the shared key is printed in the public parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BrokenParams {
    pub key: BitString,
}

#[derive(Clone, Copy, Debug)]
pub struct BrokenNike {
    key_bits: usize,
}

impl BrokenNike {
    pub fn new(key_bits: usize) -> Self {
        Self { key_bits }
    }
}

impl Nike for BrokenNike {
    type Params = BrokenParams;
    type PublicKey = Identity;
    type SecretKey = Identity;

    fn name(&self) -> &'static str {
        "broken"
    }

    fn key_bits(&self) -> usize {
        self.key_bits
    }

    fn setup<R: Rng + ?Sized>(&self, rng: &mut R) -> BrokenParams {
        BrokenParams { key: BitString::random(self.key_bits, rng) }
    }

    fn keygen<R: Rng + ?Sized>(&self, _pp: &BrokenParams, id: &Identity, _rng: &mut R) -> (Identity, Identity) {
        (id.clone(), id.clone())
    }

    fn shared_key(
        &self,
        pp: &BrokenParams,
        id_a: &Identity,
        pk_a: &Identity,
        id_b: &Identity,
        sk_b: &Identity,
    ) -> Option<BitString> {
        (id_a != id_b && pk_a == id_a && sk_b == id_b).then_some(pp.key)
    }

    fn efficient_leak(&self, p: &ZPublic<Self>) -> Option<BasisString> {
        Some(p.pp.key)
    }

    fn unbounded_recover(&self, p: &ZPublic<Self>) -> Result<Option<BasisString>> {
        Ok(Some(p.pp.key))
    }

    fn enumerate_z(&self) -> Option<Vec<(f64, NikeSample<Self>)>> {
        if self.key_bits > 12 {
            return None;
        }
        let w = 1.0 / (1u64 << self.key_bits) as f64;
        Some(
            BasisString::all(self.key_bits)
                .map(|theta| {
                    let p = PublicTuple { pp: BrokenParams { key: theta }, pk_a: Identity::alice(), pk_b: Identity::bob() };
                    (w, ZSample { p, theta })
                })
                .collect(),
        )
    }
}
