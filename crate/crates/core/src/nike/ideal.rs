use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Identity, Nike, NikeSample, PublicTuple, ZPublic, ZSample};
use crate::bits::{BasisString, BitString};
use crate::error::Result;

/// Opaque handle into the trusted sampler's table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IdealParams {
    pub handle: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdealKey {
    pub handle: u64,
    pub id: Identity,
}

/// A trusted sampler stores a fresh uniform key per setup in a private table;
/// public values carry only the handle.
#[derive(Clone, Debug)]
pub struct IdealNike {
    key_bits: usize,
    table: Arc<RwLock<HashMap<u64, BitString>>>,
}

impl IdealNike {
    pub fn new(key_bits: usize) -> Self {
        Self { key_bits, table: Arc::default() }
    }

    pub fn table_len(&self) -> usize {
        self.table.read().expect("table lock").len()
    }
}

impl Nike for IdealNike {
    type Params = IdealParams;
    type PublicKey = IdealKey;
    type SecretKey = IdealKey;

    fn name(&self) -> &'static str {
        "ideal"
    }

    fn key_bits(&self) -> usize {
        self.key_bits
    }

    fn setup<R: Rng + ?Sized>(&self, rng: &mut R) -> IdealParams {
        let mut table = self.table.write().expect("table lock");
        loop {
            let handle = rng.random::<u64>();
            let key = BitString::random(self.key_bits, rng);
            // A repeated draw of both values is a replay of the same seed
            // and reuses the entry, which keeps seeded runs reproducible.
            match table.entry(handle) {
                std::collections::hash_map::Entry::Vacant(slot) => {
                    slot.insert(key);
                    return IdealParams { handle };
                }
                std::collections::hash_map::Entry::Occupied(slot) if *slot.get() == key => {
                    return IdealParams { handle };
                }
                std::collections::hash_map::Entry::Occupied(_) => {}
            }
        }
    }

    fn keygen<R: Rng + ?Sized>(&self, pp: &IdealParams, id: &Identity, _rng: &mut R) -> (IdealKey, IdealKey) {
        let key = IdealKey { handle: pp.handle, id: id.clone() };
        (key.clone(), key)
    }

    fn shared_key(
        &self,
        pp: &IdealParams,
        id_a: &Identity,
        pk_a: &IdealKey,
        id_b: &Identity,
        sk_b: &IdealKey,
    ) -> Option<BitString> {
        let (lo, hi) = if id_a <= id_b { (id_a, id_b) } else { (id_b, id_a) };
        if lo == hi || pk_a.id != *id_a || sk_b.id != *id_b {
            return None;
        }
        if pk_a.handle != pp.handle || sk_b.handle != pp.handle {
            return None;
        }
        self.table.read().expect("table lock").get(&pp.handle).copied()
    }

    fn unbounded_recover(&self, _p: &ZPublic<Self>) -> Result<Option<BasisString>> {
        Ok(None)
    }

    /// The public tuple is independent of θ; one canonical handle stands
    /// for all of them.
    fn enumerate_z(&self) -> Option<Vec<(f64, NikeSample<Self>)>> {
        if self.key_bits > 12 {
            return None;
        }
        let pp = IdealParams { handle: 0 };
        let p = PublicTuple {
            pp,
            pk_a: IdealKey { handle: 0, id: Identity::alice() },
            pk_b: IdealKey { handle: 0, id: Identity::bob() },
        };
        let w = 1.0 / (1u64 << self.key_bits) as f64;
        Some(BasisString::all(self.key_bits).map(|theta| (w, ZSample { p: p.clone(), theta })).collect())
    }
}
