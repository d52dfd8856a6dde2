//! Non-interactive key exchange: interface and toy instantiations.
//!
//! The two protocol parties always use the identities `"A"` and `"B"`.

mod broken;
mod ideal;
mod toy_dh;

pub use broken::{BrokenNike, BrokenParams};
pub use ideal::{IdealKey, IdealNike, IdealParams};
pub use toy_dh::{discrete_log_bsgs, discrete_log_brute_force, mod_pow, ToyDhNike, ToyDhParams, DEFAULT_PRIME};

use std::fmt::Debug;

use rand::Rng;
use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::bits::{BasisString, BitString};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Identity(String);

impl Identity {
    pub fn new(label: &str) -> Result<Self> {
        if label.is_empty() || !label.is_ascii() {
            return Err(Error::InvalidParameter(format!("identity {label:?} must be non-empty ASCII")));
        }
        Ok(Self(label.to_string()))
    }

    pub fn alice() -> Self {
        Self("A".into())
    }

    pub fn bob() -> Self {
        Self("B".into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

/// Public part of one honest NIKE execution: `(pp, pk_A, pk_B)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PublicTuple<P, K> {
    pub pp: P,
    pub pk_a: K,
    pub pk_b: K,
}

pub type ZPublic<N> = PublicTuple<<N as Nike>::Params, <N as Nike>::PublicKey>;

/// `(p, θ)` with `θ = SdK(B, pk_B, A, sk_A)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZSample<P, K> {
    pub p: PublicTuple<P, K>,
    pub theta: BasisString,
}

pub type NikeSample<N> = ZSample<<N as Nike>::Params, <N as Nike>::PublicKey>;

pub trait Nike: Send + Sync {
    type Params: Clone + Debug + Serialize + DeserializeOwned + Send + Sync;
    type PublicKey: Clone + Debug + Serialize + DeserializeOwned + Send + Sync;
    type SecretKey: Clone + Debug + Send + Sync;

    fn name(&self) -> &'static str;

    /// Shared-key length `n`.
    fn key_bits(&self) -> usize;

    fn setup<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Params;

    fn keygen<R: Rng + ?Sized>(
        &self,
        pp: &Self::Params,
        id: &Identity,
        rng: &mut R,
    ) -> (Self::SecretKey, Self::PublicKey);

    /// Deterministic; `None` is the abort symbol, returned whenever the two
    /// identities coincide.
    fn shared_key(
        &self,
        pp: &Self::Params,
        id_a: &Identity,
        pk_a: &Self::PublicKey,
        id_b: &Identity,
        sk_b: &Self::SecretKey,
    ) -> Option<BitString>;

    /// What a polynomial-time observer can read off the public tuple.
    fn efficient_leak(&self, _p: &ZPublic<Self>) -> Option<BasisString> {
        None
    }

    /// What an unbounded observer can compute from the public tuple, if the
    /// tuple determines the key at all.
    fn unbounded_recover(&self, p: &ZPublic<Self>) -> Result<Option<BasisString>>;

    /// Exact support of the `(p, θ)` distribution, if small enough to list.
    fn enumerate_z(&self) -> Option<Vec<(f64, NikeSample<Self>)>> {
        None
    }
}

/// Runs setup, both key generations and Alice's derivation.
pub fn sample_z<N: Nike, R: Rng + ?Sized>(scheme: &N, rng: &mut R) -> Result<NikeSample<N>> {
    let pp = scheme.setup(rng);
    let (sk_a, pk_a) = scheme.keygen(&pp, &Identity::alice(), rng);
    let (_sk_b, pk_b) = scheme.keygen(&pp, &Identity::bob(), rng);
    let theta = scheme
        .shared_key(&pp, &Identity::bob(), &pk_b, &Identity::alice(), &sk_a)
        .ok_or(Error::NikeAbort)?;
    Ok(ZSample { p: PublicTuple { pp, pk_a, pk_b }, theta })
}

/// Fraction of runs in which both derivations agree and neither aborts.
pub fn nike_correctness_rate<N: Nike, R: Rng + ?Sized>(scheme: &N, trials: usize, rng: &mut R) -> f64 {
    let (a, b) = (Identity::alice(), Identity::bob());
    let ok = (0..trials)
        .filter(|_| {
            let pp = scheme.setup(rng);
            let (sk_a, pk_a) = scheme.keygen(&pp, &a, rng);
            let (sk_b, pk_b) = scheme.keygen(&pp, &b, rng);
            let ka = scheme.shared_key(&pp, &b, &pk_b, &a, &sk_a);
            let kb = scheme.shared_key(&pp, &a, &pk_a, &b, &sk_b);
            ka.is_some() && ka == kb
        })
        .count();
    ok as f64 / trials.max(1) as f64
}

/// Built-in scheme selector for configuration files and the CLI.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeKind {
    Ideal,
    ToyDh,
    Broken,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 3] = [Self::Ideal, Self::ToyDh, Self::Broken];

    pub fn label(&self) -> &'static str {
        match self {
            Self::Ideal => "ideal",
            Self::ToyDh => "toy-dh",
            Self::Broken => "broken",
        }
    }
}

impl std::str::FromStr for SchemeKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ideal" => Ok(Self::Ideal),
            "toy-dh" | "toydh" => Ok(Self::ToyDh),
            "broken" => Ok(Self::Broken),
            _ => Err(Error::InvalidParameter(format!("unknown scheme {s:?}"))),
        }
    }
}

/// Calls `$body` with `$s` bound to a freshly built scheme of kind `$kind`.
#[macro_export]
macro_rules! with_scheme {
    ($kind:expr, $n:expr, |$s:ident| $body:expr) => {{
        match $kind {
            $crate::nike::SchemeKind::Ideal => {
                let $s = $crate::nike::IdealNike::new($n);
                $body
            }
            $crate::nike::SchemeKind::ToyDh => {
                let $s = $crate::nike::ToyDhNike::new($n)?;
                $body
            }
            $crate::nike::SchemeKind::Broken => {
                let $s = $crate::nike::BrokenNike::new($n);
                $body
            }
        }
    }};
}
