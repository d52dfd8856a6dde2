//! The one-round protocol: EPR pairs measured in a NIKE-derived basis.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use super::adversary::{guess_basis, Adversary, EveGuess, MAX_ATTACK_KEY_BITS};
use crate::bits::{BasisString, BitString};
use crate::error::{Error, Result};
use crate::nike::{Identity, Nike, PublicTuple};
use crate::quantum::{epr_pairs, measure_theta_basis_pure, DensityOperator, PureState};

/// Largest key length on the adversary-free path.
pub const MAX_HONEST_KEY_BITS: usize = 128;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NiqkdTranscript<P, K> {
    pub public: PublicTuple<P, K>,
    pub theta_a: BasisString,
    pub theta_b: BasisString,
    pub key_a: BitString,
    pub key_b: BitString,
    /// Eve's retained register after both measurements.
    pub eve_state: Option<DensityOperator>,
    pub eve_guess: Option<EveGuess>,
}

pub type Transcript<N> = NiqkdTranscript<<N as Nike>::Params, <N as Nike>::PublicKey>;

/// Samples both outcomes for EPR pairs measured pair by pair; equal bases
/// give equal uniform bits, different bases independent uniform bits.
fn measure_pairs<R: Rng + ?Sized>(theta_a: &BasisString, theta_b: &BasisString, rng: &mut R) -> (BitString, BitString) {
    let n = theta_a.len();
    let mut a = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n);
    for i in 0..n {
        let x: bool = rng.random();
        a.push(x);
        b.push(if theta_a.bit(i) == theta_b.bit(i) { x } else { rng.random() });
    }
    (BitString::from_bits(&a), BitString::from_bits(&b))
}

fn reduce_to_memory(post: &PureState, n: usize, e: usize) -> Result<Option<DensityOperator>> {
    if e == 0 {
        return Ok(None);
    }
    let keep: Vec<usize> = (2 * n..2 * n + e).collect();
    Ok(Some(post.reduced(&keep)?))
}

/// One execution. The adversary sees the classical messages, which it may
/// store but never alter, and acts on the transit qubits.
pub fn run_niqkd<N: Nike, R: Rng + ?Sized>(
    scheme: &N,
    n: usize,
    adversary: Option<&dyn Adversary>,
    rng: &mut R,
) -> Result<Transcript<N>> {
    if n != scheme.key_bits() {
        return Err(Error::LengthMismatch { expected: scheme.key_bits(), got: n });
    }
    let (ia, ib) = (Identity::alice(), Identity::bob());
    let pp = scheme.setup(rng);
    let (sk_a, pk_a) = scheme.keygen(&pp, &ia, rng);
    let (sk_b, pk_b) = scheme.keygen(&pp, &ib, rng);
    let theta_a = scheme.shared_key(&pp, &ib, &pk_b, &ia, &sk_a).ok_or(Error::NikeAbort)?;
    let theta_b = scheme.shared_key(&pp, &ia, &pk_a, &ib, &sk_b).ok_or(Error::NikeAbort)?;
    let public = PublicTuple { pp, pk_a, pk_b };
    let Some(adv) = adversary else {
        if n > MAX_HONEST_KEY_BITS {
            return Err(Error::SizeCap(format!("key length {n} exceeds {MAX_HONEST_KEY_BITS}")));
        }
        let (key_a, key_b) = measure_pairs(&theta_a, &theta_b, rng);
        return Ok(NiqkdTranscript { public, theta_a, theta_b, key_a, key_b, eve_state: None, eve_guess: None });
    };
    if n > MAX_ATTACK_KEY_BITS {
        return Err(Error::SizeCap(format!("attack simulation limited to n ≤ {MAX_ATTACK_KEY_BITS}")));
    }
    let state = adv.intercept(&epr_pairs(n)?, n)?;
    let (key_a, after_a) = measure_theta_basis_pure(&state, 0, &theta_a, rng)?;
    let (key_b, post) = measure_theta_basis_pure(&after_a, n, &theta_b, rng)?;
    let eve_state = reduce_to_memory(&post, n, adv.memory_qubits(n))?;
    let basis = match scheme.unbounded_recover(&public)? {
        Some(theta) => theta,
        None => guess_basis(n, rng),
    };
    let mut eve_rng = ChaCha20Rng::seed_from_u64(rng.random());
    let eve_guess = adv.decode(&post, n, &basis, &mut eve_rng)?;
    Ok(NiqkdTranscript { public, theta_a, theta_b, key_a, key_b, eve_state, eve_guess })
}
