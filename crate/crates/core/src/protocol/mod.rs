//! QKD protocols built on a NIKE and EPR pairs, with adversary experiments.

mod adversary;
mod everlasting;
mod niqkd;
mod two_round;
mod weak;

pub use adversary::{
    Adversary, AdversaryKind, ClassicalClone, EveGuess, IdentityAdversary, PartialClone, SwapEpr,
    MAX_ATTACK_KEY_BITS,
};
pub use everlasting::*;
pub use niqkd::{run_niqkd, NiqkdTranscript, Transcript, MAX_HONEST_KEY_BITS};
pub use two_round::*;
pub use weak::*;
