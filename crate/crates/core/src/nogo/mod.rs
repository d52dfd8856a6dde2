//! Key recovery against one-round protocols whose keys are a function of
//! the parties' classical randomness.

mod attack;
mod protocol;

pub use attack::{
    attack_success_rate, attack_trial, eve_offline, eve_online, first_gamma_b, nogo_bound, sample_gamma_a,
    AttackConfig, AttackState, AttackTrial, NogoReport, OfflineGuess, SamplingMethod, DEFAULT_CANDIDATE_CAP,
    MAX_ENUMERATION_BITS,
};
pub use protocol::{
    run_toy_protocol, ClassicalKeyProtocol, KeyFunction, KeyFunctionKind, PartySample, Payload, QubitState, ToyRun,
    CERTAIN_OUTCOME, MAX_RANDOMNESS_BITS, MAX_TABLE_BITS,
};
