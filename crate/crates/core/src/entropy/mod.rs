//! Conditional min-entropy of classical-quantum states.

mod chain;
mod ensemble;
mod sdp;

pub use chain::{chain_rule_check, ChainRuleReport, ChainRuleVerdict};
pub use ensemble::{CqEnsemble, CqEntry, Povm};
pub use sdp::{
    guess_weighted, helstrom_binary, hmin, pguess, pguess_block_diagonal, pguess_with, pretty_good_measurement,
    BlockGuessBracket, EntropyBracket, GuessBracket, SolverOptions, DEFAULT_GAP, DEFAULT_MAX_ITERATIONS,
    MAX_GUESS_DIM,
};
