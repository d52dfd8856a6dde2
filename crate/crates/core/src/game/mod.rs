//! The computational monogamy-of-entanglement game.

mod bounds;
mod distinguisher;
mod exact;
mod strategy;

pub use bounds::{
    commutation_deviation, m0_overlap, verify_fixed_theta_bound, verify_random_theta_bound, BoundCheck,
    MAX_FIXED_THETA_BITS, MAX_FIXED_THETA_SIDE_DIM, MAX_RANDOM_THETA_BITS,
};
pub use distinguisher::{distinguisher_advantage, exact_reduction_bias, reduction_acceptance, DistinguisherResult};
pub(crate) use exact::rotated;
pub use exact::{
    binomial, decomposition_terms, default_block, exact_pwin, exact_pwin_over, exact_pwin_with_block,
    fixed_theta_bound, sampled_pwin, Decomposition, DecompositionReport, GameResult, IDENTITY_TOL,
};
pub use strategy::{
    BasisAware, Honest, InterceptResend, PublicView, RandomStrategy, Strategy, StrategyKind, MAX_CHARLIE_QUBITS,
    MAX_GAME_KEY_BITS,
};
