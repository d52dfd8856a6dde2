//! Simulation and exact verification toolkit for the computational
//! monogamy-of-entanglement game and the QKD protocols built on it.

pub mod bits;
pub mod entropy;
pub mod error;
pub mod game;
pub mod harness;
pub mod hash;
pub mod nike;
pub mod nogo;
pub mod protocol;
pub mod quantum;
pub mod rng;

pub use bits::{BasisString, BitString};
pub use error::{Error, Result};
