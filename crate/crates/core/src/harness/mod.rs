//! Experiment registry, run configuration and result emission.

mod config;
mod experiments;
mod record;

pub use config::{ConfigOverrides, Experiment, OutputFormat, RunConfig, FUNCTION_SEED};
pub use record::{all_passed, write_csv, write_json, ResultRecord, CSV_HEADER};

use crate::error::Result;

/// Dispatches to the configured experiment; deterministic given the config.
pub fn run(cfg: &RunConfig) -> Result<Vec<ResultRecord>> {
    cfg.validate()?;
    match cfg.experiment {
        Experiment::Lemmas => experiments::lemmas(cfg),
        Experiment::Moe => experiments::moe(cfg),
        Experiment::Niqkd => experiments::niqkd(cfg),
        Experiment::TwoRound => experiments::two_round(cfg),
        Experiment::Nogo => experiments::nogo(cfg),
        Experiment::Entropy => experiments::entropy(cfg),
    }
}
