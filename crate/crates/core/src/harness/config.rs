use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::StrategyKind;
use crate::nike::SchemeKind;
use crate::nogo::KeyFunctionKind;
use crate::protocol::{AdversaryKind, DigestKind};

/// Seed of the no-go key function, fixed so that `--seed` only drives trials.
pub const FUNCTION_SEED: u64 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Lemmas,
    Moe,
    Niqkd,
    TwoRound,
    Nogo,
    Entropy,
}

impl Experiment {
    pub const ALL: [Experiment; 6] =
        [Self::Lemmas, Self::Moe, Self::Niqkd, Self::TwoRound, Self::Nogo, Self::Entropy];

    pub fn label(&self) -> &'static str {
        match self {
            Self::Lemmas => "lemmas",
            Self::Moe => "moe",
            Self::Niqkd => "niqkd",
            Self::TwoRound => "two-round",
            Self::Nogo => "nogo",
            Self::Entropy => "entropy",
        }
    }

    fn default_trials(&self) -> usize {
        match self {
            Self::Lemmas => 200,
            Self::Entropy => 100,
            Self::Moe | Self::Nogo => 10_000,
            Self::Niqkd | Self::TwoRound => 1000,
        }
    }
}

impl std::str::FromStr for Experiment {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|e| e.label() == s).ok_or_else(|| Error::UnknownExperiment(s.into()))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            _ => Err(Error::InvalidParameter(format!("unknown format {s:?}"))),
        }
    }
}

/// A fully resolved run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct RunConfig {
    pub experiment: Experiment,
    pub scheme: SchemeKind,
    pub strategy: StrategyKind,
    pub adversary: AdversaryKind,
    pub key_function: KeyFunctionKind,
    pub digest: DigestKind,
    pub n: usize,
    /// Block size; defaults to the largest divisor of `n` not above `√n`.
    pub s: Option<usize>,
    /// Digest bits for `two-round`, key bits for `nogo`.
    pub m: Option<usize>,
    pub r: usize,
    pub trials: usize,
    pub seed: u64,
    pub exact: bool,
    pub tolerance: f64,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    /// Defaults for `experiment` with the given seed.
    pub fn new(experiment: Experiment, seed: u64) -> Self {
        Self {
            experiment,
            scheme: SchemeKind::Ideal,
            strategy: StrategyKind::Honest,
            adversary: AdversaryKind::None,
            key_function: KeyFunctionKind::Universal,
            digest: DigestKind::Sha256,
            n: 2,
            s: None,
            m: None,
            r: 64,
            trials: experiment.default_trials(),
            seed,
            exact: false,
            tolerance: 1e-9,
            format: OutputFormat::Csv,
            out: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be positive".into()));
        }
        if self.n == 0 {
            return Err(Error::InvalidParameter("n must be positive".into()));
        }
        if let Some(s) = self.s {
            if s == 0 || !self.n.is_multiple_of(s) {
                return Err(Error::NotADivisor { n: self.n, block: s });
            }
        }
        if !(self.tolerance.is_finite() && self.tolerance >= 0.0) {
            return Err(Error::InvalidParameter(format!("tolerance {} is not a non-negative number", self.tolerance)));
        }
        Ok(())
    }
}

/// Partial configuration from a JSON file or command-line flags.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct ConfigOverrides {
    pub experiment: Option<Experiment>,
    pub scheme: Option<SchemeKind>,
    pub strategy: Option<StrategyKind>,
    pub adversary: Option<AdversaryKind>,
    pub key_function: Option<KeyFunctionKind>,
    pub digest: Option<DigestKind>,
    pub n: Option<usize>,
    pub s: Option<usize>,
    pub m: Option<usize>,
    pub r: Option<usize>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub exact: Option<bool>,
    pub tolerance: Option<f64>,
    pub format: Option<OutputFormat>,
    pub out: Option<PathBuf>,
}

impl ConfigOverrides {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidParameter(format!("config file: {e}")))
    }

    /// Fields set in `over` replace those in `self`.
    pub fn merge(self, over: ConfigOverrides) -> Self {
        Self {
            experiment: over.experiment.or(self.experiment),
            scheme: over.scheme.or(self.scheme),
            strategy: over.strategy.or(self.strategy),
            adversary: over.adversary.or(self.adversary),
            key_function: over.key_function.or(self.key_function),
            digest: over.digest.or(self.digest),
            n: over.n.or(self.n),
            s: over.s.or(self.s),
            m: over.m.or(self.m),
            r: over.r.or(self.r),
            trials: over.trials.or(self.trials),
            seed: over.seed.or(self.seed),
            exact: over.exact.or(self.exact),
            tolerance: over.tolerance.or(self.tolerance),
            format: over.format.or(self.format),
            out: over.out.or(self.out),
        }
    }

    /// Requires an experiment and a seed; everything else has defaults.
    pub fn resolve(self) -> Result<RunConfig> {
        let experiment = self.experiment.ok_or_else(|| Error::InvalidParameter("no experiment given".into()))?;
        let seed = self.seed.ok_or_else(|| Error::InvalidParameter("a seed is required".into()))?;
        let d = RunConfig::new(experiment, seed);
        let cfg = RunConfig {
            experiment,
            scheme: self.scheme.unwrap_or(d.scheme),
            strategy: self.strategy.unwrap_or(d.strategy),
            adversary: self.adversary.unwrap_or(d.adversary),
            key_function: self.key_function.unwrap_or(d.key_function),
            digest: self.digest.unwrap_or(d.digest),
            n: self.n.unwrap_or(d.n),
            s: self.s,
            m: self.m,
            r: self.r.unwrap_or(d.r),
            trials: self.trials.unwrap_or(d.trials),
            seed,
            exact: self.exact.unwrap_or(d.exact),
            tolerance: self.tolerance.unwrap_or(d.tolerance),
            format: self.format.unwrap_or(d.format),
            out: self.out,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file_values() {
        let file = ConfigOverrides::from_json(r#"{"experiment": "moe", "n": 3, "seed": 4, "strategy": "basis-aware"}"#)
            .unwrap();
        let flags = ConfigOverrides { n: Some(2), ..Default::default() };
        let cfg = file.merge(flags).resolve().unwrap();
        assert_eq!((cfg.experiment, cfg.n, cfg.seed), (Experiment::Moe, 2, 4));
        assert_eq!(cfg.strategy, StrategyKind::BasisAware);
        assert_eq!(cfg.trials, 10_000);
    }

    #[test]
    fn seed_and_experiment_are_required() {
        let no_seed = ConfigOverrides { experiment: Some(Experiment::Lemmas), ..Default::default() };
        assert!(no_seed.resolve().is_err());
        assert!(ConfigOverrides { seed: Some(1), ..Default::default() }.resolve().is_err());
        assert!(ConfigOverrides::from_json(r#"{"bogus": 1}"#).is_err());
        assert!(matches!("sweep".parse::<Experiment>(), Err(Error::UnknownExperiment(_))));
    }
}
