use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;
use moeqkd_core::game::StrategyKind;
use moeqkd_core::harness::{self, ConfigOverrides, Experiment, OutputFormat, ResultRecord};
use moeqkd_core::nike::SchemeKind;
use moeqkd_core::nogo::KeyFunctionKind;
use moeqkd_core::protocol::{AdversaryKind, DigestKind};

/// Runs one experiment and emits its result rows. The exit code is 0 iff
/// every asserted row passes.
#[derive(Debug, Parser)]
#[command(name = "moeqkd", version)]
struct Cli {
    /// lemmas | moe | niqkd | two-round | nogo | entropy
    experiment: Experiment,
    /// Master seed; every row is reproducible from the configuration and this seed.
    #[arg(long)]
    seed: u64,
    /// JSON file with the same keys as the flags; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// ideal | toy-dh | broken
    #[arg(long)]
    scheme: Option<SchemeKind>,
    /// honest | intercept-resend | basis-aware | random
    #[arg(long)]
    strategy: Option<StrategyKind>,
    /// none | identity | swap-epr | classical-clone | partial-clone
    #[arg(long)]
    adversary: Option<AdversaryKind>,
    /// constant | xor-prefix | linear | table | universal
    #[arg(long)]
    key_function: Option<KeyFunctionKind>,
    /// sha256 | universal
    #[arg(long)]
    digest: Option<DigestKind>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    s: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    r: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    /// Exact evaluation instead of sampling.
    #[arg(long)]
    exact: bool,
    #[arg(long)]
    tolerance: Option<f64>,
    /// csv | json
    #[arg(long)]
    format: Option<OutputFormat>,
    /// Output path; standard output if absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Cli {
    fn overrides(&self) -> ConfigOverrides {
        ConfigOverrides {
            experiment: Some(self.experiment),
            scheme: self.scheme,
            strategy: self.strategy,
            adversary: self.adversary,
            key_function: self.key_function,
            digest: self.digest,
            n: self.n,
            s: self.s,
            m: self.m,
            r: self.r,
            trials: self.trials,
            seed: Some(self.seed),
            exact: self.exact.then_some(true),
            tolerance: self.tolerance,
            format: self.format,
            out: self.out.clone(),
        }
    }
}

fn failures(records: &[ResultRecord]) -> Vec<&ResultRecord> {
    records.iter().filter(|r| r.passed == Some(false)).collect()
}

fn run(cli: &Cli) -> Result<bool> {
    let file = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            ConfigOverrides::from_json(&text)?
        }
        None => ConfigOverrides::default(),
    };
    let cfg = file.merge(cli.overrides()).resolve()?;
    let records = harness::run(&cfg)?;
    let mut sink: Box<dyn Write> = match &cfg.out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).with_context(|| format!("creating {}", path.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    };
    match cfg.format {
        OutputFormat::Csv => harness::write_csv(&records, &mut sink)?,
        OutputFormat::Json => harness::write_json(&cfg, &records, &mut sink)?,
    }
    sink.flush()?;
    let failed = failures(&records);
    let asserted = records.iter().filter(|r| r.passed.is_some()).count();
    for r in &failed {
        eprintln!("FAIL {}: value {} against bound {}", r.metric, r.value, r.bound.unwrap_or(f64::NAN));
    }
    eprintln!("{} of {asserted} assertions passed", asserted - failed.len());
    Ok(failed.is_empty())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
