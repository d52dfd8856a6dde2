use std::io::Write;

use serde::{Deserialize, Serialize};

use super::config::RunConfig;
use crate::error::{Error, Result};

/// Column order of the CSV output, shared by every experiment.
pub const CSV_HEADER: &str = "experiment,scheme,strategy,n,s,m,r,trials,metric,value,stderr,bound,passed";

/// One named measurement. Rows carrying an assertion set `bound` and
/// `passed`; the comparison direction is fixed per metric.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub experiment: String,
    pub scheme: Option<String>,
    /// Strategy, adversary or key function, depending on the experiment.
    pub strategy: Option<String>,
    pub n: Option<usize>,
    pub s: Option<usize>,
    pub m: Option<usize>,
    pub r: Option<usize>,
    pub trials: Option<usize>,
    pub metric: String,
    pub value: f64,
    pub stderr: Option<f64>,
    pub bound: Option<f64>,
    pub passed: Option<bool>,
}

impl ResultRecord {
    pub fn new(experiment: &str, metric: impl Into<String>, value: f64) -> Self {
        Self {
            experiment: experiment.into(),
            scheme: None,
            strategy: None,
            n: None,
            s: None,
            m: None,
            r: None,
            trials: None,
            metric: metric.into(),
            value,
            stderr: None,
            bound: None,
            passed: None,
        }
    }

    pub fn scheme(mut self, v: &str) -> Self {
        self.scheme = Some(v.into());
        self
    }

    pub fn strategy(mut self, v: &str) -> Self {
        self.strategy = Some(v.into());
        self
    }

    pub fn n(mut self, v: usize) -> Self {
        self.n = Some(v);
        self
    }

    pub fn s(mut self, v: usize) -> Self {
        self.s = Some(v);
        self
    }

    pub fn m(mut self, v: usize) -> Self {
        self.m = Some(v);
        self
    }

    pub fn r(mut self, v: usize) -> Self {
        self.r = Some(v);
        self
    }

    pub fn trials(mut self, v: usize) -> Self {
        self.trials = Some(v);
        self
    }

    pub fn stderr(mut self, v: f64) -> Self {
        self.stderr = Some(v);
        self
    }

    /// Asserts `value ≤ bound`.
    pub fn at_most(mut self, bound: f64) -> Self {
        self.passed = Some(self.value <= bound);
        self.bound = Some(bound);
        self
    }

    /// Asserts `value ≥ bound`.
    pub fn at_least(mut self, bound: f64) -> Self {
        self.passed = Some(self.value >= bound);
        self.bound = Some(bound);
        self
    }

    /// Attaches a verdict computed elsewhere against `bound`.
    pub fn check(mut self, bound: f64, passed: bool) -> Self {
        self.passed = Some(passed);
        self.bound = Some(bound);
        self
    }
}

/// True when no row failed its assertion.
pub fn all_passed(records: &[ResultRecord]) -> bool {
    records.iter().all(|r| r.passed != Some(false))
}

pub fn write_csv<W: Write>(records: &[ResultRecord], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_HEADER.split(','))?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct JsonReport<'a> {
    config: &'a RunConfig,
    records: &'a [ResultRecord],
}

pub fn write_json<W: Write>(cfg: &RunConfig, records: &[ResultRecord], mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, &JsonReport { config: cfg, records })
        .map_err(|e| Error::Io(e.to_string()))?;
    writeln!(out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_rows_follow_the_header() {
        let rows = vec![
            ResultRecord::new("moe", "pwin", 0.25).scheme("ideal").n(2).at_most(0.5),
            ResultRecord::new("moe", "agree-rate", 1.0),
        ];
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines[1], "moe,ideal,,2,,,,,pwin,0.25,,0.5,true");
        assert_eq!(lines[2], "moe,,,,,,,,agree-rate,1.0,,,");
        assert!(all_passed(&rows));
        assert!(!all_passed(&[ResultRecord::new("x", "y", 2.0).at_most(1.0)]));
    }
}
