use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha1::{Digest, Sha1};

use super::{EvalError, EvalMetrics, RunDistribution, Summary, UTestResult};
use crate::num::Real;

pub const REPORT_FORMAT_VERSION: u32 = 1;

/// Hash `git hash-object` would give the content.
pub fn git_blob_sha1(bytes: &[u8]) -> String {
    let mut h = Sha1::new();
    h.update(format!("blob {}\0", bytes.len()).as_bytes());
    h.update(bytes);
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputProvenance {
    pub path: String,
    pub git_blob_sha1: String,
}

impl InputProvenance {
    pub fn of_file(path: &Path) -> Result<Self, EvalError> {
        let bytes = fs::read(path).map_err(|source| EvalError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Ok(InputProvenance {
            path: path.display().to_string(),
            git_blob_sha1: git_blob_sha1(&bytes),
        })
    }
}

/// Evaluation report. Maps are keyed by setup name and serialize sorted, so
/// the output is byte-stable for identical inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report<F> {
    pub format_version: u32,
    pub tool_version: String,
    /// Configuration the run was invoked with, echoed verbatim.
    pub config: serde_json::Value,
    pub inputs: Vec<InputProvenance>,
    #[serde(default)]
    pub metrics: BTreeMap<String, EvalMetrics<F>>,
    #[serde(default)]
    pub distributions: BTreeMap<String, Summary<F>>,
    #[serde(default)]
    pub bug_f1_distributions: BTreeMap<String, Summary<F>>,
    #[serde(default)]
    pub u_tests: BTreeMap<String, UTestResult>,
}

impl<F: Real> Report<F> {
    pub fn new(config: serde_json::Value) -> Self {
        Report {
            format_version: REPORT_FORMAT_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            config,
            inputs: Vec::new(),
            metrics: BTreeMap::new(),
            distributions: BTreeMap::new(),
            bug_f1_distributions: BTreeMap::new(),
            u_tests: BTreeMap::new(),
        }
    }

    pub fn add_distribution(&mut self, name: &str, d: &RunDistribution<F>) {
        self.distributions.insert(name.to_string(), d.summary);
        self.bug_f1_distributions.insert(name.to_string(), d.bug_f1_summary);
    }
}

pub fn emit_report<F: Real>(report: &Report<F>, path: &Path) -> Result<(), EvalError> {
    let mut text = serde_json::to_string_pretty(report)?;
    text.push('\n');
    fs::write(path, text).map_err(|source| EvalError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// One line per run: `run,seed,weighted_f1,bug_f1`.
pub fn write_distribution_csv<F: Real>(d: &RunDistribution<F>, path: &Path) -> Result<(), EvalError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["run", "seed", "weighted_f1", "bug_f1"])?;
    for r in &d.runs {
        w.write_record([
            r.run.to_string(),
            r.seed.to_string(),
            r.weighted_f1.to_string(),
            r.bug_f1.to_string(),
        ])?;
    }
    w.flush().map_err(|source| EvalError::Io {
        path: path.display().to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Class;
    use crate::eval::{evaluate, mann_whitney, RunRecord};

    #[test]
    fn blob_hash_matches_git() {
        assert_eq!(git_blob_sha1(b""), "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
        assert_eq!(git_blob_sha1(b"hello\n"), "ce013625030ba8dba906f756967f9e9ca394464a");
    }

    fn sample() -> (Report<f64>, RunDistribution<f64>) {
        let mut r = Report::new(serde_json::json!({"seed": 42, "classifier": "random_forest"}));
        r.inputs.push(InputProvenance {
            path: "x.features".into(),
            git_blob_sha1: git_blob_sha1(b"1 1:2\n"),
        });
        let m = evaluate(
            &[Class::Bug, Class::NonBug, Class::Bug],
            &[Class::Bug, Class::Bug, Class::NonBug],
        )
        .unwrap();
        r.metrics.insert("ngram".into(), m);
        let d = RunDistribution::from_runs(
            (0..5)
                .map(|i| RunRecord {
                    run: i,
                    seed: 42 ^ i as u64,
                    weighted_f1: 0.1 * i as f64 + 1.0 / 3.0,
                    bug_f1: 0.7,
                })
                .collect(),
        );
        r.add_distribution("ngram", &d);
        r.u_tests
            .insert("ngram_vs_topic".into(), mann_whitney(&d.values, &[0.2, 0.25, 0.3]));
        (r, d)
    }

    #[test]
    fn round_trip_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("report.json");
        let (r, _) = sample();
        emit_report(&r, &path).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        let back: Report<f64> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
        emit_report(&back, &path).unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), text);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["format_version"], 1);
        assert!(v["distributions"]["ngram"]["q1"].is_number());
        assert!(v["metrics"]["ngram"]["per_class"]["BUG"]["f1"].is_number());
    }

    #[test]
    fn distribution_csv() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.csv");
        let (_, d) = sample();
        write_distribution_csv(&d, &path).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("run,seed,weighted_f1,bug_f1"));
        assert_eq!(lines.next(), Some("0,42,0.3333333333333333,0.7"));
        assert_eq!(text.lines().count(), 6);
    }
}
