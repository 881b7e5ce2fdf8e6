//! Deterministic CSV/JSON emission. Floats are written with Rust's shortest
//! round-trip formatting, field order is fixed by the structs, and no
//! timestamps or absolute paths enter the outputs, so identical configs
//! produce byte-identical files.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::runner::{AuditResult, CdfResult, CurvesResult, SweepResult};
use crate::Error;

/// Hex SHA-256 of a serializable value's canonical JSON bytes; stamped into
/// summaries so downstream consumers can verify which inputs produced them.
pub fn content_hash<T: Serialize>(value: &T) -> String {
    let bytes = serde_json::to_vec(value).expect("serializable config");
    let digest = Sha256::digest(&bytes);
    let mut out = String::with_capacity(64);
    for b in digest {
        let _ = write!(out, "{b:02x}");
    }
    out
}

pub fn write_csv(path: &Path, header: &str, rows: &[String]) -> Result<(), Error> {
    let mut text = String::with_capacity(rows.len() * 24 + header.len() + 1);
    text.push_str(header);
    text.push('\n');
    for row in rows {
        text.push_str(row);
        text.push('\n');
    }
    std::fs::write(path, text).map_err(|e| Error::io(path.display().to_string(), e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), Error> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::InvalidConfig(format!("serialization failed: {e}")))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::io(path.display().to_string(), e))
}

fn ensure_dir(dir: &Path) -> Result<(), Error> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir.display().to_string(), e))
}

#[derive(Serialize)]
struct CurvesSummary<'a> {
    config: &'a crate::experiment::ExperimentConfig,
    input_hash: String,
    checkpoints: &'a [usize],
    mean: Vec<Option<f64>>,
    stderr: Vec<Option<f64>>,
    n_runs: usize,
    diverged_runs: usize,
    finals: Vec<Option<f64>>,
}

fn opt(v: f64) -> Option<f64> {
    if v.is_finite() {
        Some(v)
    } else {
        None
    }
}

impl CurvesResult {
    /// Writes `curves_<env>_<algo>.csv` (schema `step,run,metric`) and the
    /// JSON summary next to it. Returns the two file names.
    pub fn emit(&self, dir: &Path) -> Result<(String, String), Error> {
        ensure_dir(dir)?;
        let stem = format!("curves_{}_{}", self.config.environment, self.config.algorithm);
        let csv_name = format!("{stem}.csv");
        let json_name = format!("{stem}.json");

        let mut rows = Vec::with_capacity(self.records.len() * self.checkpoints.len());
        for record in &self.records {
            for (k, &step) in self.checkpoints.iter().enumerate() {
                rows.push(format!("{step},{},{}", record.run_index, record.metrics[k]));
            }
        }
        write_csv(&dir.join(&csv_name), "step,run,metric", &rows)?;

        let summary = CurvesSummary {
            config: &self.config,
            input_hash: content_hash(&self.config),
            checkpoints: &self.checkpoints,
            mean: self.mean.iter().copied().map(opt).collect(),
            stderr: self.stderr.iter().copied().map(opt).collect(),
            n_runs: self.records.len(),
            diverged_runs: self.diverged_runs,
            finals: self.records.iter().map(|r| r.final_metric).collect(),
        };
        write_json(&dir.join(&json_name), &summary)?;
        Ok((csv_name, json_name))
    }
}

#[derive(Serialize)]
struct CdfSummary<'a> {
    config: &'a crate::experiment::ExperimentConfig,
    input_hash: String,
    budget: usize,
    diverged_runs: usize,
    finals_sorted: &'a [Option<f64>],
    drawn_step_sizes: Vec<Option<f64>>,
}

impl CdfResult {
    /// Writes the CDF table `cdf_<env>_<algo>.csv` (schema `value,fraction`)
    /// and the JSON summary with the sorted final samples.
    pub fn emit(&self, dir: &Path) -> Result<(String, String), Error> {
        ensure_dir(dir)?;
        let stem = format!("cdf_{}_{}", self.config.environment, self.config.algorithm);
        let csv_name = format!("{stem}.csv");
        let json_name = format!("{stem}.json");

        let rows: Vec<String> =
            self.cdf.iter().map(|(x, frac)| format!("{x},{frac}")).collect();
        write_csv(&dir.join(&csv_name), "value,fraction", &rows)?;

        let summary = CdfSummary {
            config: &self.config,
            input_hash: content_hash(&self.config),
            budget: self.budget,
            diverged_runs: self.diverged_runs,
            finals_sorted: &self.finals_sorted,
            drawn_step_sizes: self.records.iter().map(|r| r.hyperparameter).collect(),
        };
        write_json(&dir.join(&json_name), &summary)?;
        Ok((csv_name, json_name))
    }
}

#[derive(Serialize)]
struct AuditSummary<'a> {
    config: &'a crate::experiment::ExperimentConfig,
    input_hash: String,
    lambda_max_m: f64,
    radius: f64,
    n_runs: usize,
    pass_count: usize,
}

impl AuditResult {
    /// Writes per-run audit rows and the JSON summary.
    pub fn emit(&self, dir: &Path) -> Result<(String, String), Error> {
        ensure_dir(dir)?;
        let stem = format!("audit_{}_{}", self.config.environment, self.config.algorithm);
        let csv_name = format!("{stem}.csv");
        let json_name = format!("{stem}.json");

        let rows: Vec<String> = self
            .runs
            .iter()
            .map(|r| {
                format!(
                    "{},{},{},{},{},{},{},{}",
                    r.run_index,
                    r.regret_theta,
                    r.regret_y,
                    r.regret_theta_star,
                    r.regret_y_star,
                    r.gap,
                    r.folk_bound,
                    r.pass
                )
            })
            .collect();
        write_csv(
            &dir.join(&csv_name),
            "run,regret_theta,regret_y,regret_theta_star,regret_y_star,gap,folk_bound,pass",
            &rows,
        )?;

        let summary = AuditSummary {
            config: &self.config,
            input_hash: content_hash(&self.config),
            lambda_max_m: self.lambda_max_m,
            radius: self.radius,
            n_runs: self.runs.len(),
            pass_count: self.pass_count,
        };
        write_json(&dir.join(&json_name), &summary)?;
        Ok((csv_name, json_name))
    }
}

#[derive(Serialize)]
struct SweepSummary<'a> {
    config: &'a crate::experiment::ExperimentConfig,
    input_hash: String,
    best_alpha: Option<f64>,
}

impl SweepResult {
    /// Writes per-step-size rows and the JSON summary.
    pub fn emit(&self, dir: &Path) -> Result<(String, String), Error> {
        ensure_dir(dir)?;
        let stem = format!("sweep_{}_{}", self.config.environment, self.config.algorithm);
        let csv_name = format!("{stem}.csv");
        let json_name = format!("{stem}.json");

        let rows: Vec<String> = self
            .points
            .iter()
            .map(|p| format!("{},{},{},{}", p.alpha, p.auc, p.final_mean, p.diverged_runs))
            .collect();
        write_csv(&dir.join(&csv_name), "alpha,auc,final_mean,diverged_runs", &rows)?;

        let summary = SweepSummary {
            config: &self.config,
            input_hash: content_hash(&self.config),
            best_alpha: self.best_alpha,
        };
        write_json(&dir.join(&json_name), &summary)?;
        Ok((csv_name, json_name))
    }
}
