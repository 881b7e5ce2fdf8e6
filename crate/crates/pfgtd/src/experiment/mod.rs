//! Reproducible experiment protocols: learning curves averaged over seeded
//! runs, CDF hyperparameter-robustness studies, baseline step-size sweeps,
//! and per-run regret/duality-gap audits. Everything is deterministic given
//! the configuration and base seed, including under parallel execution.

mod config;
mod output;
mod runner;

pub use config::{Algorithm, CdfDist, ExperimentConfig};
pub use output::{content_hash, write_csv, write_json};
pub use runner::{
    run_cdf_study, run_learning_curves, run_regret_audit, run_sweep, AuditResult, AuditRun,
    CdfResult, CurvesResult, RunRecord, SweepResult, BASELINE_GRID,
};
