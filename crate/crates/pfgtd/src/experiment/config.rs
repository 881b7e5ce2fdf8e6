//! Experiment configuration: shared by the CLI flags and the config file,
//! echoed verbatim into every JSON summary.

use serde::{Deserialize, Serialize};

use crate::gtd::{BaselineAlgo, PfVariant};
use crate::{Error, Objective};

/// Sampling law for the CDF study's step-size draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum CdfDist {
    /// Log-uniform over the configured range (geometric grids elsewhere in
    /// the protocol imply log scale).
    #[default]
    LogUniform,
    Uniform,
}

impl std::str::FromStr for CdfDist {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().as_str() {
            "log-uniform" | "log_uniform" | "loguniform" => Ok(CdfDist::LogUniform),
            "uniform" => Ok(CdfDist::Uniform),
            other => Err(Error::InvalidConfig(format!("unknown cdf distribution `{other}`"))),
        }
    }
}

/// A resolvable algorithm name: a parameter-free saddle-point variant or a
/// step-size baseline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Saddle(PfVariant),
    Baseline(BaselineAlgo),
}

impl Algorithm {
    pub fn parse(name: &str) -> Result<Self, Error> {
        if let Ok(v) = name.parse::<PfVariant>() {
            return Ok(Algorithm::Saddle(v));
        }
        if let Ok(b) = name.parse::<BaselineAlgo>() {
            return Ok(Algorithm::Baseline(b));
        }
        Err(Error::UnknownAlgorithm(name.to_string()))
    }

    pub fn label(&self) -> &'static str {
        match self {
            Algorithm::Saddle(v) => v.label(),
            Algorithm::Baseline(b) => b.label(),
        }
    }

    pub fn is_baseline(&self) -> bool {
        matches!(self, Algorithm::Baseline(_))
    }
}

/// Full experiment description. Deterministic: `(config, seed_base)` fixes
/// every output byte. Run `i` uses seed `seed_base + i`, so third parties can
/// reproduce any single run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub environment: String,
    pub algorithm: String,
    pub n_runs: usize,
    pub n_steps: usize,
    pub seed_base: u64,
    /// Steps between metric evaluations (an initial evaluation at step 0 is
    /// always recorded).
    pub metric_cadence: usize,
    pub objective: Objective,
    /// Radius of both feasible balls.
    pub radius: f64,
    /// Baseline step size (ignored by the parameter-free variants).
    pub alpha: Option<f64>,
    /// Evaluate baselines on averaged iterates instead of the last iterate.
    pub average: bool,
    /// Behavior-policy variant for the star counterexample.
    pub baird_behavior: String,
    pub cdf_dist: CdfDist,
    pub cdf_range: (f64, f64),
}

impl ExperimentConfig {
    pub fn new(environment: &str, algorithm: &str) -> Self {
        ExperimentConfig {
            environment: environment.to_string(),
            algorithm: algorithm.to_string(),
            n_runs: 1,
            n_steps: 1000,
            seed_base: 0,
            metric_cadence: 1,
            objective: Objective::Mspbe,
            radius: 100.0,
            alpha: None,
            average: false,
            baird_behavior: "equiprobable".to_string(),
            cdf_dist: CdfDist::default(),
            cdf_range: (2f64.powi(-10), 1.0),
        }
    }

    pub fn algorithm(&self) -> Result<Algorithm, Error> {
        Algorithm::parse(&self.algorithm)
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.n_runs == 0 {
            return Err(Error::InvalidConfig("n_runs must be at least 1".into()));
        }
        if self.metric_cadence == 0 {
            return Err(Error::InvalidConfig("metric_cadence must be at least 1".into()));
        }
        if self.radius <= 0.0 {
            return Err(Error::InvalidConfig("radius must be positive".into()));
        }
        if let Some(a) = self.alpha {
            if a <= 0.0 {
                return Err(Error::InvalidConfig("alpha must be positive".into()));
            }
        }
        if !(self.cdf_range.0 > 0.0 && self.cdf_range.1 >= self.cdf_range.0) {
            return Err(Error::InvalidConfig("cdf range must satisfy 0 < lo <= hi".into()));
        }
        self.algorithm()?;
        Ok(())
    }

    /// Steps at which the metric is recorded: 0, then every `cadence` steps.
    pub fn checkpoints(&self) -> Vec<usize> {
        let mut points = vec![0];
        let mut t = self.metric_cadence;
        while t <= self.n_steps {
            points.push(t);
            t += self.metric_cadence;
        }
        points
    }
}
