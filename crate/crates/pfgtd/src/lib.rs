//! Parameter-free gradient temporal-difference policy evaluation.
//!
//! The crate is organized in layers:
//!
//! - [`olo`]: parameter-free online linear optimization primitives — the
//!   coin-betting bettor with hints, the unit-ball direction learner, the
//!   gradient-clipping / constraint-set / dimension-free reductions, and the
//!   PF, CW-PF, and PF+ subroutines composed from them.
//! - [`gtd`]: the saddle-point formulation of MSPBE/NEU minimization reduced
//!   to two online learners, plus the classic TD/GTD2/TDC/TDRC baselines.
//! - [`envs`]: benchmark MDPs (random walk, Boyan chain, Baird star) with
//!   exact dynamics and seeded samplers, and a synthetic multi-scale
//!   prediction stream.
//! - [`metrics`]: closed-form A, b, C, saddle point, RMSPBE, duality gap,
//!   and SMAPE — the ground truth everything is tested against.
//! - [`experiment`]: seeded, reproducible experiment protocols (learning
//!   curves, CDF robustness studies, regret audits) emitting CSV/JSON.

pub mod envs;
pub mod experiment;
pub mod gtd;
pub mod linalg;
pub mod metrics;
pub mod olo;

use serde::{Deserialize, Serialize};

/// Which quadratic norm defines the objective: MSPBE uses the feature
/// covariance `M = C`, NEU the identity `M = I`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    #[default]
    Mspbe,
    Neu,
}

impl std::fmt::Display for Objective {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Objective::Mspbe => write!(f, "mspbe"),
            Objective::Neu => write!(f, "neu"),
        }
    }
}

impl std::str::FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().as_str() {
            "mspbe" => Ok(Objective::Mspbe),
            "neu" => Ok(Objective::Neu),
            other => Err(Error::InvalidConfig(format!(
                "unknown objective `{other}` (expected mspbe or neu)"
            ))),
        }
    }
}

/// Library error type. Contract violations (precondition breaches inside the
/// online-learning reductions) panic instead; everything user-facing is a
/// `Result`.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("unknown environment `{0}`")]
    UnknownEnvironment(String),
    #[error("unknown algorithm `{0}`")]
    UnknownAlgorithm(String),
    #[error("model construction failed: {0}")]
    Construction(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
