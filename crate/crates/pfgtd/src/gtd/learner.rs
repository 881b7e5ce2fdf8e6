//! The saddle-point-to-online-learning reduction and the factories wiring
//! constrained clipping around the PF, CW-PF, and PF+ subroutines.

use serde::{Deserialize, Serialize};

use super::{make_subgradients, TransitionSample};
use crate::olo::{ConstrainedLearner, CwPfCore, HintState, L2Ball, PfCore, PfPlusCore, Subroutine};
use crate::{Error, Objective};

/// Which parameter-free subroutine backs each side of the saddle point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PfVariant {
    Pf,
    CwPf,
    PfPlus,
}

impl PfVariant {
    pub fn label(&self) -> &'static str {
        match self {
            PfVariant::Pf => "pfgtd",
            PfVariant::CwPf => "cw-pfgtd",
            PfVariant::PfPlus => "pfgtd+",
        }
    }
}

impl std::str::FromStr for PfVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().as_str() {
            "pf" | "pfgtd" => Ok(PfVariant::Pf),
            "cw-pf" | "cw-pfgtd" | "cwpf" | "cwpfgtd" => Ok(PfVariant::CwPf),
            "pf+" | "pfgtd+" | "pfplus" | "pfgtdplus" => Ok(PfVariant::PfPlus),
            other => Err(Error::UnknownAlgorithm(other.to_string())),
        }
    }
}

/// Configuration for a parameter-free saddle-point learner. The defaults
/// `W0 = eps_hat = 1` are the naive settings used throughout; the feasible
/// sets are origin-centered balls of radius `radius` for both sides.
#[derive(Debug, Clone)]
pub struct SaddleConfig {
    pub variant: PfVariant,
    pub dim: usize,
    pub gamma: f64,
    pub objective: Objective,
    pub radius: f64,
    pub initial_wealth: f64,
    pub initial_hint: f64,
    /// Optional warm start for the primary parameters (bettor seeding).
    pub warm_start: Option<Vec<f64>>,
}

impl SaddleConfig {
    pub fn new(variant: PfVariant, dim: usize, gamma: f64) -> Self {
        SaddleConfig {
            variant,
            dim,
            gamma,
            objective: Objective::Mspbe,
            radius: 100.0,
            initial_wealth: 1.0,
            initial_hint: 1.0,
            warm_start: None,
        }
    }

    pub fn with_objective(mut self, objective: Objective) -> Self {
        self.objective = objective;
        self
    }

    pub fn with_radius(mut self, radius: f64) -> Self {
        self.radius = radius;
        self
    }

    pub fn with_warm_start(mut self, theta1: Option<Vec<f64>>) -> Self {
        self.warm_start = theta1;
        self
    }
}

/// Runs the communication-free protocol: two constrained online learners,
/// one for the primary parameters and one for the dual, fed by the stochastic
/// subgradients evaluated at their own played points. Keeps the running
/// average of the played iterates for the online-to-batch conversion.
pub struct SaddlePointLearner {
    theta_side: ConstrainedLearner,
    y_side: ConstrainedLearner,
    gamma: f64,
    objective: Objective,
    theta_play: Vec<f64>,
    y_play: Vec<f64>,
    theta_avg: Vec<f64>,
    y_avg: Vec<f64>,
    steps: u64,
}

impl SaddlePointLearner {
    pub fn new(theta_side: ConstrainedLearner, y_side: ConstrainedLearner, gamma: f64, objective: Objective) -> Self {
        let d = theta_side.dim();
        assert_eq!(d, y_side.dim(), "both sides must share the feature dimension");
        SaddlePointLearner {
            theta_side,
            y_side,
            gamma,
            objective,
            theta_play: vec![0.0; d],
            y_play: vec![0.0; d],
            theta_avg: vec![0.0; d],
            y_avg: vec![0.0; d],
            steps: 0,
        }
    }

    pub fn dim(&self) -> usize {
        self.theta_avg.len()
    }

    /// One reduction round: obtain the played (projected) points, compute
    /// subgradients at them, route each to its own learner, and fold the
    /// played points into the running averages.
    pub fn step(&mut self, sample: &TransitionSample) {
        self.theta_play.clear();
        self.theta_play.extend_from_slice(self.theta_side.play());
        self.y_play.clear();
        self.y_play.extend_from_slice(self.y_side.play());

        let grads = make_subgradients(
            sample,
            self.gamma,
            self.objective,
            &self.theta_play,
            &self.y_play,
        );
        self.theta_side.observe(&grads.g_theta);
        self.y_side.observe(&grads.g_y);

        self.steps += 1;
        let t = self.steps as f64;
        for i in 0..self.theta_avg.len() {
            self.theta_avg[i] += (self.theta_play[i] - self.theta_avg[i]) / t;
            self.y_avg[i] += (self.y_play[i] - self.y_avg[i]) / t;
        }
    }

    /// The point the primary learner would play this round (the current
    /// estimate before averaging).
    pub fn theta_current(&mut self) -> &[f64] {
        self.theta_side.current_play()
    }

    pub fn y_current(&mut self) -> &[f64] {
        self.y_side.current_play()
    }

    /// Played points of the most recent completed round.
    pub fn last_played(&self) -> (&[f64], &[f64]) {
        (&self.theta_play, &self.y_play)
    }

    pub fn theta_avg(&self) -> &[f64] {
        &self.theta_avg
    }

    pub fn y_avg(&self) -> &[f64] {
        &self.y_avg
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn theta_side(&self) -> &ConstrainedLearner {
        &self.theta_side
    }

    pub fn y_side(&self) -> &ConstrainedLearner {
        &self.y_side
    }

    pub fn theta_side_mut(&mut self) -> &mut ConstrainedLearner {
        &mut self.theta_side
    }
}

/// Builds the paired online learners for the chosen variant: constrained
/// scalar clipping around PF, constrained vector clipping around CW-PF and
/// PF+. Wealth endowments: the PF sides split `W0` in half, the
/// coordinate-wise sides each take `W0` per coordinate, and each PF+ side
/// applies its internal split (`d/2 * W0` for PF, `W0 / 2` per CW
/// coordinate) to the full `W0`. The warm start seeds the primary side's
/// bettors so the first played point is exactly `theta1`.
pub fn saddle_learner(cfg: &SaddleConfig) -> Result<SaddlePointLearner, Error> {
    if cfg.initial_wealth <= 0.0 || cfg.initial_hint <= 0.0 {
        return Err(Error::InvalidConfig(
            "initial wealth and hint guess must be positive".into(),
        ));
    }
    let d = cfg.dim;

    let build_side = |warm: Option<&[f64]>| -> Result<ConstrainedLearner, Error> {
        let (hint, inner) = match cfg.variant {
            PfVariant::Pf => {
                let hint = HintState::scalar(cfg.initial_hint);
                let core = match warm {
                    Some(theta1) => PfCore::warm_start(theta1, cfg.initial_hint),
                    None => PfCore::new(d, 0.5 * cfg.initial_wealth, cfg.initial_hint),
                };
                (hint, Subroutine::Pf(core))
            }
            PfVariant::CwPf => {
                let hint = HintState::vector(cfg.initial_hint, d);
                let core = match warm {
                    Some(theta1) => CwPfCore::warm_start(theta1, cfg.initial_hint)?,
                    None => CwPfCore::new(d, cfg.initial_wealth, cfg.initial_hint),
                };
                (hint, Subroutine::CwPf(core))
            }
            PfVariant::PfPlus => {
                let hint = HintState::vector(cfg.initial_hint, d);
                let core = match warm {
                    Some(theta1) => PfPlusCore::warm_start(theta1, &hint)?,
                    None => PfPlusCore::new(d, cfg.initial_wealth, &hint),
                };
                (hint, Subroutine::PfPlus(core))
            }
        };
        Ok(ConstrainedLearner::new(L2Ball::new(cfg.radius, d), hint, inner))
    };

    let theta_side = build_side(cfg.warm_start.as_deref())?;
    let y_side = build_side(None)?;
    Ok(SaddlePointLearner::new(theta_side, y_side, cfg.gamma, cfg.objective))
}
