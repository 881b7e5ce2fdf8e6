//! Classic gradient-TD baselines with constant step sizes. These run
//! unconstrained on the last iterate, matching common practice; iterate
//! averaging is opt-in.

use serde::{Deserialize, Serialize};

use super::TransitionSample;
use crate::linalg::dot;
use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BaselineAlgo {
    Td,
    Gtd2,
    Tdc,
    Tdrc,
}

impl BaselineAlgo {
    pub fn label(&self) -> &'static str {
        match self {
            BaselineAlgo::Td => "td",
            BaselineAlgo::Gtd2 => "gtd2",
            BaselineAlgo::Tdc => "tdc",
            BaselineAlgo::Tdrc => "tdrc",
        }
    }
}

impl std::str::FromStr for BaselineAlgo {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().as_str() {
            "td" => Ok(BaselineAlgo::Td),
            "gtd2" => Ok(BaselineAlgo::Gtd2),
            "tdc" => Ok(BaselineAlgo::Tdc),
            "tdrc" => Ok(BaselineAlgo::Tdrc),
            other => Err(Error::UnknownAlgorithm(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BaselineConfig {
    pub algorithm: BaselineAlgo,
    pub step_size: f64,
    /// Ratio of the secondary step size to the primary (TDC/TDRC).
    pub secondary_step_ratio: f64,
    /// Regularization strength for TDRC.
    pub tdrc_beta: f64,
}

impl BaselineConfig {
    pub fn new(algorithm: BaselineAlgo, step_size: f64) -> Self {
        assert!(step_size > 0.0, "step size must be positive");
        BaselineConfig { algorithm, step_size, secondary_step_ratio: 1.0, tdrc_beta: 1.0 }
    }
}

/// Last-iterate baseline learner with an optional running average of the
/// primary parameters.
#[derive(Debug, Clone)]
pub struct BaselineLearner {
    pub config: BaselineConfig,
    theta: Vec<f64>,
    y: Vec<f64>,
    theta_avg: Vec<f64>,
    steps: u64,
}

impl BaselineLearner {
    pub fn new(config: BaselineConfig, dim: usize) -> Self {
        BaselineLearner {
            config,
            theta: vec![0.0; dim],
            y: vec![0.0; dim],
            theta_avg: vec![0.0; dim],
            steps: 0,
        }
    }

    pub fn with_initial_theta(config: BaselineConfig, theta: Vec<f64>) -> Self {
        let d = theta.len();
        BaselineLearner { config, theta, y: vec![0.0; d], theta_avg: vec![0.0; d], steps: 0 }
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    /// Running average of the primary iterates (played points before each
    /// update), for the averaged evaluation mode.
    pub fn theta_avg(&self) -> &[f64] {
        &self.theta_avg
    }

    pub fn step(&mut self, sample: &TransitionSample, gamma: f64) {
        let d = self.theta.len();
        debug_assert_eq!(sample.dim(), d);
        let alpha = self.config.step_size;
        let rho = sample.rho;
        let phi = &sample.phi;
        let phi_next = &sample.phi_next;

        // Fold the pre-update iterate into the running average.
        self.steps += 1;
        let t = self.steps as f64;
        for i in 0..d {
            self.theta_avg[i] += (self.theta[i] - self.theta_avg[i]) / t;
        }

        let delta = sample.reward + gamma * dot(phi_next, &self.theta) - dot(phi, &self.theta);
        let phi_dot_y = dot(phi, &self.y);

        match self.config.algorithm {
            BaselineAlgo::Td => {
                for i in 0..d {
                    self.theta[i] += alpha * rho * delta * phi[i];
                }
            }
            BaselineAlgo::Gtd2 => {
                for i in 0..d {
                    self.theta[i] += alpha * rho * (phi[i] - gamma * phi_next[i]) * phi_dot_y;
                }
                for i in 0..d {
                    self.y[i] += alpha * rho * (delta - phi_dot_y) * phi[i];
                }
            }
            BaselineAlgo::Tdc => {
                let beta_step = self.config.secondary_step_ratio * alpha;
                for i in 0..d {
                    self.theta[i] += alpha * rho * (delta * phi[i] - gamma * phi_next[i] * phi_dot_y);
                }
                for i in 0..d {
                    self.y[i] += beta_step * rho * (delta - phi_dot_y) * phi[i];
                }
            }
            BaselineAlgo::Tdrc => {
                let reg = self.config.tdrc_beta;
                for i in 0..d {
                    self.theta[i] += alpha * rho * (delta * phi[i] - gamma * phi_next[i] * phi_dot_y);
                }
                for i in 0..d {
                    self.y[i] += alpha * (rho * delta * phi[i] - phi_dot_y * phi[i] - reg * self.y[i]);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(phi: Vec<f64>, phi_next: Vec<f64>, reward: f64, rho: f64) -> TransitionSample {
        TransitionSample { phi, phi_next, reward, rho }
    }

    #[test]
    fn zero_delta_and_zero_y_freeze_every_algorithm() {
        // reward 0 and theta such that the TD error vanishes.
        let s = sample(vec![1.0, 0.0], vec![1.0, 0.0], 0.0, 1.0);
        for algo in [BaselineAlgo::Td, BaselineAlgo::Gtd2, BaselineAlgo::Tdc, BaselineAlgo::Tdrc] {
            let mut l = BaselineLearner::with_initial_theta(
                BaselineConfig::new(algo, 0.25),
                vec![2.0, -1.0],
            );
            // gamma = 1 makes delta = r + <phi', th> - <phi, th> = 0 here.
            l.step(&s, 1.0);
            assert_eq!(l.theta(), &[2.0, -1.0], "{algo:?} moved theta");
            assert_eq!(l.y(), &[0.0, 0.0], "{algo:?} moved y");
        }
    }

    #[test]
    fn on_policy_tabular_td_is_classic_td0() {
        let s = sample(vec![0.0, 1.0], vec![1.0, 0.0], 2.0, 1.0);
        let mut l = BaselineLearner::new(BaselineConfig::new(BaselineAlgo::Td, 0.5), 2);
        l.step(&s, 0.9);
        // delta = 2 + 0.9*0 - 0 = 2; theta_s += alpha * delta.
        assert_eq!(l.theta(), &[0.0, 1.0]);
    }

    #[test]
    fn tdrc_with_default_beta_reduces_to_primary_td_error_step_at_zero_y() {
        let s = sample(vec![1.0, 0.0], vec![0.0, 0.0], 1.0, 2.0);
        let mut l = BaselineLearner::new(BaselineConfig::new(BaselineAlgo::Tdrc, 0.1), 2);
        l.step(&s, 0.9);
        // y' = alpha * rho * delta * phi with y = 0 and beta = 1.
        assert_eq!(l.y(), &[0.1 * 2.0 * 1.0, 0.0]);
    }

    #[test]
    fn averaging_tracks_pre_update_iterates() {
        let s = sample(vec![1.0], vec![0.0], 1.0, 1.0);
        let mut l = BaselineLearner::new(BaselineConfig::new(BaselineAlgo::Td, 1.0), 1);
        l.step(&s, 0.0); // theta 0 -> 1, average of played {0}
        assert_eq!(l.theta_avg(), &[0.0]);
        l.step(&s, 0.0); // theta 1 -> 1 (delta 0), average of {0, 1}
        assert_eq!(l.theta_avg(), &[0.5]);
    }
}
