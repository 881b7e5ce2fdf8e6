//! Saddle-point policy evaluation: the stochastic subgradient oracle, the
//! reduction driving two online learners, the parameter-free learner
//! factories, and the classic baselines.

mod baseline;
mod learner;
mod regret;
mod subgradient;

pub use baseline::{BaselineAlgo, BaselineConfig, BaselineLearner};
pub use learner::{saddle_learner, PfVariant, SaddleConfig, SaddlePointLearner};
pub use regret::RegretTracker;
pub use subgradient::{make_subgradients, stochastic_gradient_bounds, SubgradientPair};

/// One off-policy transition: current and next feature vectors (the next is
/// all zeros at termination), the reward, and the importance ratio.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionSample {
    pub phi: Vec<f64>,
    pub phi_next: Vec<f64>,
    pub reward: f64,
    pub rho: f64,
}

impl TransitionSample {
    pub fn zeros(dim: usize) -> Self {
        TransitionSample { phi: vec![0.0; dim], phi_next: vec![0.0; dim], reward: 0.0, rho: 1.0 }
    }

    pub fn dim(&self) -> usize {
        self.phi.len()
    }
}
