//! Benchmark environments: exact MDP descriptions with feature maps and
//! policies, seeded transition samplers, and a synthetic multi-scale
//! prediction stream.

mod classic;
mod multi_scale;
mod sampler;

pub use classic::{baird_initial_theta, baird_star, boyan_chain, random_walk, BairdBehavior, RandomWalkFeatures};
pub use multi_scale::{multi_scale_stream, MultiScaleSpec, MultiScaleStream};
pub use sampler::Sampler;

use serde::Serialize;

use crate::gtd::TransitionSample;
use crate::Error;

/// How the data stream draws the current state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplingMode {
    /// Follow the behavior chain; entering a terminal state restarts the
    /// episode from the start distribution on the next call.
    Trajectory,
    /// Draw every state i.i.d. from the start distribution (the continuing,
    /// uniform-state data model used by the star counterexample).
    Iid,
}

/// A finite MDP with behavior/target policies and a linear feature map.
/// Immutable after construction and shareable across parallel runs.
#[derive(Debug, Clone, Serialize)]
pub struct MdpSpec {
    pub name: String,
    pub n_states: usize,
    pub n_actions: usize,
    /// `transition[s][a][s']`
    pub transition: Vec<Vec<Vec<f64>>>,
    /// `reward[s][a]`
    pub reward: Vec<Vec<f64>>,
    pub gamma: f64,
    /// `behavior[s][a]`
    pub behavior: Vec<Vec<f64>>,
    /// `target[s][a]`
    pub target: Vec<Vec<f64>>,
    /// `features[s]`, all-zero rows for terminal states.
    pub features: Vec<Vec<f64>>,
    pub start_dist: Vec<f64>,
    pub terminal: Vec<bool>,
    pub sampling: SamplingMode,
}

const ROW_SUM_TOL: f64 = 1e-12;

impl MdpSpec {
    /// Validates stochasticity, coverage, and terminal-feature conventions.
    pub fn validate(self) -> Result<Self, Error> {
        let n = self.n_states;
        let m = self.n_actions;
        let fail = |msg: String| Err::<MdpSpec, _>(Error::Construction(msg));
        if self.transition.len() != n
            || self.reward.len() != n
            || self.behavior.len() != n
            || self.target.len() != n
            || self.features.len() != n
            || self.terminal.len() != n
            || self.start_dist.len() != n
        {
            return fail(format!("{}: field lengths disagree with n_states", self.name));
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return fail(format!("{}: discount must lie in [0, 1]", self.name));
        }
        let d = self.features[0].len();
        if (self.start_dist.iter().sum::<f64>() - 1.0).abs() > ROW_SUM_TOL {
            return fail(format!("{}: start distribution must sum to 1", self.name));
        }
        for s in 0..n {
            if self.features[s].len() != d {
                return fail(format!("{}: ragged feature matrix", self.name));
            }
            if self.terminal[s] {
                if self.features[s].iter().any(|&x| x != 0.0) {
                    return fail(format!(
                        "{}: terminal state {s} must have zero features",
                        self.name
                    ));
                }
                continue;
            }
            for (a, row) in self.transition[s].iter().enumerate() {
                if row.len() != n {
                    return fail(format!("{}: transition row {s}/{a} has wrong arity", self.name));
                }
                let sum: f64 = row.iter().sum();
                if (sum - 1.0).abs() > ROW_SUM_TOL || row.iter().any(|&p| p < 0.0) {
                    return fail(format!(
                        "{}: P(.|{s},{a}) must be a probability row (sums to {sum})",
                        self.name
                    ));
                }
            }
            for (label, row) in [("behavior", &self.behavior[s]), ("target", &self.target[s])] {
                let sum: f64 = row.iter().sum();
                if row.len() != m || (sum - 1.0).abs() > ROW_SUM_TOL || row.iter().any(|&p| p < 0.0)
                {
                    return fail(format!(
                        "{}: {label} policy row {s} is not a distribution",
                        self.name
                    ));
                }
            }
            for a in 0..m {
                if self.target[s][a] > 0.0 && self.behavior[s][a] == 0.0 {
                    return fail(format!(
                        "{}: coverage violated at state {s}, action {a}",
                        self.name
                    ));
                }
            }
        }
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.features[0].len()
    }

    /// Importance ratio `target / behavior` for a state-action pair.
    pub fn rho(&self, s: usize, a: usize) -> f64 {
        if self.target[s][a] == 0.0 {
            0.0
        } else {
            self.target[s][a] / self.behavior[s][a]
        }
    }

    /// Largest importance ratio over covered pairs.
    pub fn rho_max(&self) -> f64 {
        let mut m = 0.0f64;
        for s in self.non_terminal_states() {
            for a in 0..self.n_actions {
                if self.behavior[s][a] > 0.0 {
                    m = m.max(self.rho(s, a));
                }
            }
        }
        m
    }

    /// Bound `L` on the sup-norm of any feature vector.
    pub fn feature_bound(&self) -> f64 {
        self.features.iter().flat_map(|row| row.iter()).fold(0.0f64, |m, x| m.max(x.abs()))
    }

    /// Largest absolute reward over non-terminal states.
    pub fn reward_bound(&self) -> f64 {
        let mut m = 0.0f64;
        for s in self.non_terminal_states() {
            for a in 0..self.n_actions {
                m = m.max(self.reward[s][a].abs());
            }
        }
        m
    }

    pub fn non_terminal_states(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n_states).filter(|&s| !self.terminal[s])
    }

    /// Builds the transition sample for a concrete `(s, a, s')` triple.
    pub fn sample_for(&self, s: usize, a: usize, s_next: usize) -> TransitionSample {
        TransitionSample {
            phi: self.features[s].clone(),
            phi_next: self.features[s_next].clone(),
            reward: self.reward[s][a],
            rho: self.rho(s, a),
        }
    }
}

/// A registered benchmark: either an exact MDP or the synthetic multi-scale
/// prediction task.
#[derive(Debug, Clone)]
pub enum Environment {
    Mdp(MdpSpec),
    MultiScale(MultiScaleSpec),
}

impl Environment {
    pub fn name(&self) -> &str {
        match self {
            Environment::Mdp(spec) => &spec.name,
            Environment::MultiScale(spec) => &spec.name,
        }
    }

    pub fn as_mdp(&self) -> Result<&MdpSpec, Error> {
        match self {
            Environment::Mdp(spec) => Ok(spec),
            Environment::MultiScale(_) => Err(Error::InvalidConfig(
                "this operation needs an exact MDP environment".into(),
            )),
        }
    }
}

/// All registered environment names.
pub const ENVIRONMENT_NAMES: [&str; 6] = [
    "random-walk-tabular",
    "random-walk-dependent",
    "random-walk-inverted",
    "boyan",
    "baird",
    "multi-scale",
];

/// Options honored by the registry lookup.
#[derive(Debug, Clone, Default)]
pub struct EnvOptions {
    /// Behavior policy for the star counterexample.
    pub baird_behavior: BairdBehavior,
}

/// Look up an environment by its registered name.
pub fn by_name(name: &str, opts: &EnvOptions) -> Result<Environment, Error> {
    match name {
        "random-walk-tabular" => Ok(Environment::Mdp(random_walk(RandomWalkFeatures::Tabular)?)),
        "random-walk-dependent" => {
            Ok(Environment::Mdp(random_walk(RandomWalkFeatures::Dependent)?))
        }
        "random-walk-inverted" => Ok(Environment::Mdp(random_walk(RandomWalkFeatures::Inverted)?)),
        "boyan" => Ok(Environment::Mdp(boyan_chain()?)),
        "baird" => Ok(Environment::Mdp(baird_star(opts.baird_behavior)?)),
        "multi-scale" => Ok(Environment::MultiScale(MultiScaleSpec::default())),
        other => Err(Error::UnknownEnvironment(other.to_string())),
    }
}
