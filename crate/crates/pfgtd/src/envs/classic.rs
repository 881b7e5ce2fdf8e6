//! The three classic policy-evaluation MDPs: a five-state random walk with
//! three feature sets, a 13-state aliased chain, and the off-policy star
//! counterexample.

use super::{MdpSpec, SamplingMode};
use crate::Error;

/// Feature representation for the five-state random walk.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RandomWalkFeatures {
    /// One-hot encoding, 5 features.
    Tabular,
    /// Three-dimensional aliased encoding with unit-norm rows.
    Dependent,
    /// One-cold encoding scaled to unit norm, 5 features.
    Inverted,
}

/// Five non-terminal states in a line with terminals on both ends; reward -1
/// entering the left terminal, +1 entering the right, zero elsewhere.
/// Undiscounted episodic, starting from the middle state. The behavior policy
/// moves left/right with probability 1/2 each, the target policy with 0.4/0.6.
pub fn random_walk(features: RandomWalkFeatures) -> Result<MdpSpec, Error> {
    let n = 7; // 0 = left terminal, 1..=5 = chain, 6 = right terminal
    let n_actions = 2; // 0 = left, 1 = right
    let mut transition = vec![vec![vec![0.0; n]; n_actions]; n];
    let mut reward = vec![vec![0.0; n_actions]; n];
    for s in 1..=5 {
        transition[s][0][s - 1] = 1.0;
        transition[s][1][s + 1] = 1.0;
    }
    reward[1][0] = -1.0;
    reward[5][1] = 1.0;
    for t in [0, 6] {
        transition[t][0][t] = 1.0;
        transition[t][1][t] = 1.0;
    }

    let feats: Vec<Vec<f64>> = match features {
        RandomWalkFeatures::Tabular => {
            (1..=5).map(|s| (0..5).map(|j| if j == s - 1 { 1.0 } else { 0.0 }).collect()).collect()
        }
        RandomWalkFeatures::Dependent => {
            let r2 = std::f64::consts::FRAC_1_SQRT_2;
            let r3 = 1.0 / 3.0f64.sqrt();
            vec![
                vec![1.0, 0.0, 0.0],
                vec![r2, r2, 0.0],
                vec![r3, r3, r3],
                vec![0.0, r2, r2],
                vec![0.0, 0.0, 1.0],
            ]
        }
        RandomWalkFeatures::Inverted => {
            // One-cold rows scaled to unit Euclidean norm.
            (1..=5)
                .map(|s| (0..5).map(|j| if j == s - 1 { 0.0 } else { 0.5 }).collect())
                .collect()
        }
    };
    let d = feats[0].len();
    let mut all_feats = vec![vec![0.0; d]; n];
    for (s, f) in feats.into_iter().enumerate() {
        all_feats[s + 1] = f;
    }

    let mut start_dist = vec![0.0; n];
    start_dist[3] = 1.0;

    let name = match features {
        RandomWalkFeatures::Tabular => "random-walk-tabular",
        RandomWalkFeatures::Dependent => "random-walk-dependent",
        RandomWalkFeatures::Inverted => "random-walk-inverted",
    };

    MdpSpec {
        name: name.to_string(),
        n_states: n,
        n_actions,
        transition,
        reward,
        gamma: 1.0,
        behavior: vec![vec![0.5, 0.5]; n],
        target: vec![vec![0.4, 0.6]; n],
        features: all_feats,
        start_dist,
        terminal: (0..n).map(|s| s == 0 || s == 6).collect(),
        sampling: SamplingMode::Trajectory,
    }
    .validate()
}

/// The 13-state aliased chain. Indices run toward the absorbing end: from
/// state `i >= 2` the agent hops to `i-1` with reward -2 or to `i-2` with
/// reward -3, each with probability 1/2; state 1 moves deterministically to
/// the absorbing state with reward 0. Episodes start at state 13. On-policy
/// (both hop choices equally likely under behavior and target), undiscounted,
/// with 4-dimensional features interpolating between one-hot anchors at
/// states 13, 9, 5, and 1.
pub fn boyan_chain() -> Result<MdpSpec, Error> {
    let n = 14; // 0 = absorbing, 1..=13 = chain
    let n_actions = 2; // 0 = single hop (-2), 1 = double hop (-3)
    let mut transition = vec![vec![vec![0.0; n]; n_actions]; n];
    let mut reward = vec![vec![0.0; n_actions]; n];
    for s in 2..=13 {
        transition[s][0][s - 1] = 1.0;
        reward[s][0] = -2.0;
        transition[s][1][s.saturating_sub(2)] = 1.0;
        reward[s][1] = -3.0;
    }
    // State 1: both actions absorb with reward 0.
    transition[1][0][0] = 1.0;
    transition[1][1][0] = 1.0;
    transition[0][0][0] = 1.0;
    transition[0][1][0] = 1.0;

    let mut features = vec![vec![0.0; 4]; n];
    for s in 1..=13 {
        // Position between anchors 13, 9, 5, 1.
        let p = (13 - s) as f64 / 4.0;
        let k = p.floor() as usize;
        let frac = p - k as f64;
        features[s][k] = 1.0 - frac;
        if frac > 0.0 {
            features[s][k + 1] = frac;
        }
    }

    let mut start_dist = vec![0.0; n];
    start_dist[13] = 1.0;

    MdpSpec {
        name: "boyan".to_string(),
        n_states: n,
        n_actions,
        transition,
        reward,
        gamma: 1.0,
        behavior: vec![vec![0.5, 0.5]; n],
        target: vec![vec![0.5, 0.5]; n],
        features,
        start_dist,
        terminal: (0..n).map(|s| s == 0).collect(),
        sampling: SamplingMode::Trajectory,
    }
    .validate()
}

/// Behavior policy variant for the star counterexample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BairdBehavior {
    /// Solid and dashed actions equally likely.
    #[default]
    Equiprobable,
    /// The original counterexample's 1/7 solid, 6/7 dashed split.
    Classic,
}

/// Baird's star counterexample: 7 states, a solid action jumping to state 7
/// and a dashed action scattering uniformly over states 1-6, zero reward
/// everywhere, discount 0.99, continuing with i.i.d. uniform states. The
/// target policy always takes the solid action. Features are the standard
/// `2 e_i + e_8` construction with `e_7 + 2 e_8` for state 7; they are
/// linearly independent and realize the true value function (zero) exactly.
pub fn baird_star(behavior: BairdBehavior) -> Result<MdpSpec, Error> {
    let n = 7;
    let n_actions = 2; // 0 = solid, 1 = dashed
    let mut transition = vec![vec![vec![0.0; n]; n_actions]; n];
    for s in 0..n {
        transition[s][0][6] = 1.0;
        for s2 in 0..6 {
            transition[s][1][s2] = 1.0 / 6.0;
        }
    }

    let mut features = vec![vec![0.0; 8]; n];
    for s in 0..6 {
        features[s][s] = 2.0;
        features[s][7] = 1.0;
    }
    features[6][6] = 1.0;
    features[6][7] = 2.0;

    let behavior_row = match behavior {
        BairdBehavior::Equiprobable => vec![0.5, 0.5],
        BairdBehavior::Classic => vec![1.0 / 7.0, 6.0 / 7.0],
    };

    MdpSpec {
        name: "baird".to_string(),
        n_states: n,
        n_actions,
        transition,
        reward: vec![vec![0.0; n_actions]; n],
        gamma: 0.99,
        behavior: vec![behavior_row; n],
        target: vec![vec![1.0, 0.0]; n],
        features,
        start_dist: vec![1.0 / n as f64; n],
        terminal: vec![false; n],
        sampling: SamplingMode::Iid,
    }
    .validate()
}

/// The standard warm-start parameter vector for the star counterexample.
pub fn baird_initial_theta() -> Vec<f64> {
    vec![1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 10.0]
}
