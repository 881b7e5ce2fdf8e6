//! Synthetic multi-scale prediction task: several on-policy Markov reward
//! streams over a shared state chain, with per-signal reward magnitudes
//! spanning orders of magnitude. A desk-scale stand-in for large sensor
//! prediction workloads, exercised through the SMAPE metric.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use serde::Serialize;

/// Configuration of the multi-scale stream.
#[derive(Debug, Clone, Serialize)]
pub struct MultiScaleSpec {
    pub name: String,
    /// Number of prediction signals.
    pub n_signals: usize,
    /// Per-signal reward magnitude.
    pub scales: Vec<f64>,
    /// Per-signal additive noise standard deviation (absolute units).
    pub noise: Vec<f64>,
    /// Discount for the predicted returns.
    pub gamma: f64,
    /// States in the underlying ring chain.
    pub n_states: usize,
}

impl Default for MultiScaleSpec {
    fn default() -> Self {
        // Signals spanning seven orders of magnitude with 10% relative noise.
        let scales: Vec<f64> = (0..7).map(|i| 10f64.powi(i)).collect();
        let noise = scales.iter().map(|s| 0.1 * s).collect();
        MultiScaleSpec {
            name: "multi-scale".to_string(),
            n_signals: scales.len(),
            scales,
            noise,
            gamma: 0.9875,
            n_states: 8,
        }
    }
}

impl MultiScaleSpec {
    pub fn with_signals(scales: Vec<f64>, noise: Vec<f64>, gamma: f64) -> Self {
        assert!(!scales.is_empty() && scales.len() == noise.len());
        MultiScaleSpec {
            name: "multi-scale".to_string(),
            n_signals: scales.len(),
            scales,
            noise,
            gamma,
            n_states: 8,
        }
    }

    /// Feature dimensionality (tabular over the ring states).
    pub fn dim(&self) -> usize {
        self.n_states
    }

    /// Baseline reward level for a ring state, in [0.5, 1.5].
    pub fn base_reward(&self, state: usize) -> f64 {
        0.5 + state as f64 / (self.n_states - 1) as f64
    }
}

/// A sampled stream: the visited states and the per-step reward of every
/// signal.
#[derive(Debug, Clone)]
pub struct MultiScaleStream {
    pub states: Vec<usize>,
    /// `rewards[signal][step]`
    pub rewards: Vec<Vec<f64>>,
    pub gamma: f64,
    pub n_states: usize,
}

impl MultiScaleStream {
    /// One-hot features of the visited state at `step`.
    pub fn features(&self, step: usize) -> Vec<f64> {
        let mut phi = vec![0.0; self.n_states];
        phi[self.states[step]] = 1.0;
        phi
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

/// Samples `n_steps` of the stream. The chain advances around the ring with
/// probability 0.9 and stays put otherwise; signal `k` pays
/// `scale_k * base(state) + noise_k * N(0,1)` each step.
pub fn multi_scale_stream(spec: &MultiScaleSpec, seed: u64, n_steps: usize) -> MultiScaleStream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = 0usize;
    let mut states = Vec::with_capacity(n_steps);
    let mut rewards = vec![Vec::with_capacity(n_steps); spec.n_signals];
    for _ in 0..n_steps {
        states.push(state);
        let base = spec.base_reward(state);
        for (k, row) in rewards.iter_mut().enumerate() {
            let eps: f64 = if spec.noise[k] > 0.0 {
                StandardNormal.sample(&mut rng)
            } else {
                0.0
            };
            row.push(spec.scales[k] * base + spec.noise[k] * eps);
        }
        let u: f64 = rng.random();
        if u < 0.9 {
            state = (state + 1) % spec.n_states;
        }
    }
    MultiScaleStream { states, rewards, gamma: spec.gamma, n_states: spec.n_states }
}
