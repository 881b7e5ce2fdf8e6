//! Linear-regret accounting for the two online learners, evaluable against
//! any comparator after the fact.

use crate::linalg::dot;

/// Accumulates `sum_t <g_t, z_t>` and `sum_t g_t` per side, which is enough
/// to evaluate `R_T(u) = sum_t <g_t, z_t - u>` for every comparator `u`
/// after the run.
#[derive(Debug, Clone)]
pub struct RegretTracker {
    theta_loss: f64,
    theta_grad_sum: Vec<f64>,
    y_loss: f64,
    y_grad_sum: Vec<f64>,
    steps: u64,
}

impl RegretTracker {
    pub fn new(dim: usize) -> Self {
        RegretTracker {
            theta_loss: 0.0,
            theta_grad_sum: vec![0.0; dim],
            y_loss: 0.0,
            y_grad_sum: vec![0.0; dim],
            steps: 0,
        }
    }

    pub fn record(&mut self, g_theta: &[f64], theta: &[f64], g_y: &[f64], y: &[f64]) {
        self.theta_loss += dot(g_theta, theta);
        self.y_loss += dot(g_y, y);
        for i in 0..self.theta_grad_sum.len() {
            self.theta_grad_sum[i] += g_theta[i];
            self.y_grad_sum[i] += g_y[i];
        }
        self.steps += 1;
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// Primary-side regret against a fixed comparator.
    pub fn regret_theta(&self, comparator: &[f64]) -> f64 {
        self.theta_loss - dot(&self.theta_grad_sum, comparator)
    }

    /// Dual-side regret against a fixed comparator.
    pub fn regret_y(&self, comparator: &[f64]) -> f64 {
        self.y_loss - dot(&self.y_grad_sum, comparator)
    }

    /// Joint regret against a comparator pair.
    pub fn regret_joint(&self, theta_cmp: &[f64], y_cmp: &[f64]) -> f64 {
        self.regret_theta(theta_cmp) + self.regret_y(y_cmp)
    }
}
