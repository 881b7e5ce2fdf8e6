//! Adaptive gradient descent on the unit ball: the direction component of the
//! dimension-free reduction.

use crate::linalg;

/// Online gradient descent over `{x : ||x|| <= 1}` with step sizes
/// `sqrt(2) / (2 sqrt(sum of ||g||^2))`, including the current gradient in
/// the denominator.
#[derive(Debug, Clone)]
pub struct UnitBallGd {
    point: Vec<f64>,
    grad_sq_sum: f64,
}

impl UnitBallGd {
    /// Starts at the origin, which is inside the ball and makes the first
    /// play side-effect free.
    pub fn new(dim: usize) -> Self {
        UnitBallGd { point: vec![0.0; dim], grad_sq_sum: 0.0 }
    }

    /// Warm start from a given direction (must lie in the unit ball).
    pub fn with_point(point: Vec<f64>) -> Self {
        assert!(
            linalg::norm(&point) <= 1.0 + super::CONTRACT_SLACK,
            "initial direction must lie in the unit ball"
        );
        UnitBallGd { point, grad_sq_sum: 0.0 }
    }

    pub fn point(&self) -> &[f64] {
        &self.point
    }

    pub fn grad_sq_sum(&self) -> f64 {
        self.grad_sq_sum
    }

    pub fn step(&mut self, grad: &[f64]) {
        debug_assert_eq!(grad.len(), self.point.len());
        self.grad_sq_sum += linalg::norm_sq(grad);
        if self.grad_sq_sum == 0.0 {
            // No curvature information yet; the step size is undefined.
            return;
        }
        let eta = std::f64::consts::SQRT_2 / (2.0 * self.grad_sq_sum.sqrt());
        linalg::axpy(-eta, grad, &mut self.point);
        let n = linalg::norm(&self.point);
        if n > 1.0 {
            linalg::scale(1.0 / n, &mut self.point);
        }
    }
}
