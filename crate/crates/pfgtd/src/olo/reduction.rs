//! Feasible sets and the constraint-set reduction: projection plus a
//! distance-penalty surrogate that lets an unconstrained learner respect a
//! compact domain.

use serde::Serialize;

/// Euclidean ball `{x : ||x - center|| <= radius}`.
#[derive(Debug, Clone, Serialize)]
pub struct L2Ball {
    pub radius: f64,
    pub center: Vec<f64>,
}

impl L2Ball {
    /// Origin-centered ball.
    pub fn new(radius: f64, dim: usize) -> Self {
        assert!(radius > 0.0, "ball radius must be positive");
        L2Ball { radius, center: vec![0.0; dim] }
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.dist_to_center(x) <= self.radius * (1.0 + super::CONTRACT_SLACK)
    }

    fn dist_to_center(&self, x: &[f64]) -> f64 {
        x.iter().zip(&self.center).map(|(a, c)| (a - c) * (a - c)).sum::<f64>().sqrt()
    }

    pub fn project(&self, x: &[f64]) -> Vec<f64> {
        let mut out = x.to_vec();
        self.project_in_place(&mut out);
        out
    }

    pub fn project_in_place(&self, x: &mut [f64]) {
        // Rescaling can leave the recomputed norm an ulp above the radius;
        // deflate until it is inside so projecting twice is bitwise identity.
        for _ in 0..8 {
            let d = self.dist_to_center(x);
            if d <= self.radius {
                return;
            }
            let t = self.radius / d;
            for (xi, c) in x.iter_mut().zip(&self.center) {
                *xi = c + (*xi - c) * t;
            }
        }
    }
}

/// Surrogate subgradient of the constraint-set reduction, given the proposed
/// (possibly infeasible) point, its projection, and the subgradient observed
/// at the projection.
///
/// When the proposal is feasible, or moving from the projection toward the
/// proposal does not decrease the linear loss, the subgradient passes through
/// untouched. Otherwise the component along the outward direction is removed,
/// which both shrinks the norm and adds the distance penalty required by the
/// reduction's regret guarantee. The degenerate `proposed == played` case
/// feeds the gradient unchanged.
pub fn constraint_feedback(
    set: &L2Ball,
    proposed: &[f64],
    played: &[f64],
    grad: &[f64],
    out: &mut Vec<f64>,
) {
    let _ = set;
    out.clear();
    out.extend_from_slice(grad);

    let mut dist_sq = 0.0;
    for (p, q) in proposed.iter().zip(played) {
        dist_sq += (p - q) * (p - q);
    }
    if dist_sq == 0.0 {
        return;
    }
    let dist = dist_sq.sqrt();
    // <g, proposed - played> >= 0: no penalty.
    let mut along = 0.0;
    for ((p, q), g) in proposed.iter().zip(played).zip(grad) {
        along += g * (p - q);
    }
    if along >= 0.0 {
        return;
    }
    // fed = g - <g, w~> * grad S(proposed), with grad S = w~ for the ball.
    let coeff = along / dist; // <g, w~>
    for ((o, p), q) in out.iter_mut().zip(proposed).zip(played) {
        *o -= coeff * (p - q) / dist;
    }
}

/// Full constraint-set reduction step: project the proposal and derive the
/// surrogate subgradient. Returns `(played, fed)`.
pub fn constraint_set_reduce(
    set: &L2Ball,
    proposed: &[f64],
    grad: &[f64],
) -> (Vec<f64>, Vec<f64>) {
    let played = set.project(proposed);
    let mut fed = Vec::new();
    constraint_feedback(set, proposed, &played, grad, &mut fed);
    (played, fed)
}
