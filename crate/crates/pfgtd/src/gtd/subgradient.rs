//! Stochastic subgradients of the saddle-point objective
//! `L(theta, y) = <b - A theta, y> - 1/2 ||y||^2_M`, evaluated with rank-one
//! products only — the per-sample matrices are never materialized, keeping
//! each step O(d).

use super::TransitionSample;
use crate::linalg::dot;
use crate::Objective;

/// The pair `(g_theta, g_y)` fed to the two online learners. The joint norm
/// convention is `||(g_theta, g_y)|| = sqrt(||g_theta||^2 + ||g_y||^2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubgradientPair {
    pub g_theta: Vec<f64>,
    pub g_y: Vec<f64>,
}

impl SubgradientPair {
    pub fn joint_norm(&self) -> f64 {
        (crate::linalg::norm_sq(&self.g_theta) + crate::linalg::norm_sq(&self.g_y)).sqrt()
    }
}

/// Computes
///
/// - `g_theta = -rho * <phi, y> * (phi - gamma phi')`
/// - `g_y     = -rho * r * phi + rho * <phi - gamma phi', theta> * phi + M_t y`
///
/// where `M_t y` is `<phi, y> * phi` for the MSPBE objective and `y` itself
/// for NEU.
pub fn make_subgradients(
    sample: &TransitionSample,
    gamma: f64,
    objective: Objective,
    theta: &[f64],
    y: &[f64],
) -> SubgradientPair {
    let d = sample.dim();
    assert_eq!(theta.len(), d, "theta dimension mismatch");
    assert_eq!(y.len(), d, "y dimension mismatch");
    assert_eq!(sample.phi_next.len(), d, "phi' dimension mismatch");

    let rho = sample.rho;
    let phi = &sample.phi;
    let phi_next = &sample.phi_next;

    let phi_dot_y = dot(phi, y);
    let mut g_theta = vec![0.0; d];
    for i in 0..d {
        g_theta[i] = -rho * phi_dot_y * (phi[i] - gamma * phi_next[i]);
    }

    // td_dual = <phi - gamma phi', theta>
    let td_dual = dot(phi, theta) - gamma * dot(phi_next, theta);
    let mut g_y = vec![0.0; d];
    match objective {
        Objective::Mspbe => {
            for i in 0..d {
                g_y[i] = -rho * sample.reward * phi[i] + rho * td_dual * phi[i] + phi_dot_y * phi[i];
            }
        }
        Objective::Neu => {
            for i in 0..d {
                g_y[i] = -rho * sample.reward * phi[i] + rho * td_dual * phi[i] + y[i];
            }
        }
    }

    SubgradientPair { g_theta, g_y }
}

/// Almost-sure norm bounds on the stochastic subgradients over a ball of
/// radius `big_d`, given the environment constants `rho_max`, feature bound
/// `l`, reward bound `r_max`, feature dimension `d`, and discount `gamma`:
///
/// - `G_theta = D (1 + gamma) rho_max d L^2`
/// - `G_y     = rho_max R_max sqrt(d) L + d L^2 D ((1 + gamma) rho_max + 1)`
pub fn stochastic_gradient_bounds(
    big_d: f64,
    rho_max: f64,
    l: f64,
    r_max: f64,
    d: usize,
    gamma: f64,
) -> (f64, f64) {
    let df = d as f64;
    let g_theta = big_d * (1.0 + gamma) * rho_max * df * l * l;
    let g_y = rho_max * r_max * df.sqrt() * l + df * l * l * big_d * ((1.0 + gamma) * rho_max + 1.0);
    (g_theta, g_y)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn basis(d: usize, i: usize) -> Vec<f64> {
        let mut v = vec![0.0; d];
        v[i] = 1.0;
        v
    }

    #[test]
    fn zero_parameters_leave_only_the_reward_term() {
        let sample = TransitionSample {
            phi: vec![0.3, 0.7],
            phi_next: vec![0.1, 0.0],
            reward: 2.0,
            rho: 1.5,
        };
        let g = make_subgradients(&sample, 0.9, Objective::Mspbe, &[0.0, 0.0], &[0.0, 0.0]);
        assert_eq!(g.g_theta, vec![0.0, 0.0]);
        assert_eq!(g.g_y, vec![-1.5 * 2.0 * 0.3, -1.5 * 2.0 * 0.7]);
    }

    #[test]
    fn hand_evaluated_rank_one_products() {
        // phi = e1, phi' = e2, gamma = 0.9, rho = 2, r = 1, theta = 0, y = e1.
        let d = 4;
        let sample = TransitionSample {
            phi: basis(d, 0),
            phi_next: basis(d, 1),
            reward: 1.0,
            rho: 2.0,
        };
        let g =
            make_subgradients(&sample, 0.9, Objective::Mspbe, &vec![0.0; d], &basis(d, 0));
        assert_eq!(g.g_theta, vec![-2.0, 1.8, 0.0, 0.0]);
        assert_eq!(g.g_y, vec![-1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn neu_mode_swaps_the_metric_term() {
        let sample = TransitionSample {
            phi: vec![1.0, 0.0],
            phi_next: vec![0.0, 0.0],
            reward: 0.0,
            rho: 1.0,
        };
        let y = vec![0.25, -0.5];
        let g_mspbe = make_subgradients(&sample, 0.9, Objective::Mspbe, &[0.0, 0.0], &y);
        let g_neu = make_subgradients(&sample, 0.9, Objective::Neu, &[0.0, 0.0], &y);
        // MSPBE: <phi, y> phi = 0.25 e1; NEU: y itself.
        assert_eq!(g_mspbe.g_y, vec![0.25, 0.0]);
        assert_eq!(g_neu.g_y, vec![0.25, -0.5]);
    }

    #[test]
    #[should_panic(expected = "dimension mismatch")]
    fn dimension_mismatch_is_rejected() {
        let sample = TransitionSample::zeros(3);
        make_subgradients(&sample, 0.9, Objective::Mspbe, &[0.0; 2], &[0.0; 3]);
    }
}
