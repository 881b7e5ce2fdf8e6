//! Exact expectation matrices and the saddle point for a finite MDP under
//! its off-policy data distribution.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use serde::Serialize;

use crate::envs::{MdpSpec, SamplingMode};
use crate::{Error, Objective};

const XI_TOL: f64 = 1e-12;
const SOLVE_TOL: f64 = 1e-10;
/// Relative eigenvalue cutoff below which the metric is treated as
/// rank-deficient.
const RANK_TOL: f64 = 1e-12;

/// Applies `M^{-1}`: a Cholesky factorization when `M` is positive definite,
/// otherwise the eigendecomposition pseudo-inverse restricted to the feature
/// span. The rank-deficient path arises by design in the star counterexample,
/// whose 7 states carry 8 features.
enum MetricSolver {
    Chol(Cholesky<f64, Dyn>),
    Pinv { basis: DMatrix<f64>, inv_eigs: DVector<f64> },
}

impl MetricSolver {
    fn new(m: &DMatrix<f64>) -> Self {
        if let Some(chol) = m.clone().cholesky() {
            return MetricSolver::Chol(chol);
        }
        let eig = m.clone().symmetric_eigen();
        let lambda_max = eig.eigenvalues.iter().fold(0.0f64, |acc, &x| acc.max(x));
        let inv_eigs = eig.eigenvalues.map(|l| {
            if l > RANK_TOL * lambda_max.max(f64::MIN_POSITIVE) {
                1.0 / l
            } else {
                0.0
            }
        });
        MetricSolver::Pinv { basis: eig.eigenvectors, inv_eigs }
    }

    fn solve(&self, v: &DVector<f64>) -> DVector<f64> {
        match self {
            MetricSolver::Chol(chol) => chol.solve(v),
            MetricSolver::Pinv { basis, inv_eigs } => {
                let coords = basis.transpose() * v;
                basis * coords.component_mul(inv_eigs)
            }
        }
    }

    /// True when `v` lies in the span the solver can invert on.
    fn in_range(&self, m: &DMatrix<f64>, v: &DVector<f64>) -> bool {
        let reconstructed = m * self.solve(v);
        (reconstructed - v).norm() <= SOLVE_TOL * v.norm().max(1.0)
    }
}

/// Closed-form model of the policy-evaluation problem: the expectation
/// matrices, the state distribution of the data stream, and the saddle
/// point. Immutable and shareable across parallel runs.
pub struct ExactModel {
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
    pub c: DMatrix<f64>,
    pub m: DMatrix<f64>,
    /// Stationary state distribution of the data stream (zero at terminals).
    pub xi: DVector<f64>,
    pub theta_star: DVector<f64>,
    pub y_star: DVector<f64>,
    pub lambda_max_m: f64,
    pub objective: Objective,
    pub gamma: f64,
    m_solver: MetricSolver,
}

impl ExactModel {
    pub fn dim(&self) -> usize {
        self.b.len()
    }

    /// `sqrt((b - A theta)^T M^{-1} (b - A theta))`.
    pub fn rmspbe(&self, theta: &[f64]) -> f64 {
        let th = DVector::from_column_slice(theta);
        let r = &self.b - &self.a * th;
        let minv_r = self.m_solver.solve(&r);
        r.dot(&minv_r).max(0.0).sqrt()
    }

    /// Applies `M^{-1}` through the cached factorization.
    pub fn m_inv(&self, v: &DVector<f64>) -> DVector<f64> {
        self.m_solver.solve(v)
    }

    /// True expected subgradients of the saddle objective at `(theta, y)`:
    /// `(-A^T y, A theta - b + M y)`.
    pub fn exact_subgradients(&self, theta: &[f64], y: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let th = DVector::from_column_slice(theta);
        let yv = DVector::from_column_slice(y);
        let g_theta = -(self.a.transpose() * &yv);
        let g_y = &self.a * th - &self.b + &self.m * yv;
        (g_theta.as_slice().to_vec(), g_y.as_slice().to_vec())
    }

    /// Serializable snapshot for external verification.
    pub fn dump(&self, name: &str) -> ModelDump {
        ModelDump {
            environment: name.to_string(),
            objective: self.objective,
            gamma: self.gamma,
            a: to_rows(&self.a),
            b: self.b.as_slice().to_vec(),
            c: to_rows(&self.c),
            theta_star: self.theta_star.as_slice().to_vec(),
            y_star: self.y_star.as_slice().to_vec(),
            xi: self.xi.as_slice().to_vec(),
            lambda_max_m: self.lambda_max_m,
        }
    }
}

fn to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

/// JSON-friendly dump of an [`ExactModel`].
#[derive(Debug, Clone, Serialize)]
pub struct ModelDump {
    pub environment: String,
    pub objective: Objective,
    pub gamma: f64,
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub c: Vec<Vec<f64>>,
    pub theta_star: Vec<f64>,
    pub y_star: Vec<f64>,
    pub xi: Vec<f64>,
    pub lambda_max_m: f64,
}

/// State distribution of the data stream: the start distribution itself for
/// i.i.d. sampling, otherwise the stationary distribution of the behavior
/// chain with terminal transitions redirected through the start distribution
/// (power iteration to 1e-12 in L1).
fn stream_distribution(spec: &MdpSpec) -> Result<DVector<f64>, Error> {
    let n = spec.n_states;
    if spec.sampling == SamplingMode::Iid {
        return Ok(DVector::from_column_slice(&spec.start_dist));
    }
    // Restart-augmented behavior chain over non-terminal states.
    let mut q = vec![vec![0.0; n]; n];
    for s in spec.non_terminal_states() {
        for a in 0..spec.n_actions {
            let pa = spec.behavior[s][a];
            if pa == 0.0 {
                continue;
            }
            for (s2, &p) in spec.transition[s][a].iter().enumerate() {
                if p == 0.0 {
                    continue;
                }
                if spec.terminal[s2] {
                    for (u, &start) in spec.start_dist.iter().enumerate() {
                        q[s][u] += pa * p * start;
                    }
                } else {
                    q[s][s2] += pa * p;
                }
            }
        }
    }
    let mut xi = spec.start_dist.clone();
    let mut next = vec![0.0; n];
    for _ in 0..1_000_000 {
        next.iter_mut().for_each(|x| *x = 0.0);
        for s in 0..n {
            if xi[s] == 0.0 {
                continue;
            }
            for u in 0..n {
                next[u] += xi[s] * q[s][u];
            }
        }
        let diff: f64 = xi.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut xi, &mut next);
        if diff <= XI_TOL {
            return Ok(DVector::from_column_slice(&xi));
        }
    }
    Err(Error::Construction(format!(
        "{}: stream distribution power iteration did not converge",
        spec.name
    )))
}

/// Builds the exact model. Fails loudly when the non-singularity assumption
/// is violated (singular `A` or `C`).
pub fn build_exact_model(spec: &MdpSpec, objective: Objective) -> Result<ExactModel, Error> {
    let d = spec.dim();
    let xi = stream_distribution(spec)?;

    let mut a = DMatrix::<f64>::zeros(d, d);
    let mut b = DVector::<f64>::zeros(d);
    let mut c = DMatrix::<f64>::zeros(d, d);

    for s in spec.non_terminal_states() {
        let w_s = xi[s];
        if w_s == 0.0 {
            continue;
        }
        let phi = DVector::from_column_slice(&spec.features[s]);
        c += w_s * &phi * phi.transpose();
        for act in 0..spec.n_actions {
            let pa = spec.behavior[s][act];
            if pa == 0.0 {
                continue;
            }
            let rho = spec.rho(s, act);
            if rho == 0.0 {
                continue;
            }
            let w = w_s * pa * rho;
            // E[phi(s') | s, a] with terminal features identically zero.
            let mut ephi_next = DVector::<f64>::zeros(d);
            for (s2, &p) in spec.transition[s][act].iter().enumerate() {
                if p > 0.0 {
                    for j in 0..d {
                        ephi_next[j] += p * spec.features[s2][j];
                    }
                }
            }
            let diff = &phi - spec.gamma * ephi_next;
            a += w * &phi * diff.transpose();
            b += w * spec.reward[s][act] * &phi;
        }
    }

    let m = match objective {
        Objective::Mspbe => c.clone(),
        Objective::Neu => DMatrix::identity(d, d),
    };

    let m_solver = MetricSolver::new(&m);
    if !m_solver.in_range(&m, &b) {
        return Err(Error::Construction(format!(
            "{}: b leaves the span of the metric (non-singularity assumption violated)",
            spec.name
        )));
    }

    // theta* solves A theta = b: direct LU when A is nonsingular, otherwise
    // the minimum-norm least-squares solution on the feature span. Either way
    // the residual must vanish, failing loudly when the linear system is
    // genuinely inconsistent.
    let theta_star = match a.clone().lu().solve(&b) {
        Some(sol) if (&a * &sol - &b).norm() <= SOLVE_TOL * b.norm().max(1.0) => sol,
        _ => a
            .clone()
            .svd(true, true)
            .solve(&b, RANK_TOL)
            .map_err(|e| Error::Construction(format!("{}: {e}", spec.name)))?,
    };
    let residual = (&a * &theta_star - &b).norm();
    if residual > SOLVE_TOL {
        return Err(Error::Construction(format!(
            "{}: no solution to A theta* = b (residual {residual}); \
             non-singularity assumption violated",
            spec.name
        )));
    }
    let y_star = m_solver.solve(&(&b - &a * &theta_star));

    let lambda_max_m = m
        .clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .fold(f64::NEG_INFINITY, |acc, &x| acc.max(x));

    Ok(ExactModel {
        a,
        b,
        c,
        m,
        xi,
        theta_star,
        y_star,
        lambda_max_m,
        objective,
        gamma: spec.gamma,
        m_solver,
    })
}

/// Exact state values under the target policy (zero at terminals), from the
/// Bellman solve `(I - gamma P^pi) v = r^pi` restricted to non-terminal
/// states.
pub fn exact_values(spec: &MdpSpec) -> Result<Vec<f64>, Error> {
    let states: Vec<usize> = spec.non_terminal_states().collect();
    let k = states.len();
    let index: std::collections::HashMap<usize, usize> =
        states.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let mut system = DMatrix::<f64>::identity(k, k);
    let mut r = DVector::<f64>::zeros(k);
    for (i, &s) in states.iter().enumerate() {
        for a in 0..spec.n_actions {
            let pa = spec.target[s][a];
            if pa == 0.0 {
                continue;
            }
            r[i] += pa * spec.reward[s][a];
            for (s2, &p) in spec.transition[s][a].iter().enumerate() {
                if p > 0.0 && !spec.terminal[s2] {
                    system[(i, index[&s2])] -= spec.gamma * pa * p;
                }
            }
        }
    }
    let v = system
        .lu()
        .solve(&r)
        .ok_or_else(|| Error::Construction(format!("{}: Bellman system is singular", spec.name)))?;
    let mut full = vec![0.0; spec.n_states];
    for (i, &s) in states.iter().enumerate() {
        full[s] = v[i];
    }
    Ok(full)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envs::{
        baird_star, boyan_chain, by_name, random_walk, BairdBehavior, EnvOptions,
        RandomWalkFeatures, ENVIRONMENT_NAMES,
    };

    fn all_mdps() -> Vec<MdpSpec> {
        ENVIRONMENT_NAMES
            .iter()
            .filter(|n| **n != "multi-scale")
            .map(|n| by_name(n, &EnvOptions::default()).unwrap().as_mdp().unwrap().clone())
            .collect()
    }

    #[test]
    fn saddle_point_identities_hold_everywhere() {
        for spec in all_mdps() {
            let model = build_exact_model(&spec, Objective::Mspbe).unwrap();
            assert!(
                model.rmspbe(model.theta_star.as_slice()) < 1e-10,
                "{}: rmspbe(theta*) must vanish",
                spec.name
            );
            assert!(model.y_star.norm() < 1e-10, "{}: y* must vanish", spec.name);
            let xi_sum: f64 = model.xi.iter().sum();
            assert!((xi_sum - 1.0).abs() < 1e-9, "{}: xi must normalize", spec.name);
            assert!(model.xi.iter().all(|&p| p >= 0.0));
        }
    }

    #[test]
    fn baird_has_zero_reward_vector_and_zero_solution() {
        let spec = baird_star(BairdBehavior::Equiprobable).unwrap();
        let model = build_exact_model(&spec, Objective::Mspbe).unwrap();
        assert_eq!(model.b.norm(), 0.0);
        assert!(model.theta_star.norm() < 1e-12);
        assert_eq!(model.rmspbe(&[0.0; 8]), 0.0);
        // Uniform state distribution under the i.i.d. data model.
        for s in 0..7 {
            assert!((model.xi[s] - 1.0 / 7.0).abs() < 1e-15);
        }
    }

    #[test]
    fn tabular_walk_realizes_the_bellman_fixed_point() {
        let spec = random_walk(RandomWalkFeatures::Tabular).unwrap();
        let model = build_exact_model(&spec, Objective::Mspbe).unwrap();
        let v = exact_values(&spec).unwrap();
        // v_hat = Phi theta* equals v on non-terminal states, and v satisfies
        // the Bellman equation by construction of the solve; check both.
        for s in spec.non_terminal_states() {
            let v_hat: f64 =
                spec.features[s].iter().zip(model.theta_star.iter()).map(|(a, b)| a * b).sum();
            assert!((v_hat - v[s]).abs() < 1e-10, "state {s}: {v_hat} vs {}", v[s]);
        }
        // Direct Bellman residual check.
        for s in spec.non_terminal_states() {
            let mut rhs = 0.0;
            for a in 0..spec.n_actions {
                let pa = spec.target[s][a];
                rhs += pa * spec.reward[s][a];
                for (s2, &p) in spec.transition[s][a].iter().enumerate() {
                    rhs += pa * p * spec.gamma * v[s2] * if spec.terminal[s2] { 0.0 } else { 1.0 };
                }
            }
            assert!((v[s] - rhs).abs() < 1e-10, "Bellman residual at {s}");
        }
    }

    #[test]
    fn boyan_values_follow_the_hop_recursion() {
        let spec = boyan_chain().unwrap();
        let v = exact_values(&spec).unwrap();
        assert_eq!(v[1], 0.0);
        assert!((v[2] + 2.5).abs() < 1e-12);
        assert!((v[3] + 3.75).abs() < 1e-12);
    }

    #[test]
    fn baird_true_values_vanish_under_any_reward_free_policy() {
        let spec = baird_star(BairdBehavior::Equiprobable).unwrap();
        let v = exact_values(&spec).unwrap();
        assert!(v.iter().all(|&x| x.abs() < 1e-12), "v^pi must be zero: {v:?}");
    }

    #[test]
    fn neu_mode_uses_the_identity_metric() {
        let spec = random_walk(RandomWalkFeatures::Dependent).unwrap();
        let model = build_exact_model(&spec, Objective::Neu).unwrap();
        let theta = vec![0.1, -0.2, 0.3];
        let th = DVector::from_column_slice(&theta);
        let expected = (&model.b - &model.a * th).norm();
        assert!((model.rmspbe(&theta) - expected).abs() < 1e-12);
        assert!((model.lambda_max_m - 1.0).abs() < 1e-12);
    }

    #[test]
    fn saddle_point_is_interior_to_the_default_balls() {
        // The default feasible sets are radius-100 balls; the solution must
        // sit strictly inside them for every shipped environment.
        for spec in all_mdps() {
            let model = build_exact_model(&spec, Objective::Mspbe).unwrap();
            assert!(
                model.theta_star.norm() < 100.0,
                "{}: ||theta*|| = {} not interior",
                spec.name,
                model.theta_star.norm()
            );
            assert!(model.y_star.norm() < 100.0);
        }
    }

    #[test]
    fn construction_is_deterministic_bitwise() {
        for spec in all_mdps() {
            let m1 = build_exact_model(&spec, Objective::Mspbe).unwrap();
            let m2 = build_exact_model(&spec, Objective::Mspbe).unwrap();
            assert_eq!(m1.a.as_slice(), m2.a.as_slice());
            assert_eq!(m1.b.as_slice(), m2.b.as_slice());
            assert_eq!(m1.c.as_slice(), m2.c.as_slice());
            assert_eq!(m1.theta_star.as_slice(), m2.theta_star.as_slice());
        }
    }

    #[test]
    fn lambda_max_matches_power_iteration() {
        for spec in all_mdps() {
            let model = build_exact_model(&spec, Objective::Mspbe).unwrap();
            let d = model.dim();
            let mut v = DVector::from_element(d, 1.0 / (d as f64).sqrt());
            let mut lambda = 0.0;
            for _ in 0..200_000 {
                let w = &model.m * &v;
                let next_lambda = w.norm();
                if next_lambda == 0.0 {
                    break;
                }
                v = w / next_lambda;
                if (next_lambda - lambda).abs() <= 1e-12 * next_lambda.max(1.0) {
                    lambda = next_lambda;
                    break;
                }
                lambda = next_lambda;
            }
            assert!(
                (lambda - model.lambda_max_m).abs() < 1e-8,
                "{}: power iteration {lambda} vs eigen {}",
                spec.name,
                model.lambda_max_m
            );
        }
    }

    #[test]
    fn rmspbe_vanishes_only_at_the_solution() {
        let spec = random_walk(RandomWalkFeatures::Dependent).unwrap();
        let model = build_exact_model(&spec, Objective::Mspbe).unwrap();
        assert!(model.rmspbe(model.theta_star.as_slice()) < 1e-10);
        // Any perturbation off theta* must register (A nonsingular).
        for i in 0..model.dim() {
            let mut theta = model.theta_star.as_slice().to_vec();
            theta[i] += 0.01;
            assert!(model.rmspbe(&theta) > 1e-6, "perturbation {i} invisible");
        }
    }
}
