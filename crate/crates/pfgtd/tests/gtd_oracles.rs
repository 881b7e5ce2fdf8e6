//! Independent oracles for the solver layer: enumeration of the transition
//! distribution against the exact model, a matrix-form projected-Bellman
//!-error computation, almost-sure gradient bounds, and iterate invariants.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use pfgtd::envs::{by_name, EnvOptions, MdpSpec, Sampler, ENVIRONMENT_NAMES};
use pfgtd::gtd::{
    make_subgradients, saddle_learner, stochastic_gradient_bounds, PfVariant, SaddleConfig,
    TransitionSample,
};
use pfgtd::linalg::norm;
use pfgtd::metrics::build_exact_model;
use pfgtd::Objective;

fn mdp_specs() -> Vec<MdpSpec> {
    ENVIRONMENT_NAMES
        .iter()
        .filter(|n| **n != "multi-scale")
        .map(|n| by_name(n, &EnvOptions::default()).unwrap().as_mdp().unwrap().clone())
        .collect()
}

fn random_ball_point(rng: &mut ChaCha8Rng, dim: usize, radius: f64) -> Vec<f64> {
    let mut v: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
    let n = norm(&v);
    if n > 0.0 {
        let target: f64 = rng.random_range(0.0..radius);
        v.iter_mut().for_each(|x| *x *= target / n);
    }
    v
}

/// Averaging the stochastic subgradients over the exact transition
/// distribution must reproduce the true subgradients `(-A^T y, A theta - b +
/// C y)` of the saddle objective.
#[test]
fn subgradients_are_unbiased_under_the_exact_distribution() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for spec in mdp_specs() {
        let model = build_exact_model(&spec, Objective::Mspbe).unwrap();
        let d = spec.dim();
        for _ in 0..3 {
            let theta = random_ball_point(&mut rng, d, 2.0);
            let y = random_ball_point(&mut rng, d, 2.0);

            let mut g_theta_mean = vec![0.0; d];
            let mut g_y_mean = vec![0.0; d];
            for s in spec.non_terminal_states() {
                for a in 0..spec.n_actions {
                    for s2 in 0..spec.n_states {
                        let w = model.xi[s] * spec.behavior[s][a] * spec.transition[s][a][s2];
                        if w == 0.0 {
                            continue;
                        }
                        let sample = spec.sample_for(s, a, s2);
                        let g = make_subgradients(&sample, spec.gamma, Objective::Mspbe, &theta, &y);
                        for i in 0..d {
                            g_theta_mean[i] += w * g.g_theta[i];
                            g_y_mean[i] += w * g.g_y[i];
                        }
                    }
                }
            }

            let (g_theta_exact, g_y_exact) = model.exact_subgradients(&theta, &y);
            for i in 0..d {
                assert!(
                    (g_theta_mean[i] - g_theta_exact[i]).abs() < 1e-10,
                    "{}: E[g_theta][{i}] = {} vs {}",
                    spec.name,
                    g_theta_mean[i],
                    g_theta_exact[i]
                );
                assert!(
                    (g_y_mean[i] - g_y_exact[i]).abs() < 1e-10,
                    "{}: E[g_y][{i}] = {} vs {}",
                    spec.name,
                    g_y_mean[i],
                    g_y_exact[i]
                );
            }
        }
    }
}

/// Matrix-form oracle: J(theta) computed from explicit feature, state
/// -distribution, and Bellman-operator matrices must match the model's
/// rank-one accumulation.
#[test]
fn rmspbe_matches_explicit_bellman_operator_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for spec in mdp_specs() {
        let model = build_exact_model(&spec, Objective::Mspbe).unwrap();
        let n = spec.n_states;
        let d = spec.dim();

        let phi = DMatrix::from_fn(n, d, |s, j| spec.features[s][j]);
        let xi = DMatrix::from_fn(n, n, |i, j| if i == j { model.xi[i] } else { 0.0 });
        let mut p_pi = DMatrix::<f64>::zeros(n, n);
        let mut r_pi = DVector::<f64>::zeros(n);
        for s in spec.non_terminal_states() {
            for a in 0..spec.n_actions {
                let pa = spec.target[s][a];
                r_pi[s] += pa * spec.reward[s][a];
                for s2 in 0..n {
                    p_pi[(s, s2)] += pa * spec.transition[s][a][s2];
                }
            }
        }

        let c = phi.transpose() * &xi * &phi;
        let c_pinv = c.clone().pseudo_inverse(1e-12).unwrap();
        for _ in 0..4 {
            let theta = DVector::from_vec(random_ball_point(&mut rng, d, 3.0));
            // Bellman residual in state space; terminal rows carry zero
            // weight through Xi.
            let v_hat = &phi * &theta;
            let residual = &r_pi + spec.gamma * &p_pi * &v_hat - &v_hat;
            let projected = phi.transpose() * &xi * residual;
            let oracle = projected.dot(&(&c_pinv * &projected)).max(0.0).sqrt();
            let fast = model.rmspbe(theta.as_slice());
            assert!(
                (oracle - fast).abs() < 1e-9 * oracle.max(1.0),
                "{}: oracle {} vs model {}",
                spec.name,
                oracle,
                fast
            );
        }
    }
}

/// The star counterexample's standard initialization has a strictly positive
/// error that the matrix oracle and the model agree on.
#[test]
fn baird_initial_error_is_positive_and_consistent() {
    let spec = by_name("baird", &EnvOptions::default()).unwrap().as_mdp().unwrap().clone();
    let model = build_exact_model(&spec, Objective::Mspbe).unwrap();
    let theta = pfgtd::envs::baird_initial_theta();
    let value = model.rmspbe(&theta);
    assert!(value > 1.0, "initial error should be well away from zero: {value}");
}

/// Closed-form almost-sure bounds on the stochastic subgradients hold for
/// in-domain parameters across every environment.
#[test]
fn stochastic_gradients_respect_closed_form_bounds() {
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    let radius = 100.0;
    for spec in mdp_specs() {
        let (g_theta_max, g_y_max) = stochastic_gradient_bounds(
            radius,
            spec.rho_max(),
            spec.feature_bound(),
            spec.reward_bound(),
            spec.dim(),
            spec.gamma,
        );
        let mut sampler = Sampler::new(&spec, 101);
        let mut sample = TransitionSample::zeros(spec.dim());
        for _ in 0..20_000 {
            sampler.next_into(&spec, &mut sample);
            let theta = random_ball_point(&mut rng, spec.dim(), radius);
            let y = random_ball_point(&mut rng, spec.dim(), radius);
            let g = make_subgradients(&sample, spec.gamma, Objective::Mspbe, &theta, &y);
            assert!(
                norm(&g.g_theta) <= g_theta_max * (1.0 + 1e-12),
                "{}: ||g_theta|| = {} exceeds {}",
                spec.name,
                norm(&g.g_theta),
                g_theta_max
            );
            assert!(
                norm(&g.g_y) <= g_y_max * (1.0 + 1e-12),
                "{}: ||g_y|| = {} exceeds {}",
                spec.name,
                norm(&g.g_y),
                g_y_max
            );
        }
    }
}

/// Parameter-free learners only ever play inside the feasible balls, and the
/// running averages satisfy the incremental-mean recurrence.
#[test]
fn played_iterates_stay_in_domain_and_averages_track_means() {
    let spec = by_name("random-walk-inverted", &EnvOptions::default())
        .unwrap()
        .as_mdp()
        .unwrap()
        .clone();
    let radius = 0.5; // deliberately tight so the projection activates
    for variant in [PfVariant::Pf, PfVariant::CwPf, PfVariant::PfPlus] {
        let cfg = SaddleConfig::new(variant, spec.dim(), spec.gamma).with_radius(radius);
        let mut learner = saddle_learner(&cfg).unwrap();
        let mut sampler = Sampler::new(&spec, 5);
        let mut sample = TransitionSample::zeros(spec.dim());
        let mut theta_sum = vec![0.0; spec.dim()];
        for t in 1..=800u64 {
            sampler.next_into(&spec, &mut sample);
            learner.step(&sample);
            let (theta_t, y_t) = learner.last_played();
            assert!(norm(theta_t) <= radius * (1.0 + 1e-12), "{variant:?} theta out of ball");
            assert!(norm(y_t) <= radius * (1.0 + 1e-12), "{variant:?} y out of ball");
            for (acc, x) in theta_sum.iter_mut().zip(theta_t) {
                *acc += x;
            }
            for (avg, acc) in learner.theta_avg().iter().zip(&theta_sum) {
                assert!((avg - acc / t as f64).abs() <= 1e-12, "average recurrence broke");
            }
        }
    }
}

/// Off-policy sampling: the importance ratios produced by the sampler match
/// the policy ratio and stay within the environment's bound.
#[test]
fn sampled_importance_ratios_are_bounded() {
    for spec in mdp_specs() {
        let rho_max = spec.rho_max();
        let mut sampler = Sampler::new(&spec, 9);
        let mut sample = TransitionSample::zeros(spec.dim());
        for _ in 0..5000 {
            sampler.next_into(&spec, &mut sample);
            assert!(sample.rho >= 0.0 && sample.rho <= rho_max + 1e-12);
        }
    }
}
