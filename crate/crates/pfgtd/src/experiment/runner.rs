//! Seeded, parallel experiment runners. Run `i` always uses seed
//! `seed_base + i`; results are collected in run order, so outputs are
//! byte-identical regardless of thread scheduling.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::config::{Algorithm, CdfDist, ExperimentConfig};
use crate::envs::{
    baird_initial_theta, by_name, multi_scale_stream, BairdBehavior, EnvOptions, Environment,
    MdpSpec, MultiScaleSpec, Sampler,
};
use crate::gtd::{
    saddle_learner, BaselineConfig, BaselineLearner, RegretTracker, SaddleConfig,
    SaddlePointLearner, TransitionSample,
};
use crate::linalg::{all_finite, dot};
use crate::metrics::{build_exact_model, duality_gap, smape, true_returns, ExactModel};
use crate::Error;

/// The step-size grid used to tune baselines: `{2^-10, ..., 2^0}`.
pub const BASELINE_GRID: [f64; 11] = [
    0.0009765625,
    0.001953125,
    0.00390625,
    0.0078125,
    0.015625,
    0.03125,
    0.0625,
    0.125,
    0.25,
    0.5,
    1.0,
];

/// Divergence sentinel recorded once a metric stops being finite.
const DIVERGED: f64 = f64::INFINITY;

/// One seeded run's metric trace. `metrics` holds the value at every
/// checkpoint, with the `+inf` sentinel from the first non-finite evaluation
/// onward; the JSON summary carries the final value as an option instead.
#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub run_index: usize,
    pub seed: u64,
    #[serde(skip)]
    pub metrics: Vec<f64>,
    pub final_metric: Option<f64>,
    pub diverged: bool,
    /// Step size drawn for this run, when the study samples one.
    pub hyperparameter: Option<f64>,
}

impl RunRecord {
    fn from_metrics(run_index: usize, seed: u64, metrics: Vec<f64>, alpha: Option<f64>) -> Self {
        let diverged = metrics.iter().any(|m| !m.is_finite());
        let last = *metrics.last().expect("at least the initial checkpoint");
        RunRecord {
            run_index,
            seed,
            metrics,
            final_metric: if last.is_finite() { Some(last) } else { None },
            diverged,
            hyperparameter: alpha,
        }
    }
}

/// Aggregated learning curves.
#[derive(Debug, Clone, Serialize)]
pub struct CurvesResult {
    pub config: ExperimentConfig,
    pub checkpoints: Vec<usize>,
    /// Per-checkpoint mean over runs still finite there.
    pub mean: Vec<f64>,
    /// Per-checkpoint standard error over the same runs.
    pub stderr: Vec<f64>,
    pub diverged_runs: usize,
    pub records: Vec<RunRecord>,
}

impl CurvesResult {
    /// Mean of final metrics with divergence propagated as `+inf`.
    pub fn final_mean_with_divergence(&self) -> f64 {
        let n = self.records.len() as f64;
        self.records.iter().map(|r| r.metrics.last().unwrap()).sum::<f64>() / n
    }

    /// Area under the mean curve with divergence propagated as `+inf`;
    /// used to rank sweep candidates so that any divergence disqualifies.
    pub fn auc_with_divergence(&self) -> f64 {
        let n = self.records.len() as f64;
        let mut total = 0.0;
        for k in 0..self.checkpoints.len() {
            total += self.records.iter().map(|r| r.metrics[k]).sum::<f64>() / n;
        }
        total
    }
}

fn aggregate(cfg: &ExperimentConfig, checkpoints: Vec<usize>, records: Vec<RunRecord>) -> CurvesResult {
    let k = checkpoints.len();
    let mut mean = vec![f64::INFINITY; k];
    let mut stderr = vec![f64::INFINITY; k];
    for i in 0..k {
        let finite: Vec<f64> =
            records.iter().map(|r| r.metrics[i]).filter(|m| m.is_finite()).collect();
        if finite.is_empty() {
            continue;
        }
        let n = finite.len() as f64;
        let mu = finite.iter().sum::<f64>() / n;
        mean[i] = mu;
        if finite.len() > 1 {
            let var = finite.iter().map(|x| (x - mu) * (x - mu)).sum::<f64>() / (n - 1.0);
            stderr[i] = (var / n).sqrt();
        } else {
            stderr[i] = 0.0;
        }
    }
    let diverged_runs = records.iter().filter(|r| r.diverged).count();
    CurvesResult { config: cfg.clone(), checkpoints, mean, stderr, diverged_runs, records }
}

/// Environment resolution honoring the config's star-behavior switch.
fn resolve_env(cfg: &ExperimentConfig) -> Result<Environment, Error> {
    let baird_behavior = match cfg.baird_behavior.as_str() {
        "equiprobable" => BairdBehavior::Equiprobable,
        "classic" => BairdBehavior::Classic,
        other => {
            return Err(Error::InvalidConfig(format!(
                "unknown baird behavior `{other}` (expected equiprobable or classic)"
            )))
        }
    };
    by_name(&cfg.environment, &EnvOptions { baird_behavior })
}

/// The standard initialization for the star counterexample, applied to every
/// algorithm (baselines start from it directly, parameter-free learners seed
/// their bettors to play it).
fn warm_start_for(spec: &MdpSpec) -> Option<Vec<f64>> {
    if spec.name == "baird" {
        Some(baird_initial_theta())
    } else {
        None
    }
}

enum RunLearner {
    Saddle(SaddlePointLearner),
    Baseline(BaselineLearner, bool),
}

impl RunLearner {
    fn build(
        algo: Algorithm,
        cfg: &ExperimentConfig,
        dim: usize,
        gamma: f64,
        warm: Option<&[f64]>,
        alpha: Option<f64>,
    ) -> Result<RunLearner, Error> {
        match algo {
            Algorithm::Saddle(variant) => {
                let sc = SaddleConfig::new(variant, dim, gamma)
                    .with_objective(cfg.objective)
                    .with_radius(cfg.radius)
                    .with_warm_start(warm.map(|w| w.to_vec()));
                Ok(RunLearner::Saddle(saddle_learner(&sc)?))
            }
            Algorithm::Baseline(b) => {
                let alpha = alpha.or(cfg.alpha).ok_or_else(|| {
                    Error::InvalidConfig(format!(
                        "baseline `{}` needs a step size (--alpha)",
                        cfg.algorithm
                    ))
                })?;
                let bc = BaselineConfig::new(b, alpha);
                let learner = match warm {
                    Some(theta) => BaselineLearner::with_initial_theta(bc, theta.to_vec()),
                    None => BaselineLearner::new(bc, dim),
                };
                Ok(RunLearner::Baseline(learner, cfg.average))
            }
        }
    }

    fn step(&mut self, sample: &TransitionSample, gamma: f64) {
        match self {
            RunLearner::Saddle(l) => l.step(sample),
            RunLearner::Baseline(l, _) => l.step(sample, gamma),
        }
    }

    /// The parameter vector evaluated by the metric at this point in time.
    fn eval_theta(&mut self, steps_done: usize) -> Vec<f64> {
        match self {
            RunLearner::Saddle(l) => {
                if steps_done == 0 {
                    l.theta_current().to_vec()
                } else {
                    l.theta_avg().to_vec()
                }
            }
            RunLearner::Baseline(l, average) => {
                if *average && steps_done > 0 {
                    l.theta_avg().to_vec()
                } else {
                    l.theta().to_vec()
                }
            }
        }
    }
}

fn single_mdp_run(
    spec: &MdpSpec,
    model: &ExactModel,
    algo: Algorithm,
    cfg: &ExperimentConfig,
    run_index: usize,
    alpha: Option<AlphaSource>,
) -> Result<RunRecord, Error> {
    let seed = cfg.seed_base + run_index as u64;
    let (alpha, sampler_seed) = draw_run_parameters(cfg, algo, seed, alpha);
    let warm = warm_start_for(spec);
    let mut learner =
        RunLearner::build(algo, cfg, spec.dim(), spec.gamma, warm.as_deref(), alpha)?;
    let mut sampler = Sampler::new(spec, sampler_seed);
    let mut sample = TransitionSample::zeros(spec.dim());
    let checkpoints = cfg.checkpoints();
    let mut metrics = Vec::with_capacity(checkpoints.len());
    let mut next_checkpoint = 0usize;
    let mut dead = false;

    for t in 0..=cfg.n_steps {
        if next_checkpoint < checkpoints.len() && t == checkpoints[next_checkpoint] {
            let value = if dead {
                DIVERGED
            } else {
                let theta = learner.eval_theta(t);
                if all_finite(&theta) {
                    let m = model.rmspbe(&theta);
                    if m.is_finite() {
                        m
                    } else {
                        DIVERGED
                    }
                } else {
                    DIVERGED
                }
            };
            if !value.is_finite() {
                dead = true;
            }
            metrics.push(value);
            next_checkpoint += 1;
        }
        if t == cfg.n_steps {
            break;
        }
        sampler.next_into(spec, &mut sample);
        if !dead {
            learner.step(&sample, spec.gamma);
        }
    }
    Ok(RunRecord::from_metrics(run_index, seed, metrics, alpha))
}

/// Per-run parameter draws for studies that sample a step size. The run's
/// RNG first draws the hyperparameter (baselines only), then the sampler
/// seed, keeping the whole run a pure function of `seed_base + i`.
fn draw_run_parameters(
    cfg: &ExperimentConfig,
    algo: Algorithm,
    seed: u64,
    alpha: Option<AlphaSource>,
) -> (Option<f64>, u64) {
    match alpha {
        None => (None, seed),
        Some(AlphaSource::Fixed(a)) => (Some(a), seed),
        Some(AlphaSource::Draw) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let drawn = if algo.is_baseline() {
                let (lo, hi) = cfg.cdf_range;
                let u: f64 = rng.random();
                Some(match cfg.cdf_dist {
                    CdfDist::LogUniform => (lo.ln() + u * (hi.ln() - lo.ln())).exp(),
                    CdfDist::Uniform => lo + u * (hi - lo),
                })
            } else {
                None
            };
            (drawn, rng.random())
        }
    }
}

/// Where a run's step size comes from.
#[derive(Debug, Clone, Copy)]
enum AlphaSource {
    Fixed(f64),
    Draw,
}

fn single_multiscale_run(
    spec: &MultiScaleSpec,
    algo: Algorithm,
    cfg: &ExperimentConfig,
    run_index: usize,
    alpha: Option<AlphaSource>,
) -> Result<RunRecord, Error> {
    let seed = cfg.seed_base + run_index as u64;
    let (alpha, sampler_seed) = draw_run_parameters(cfg, algo, seed, alpha);
    let stream = multi_scale_stream(spec, sampler_seed, cfg.n_steps + 1);
    let d = spec.dim();
    let n = cfg.n_steps;

    // One learner and one prediction trace per signal; prequential
    // predictions are made with the parameters in force before each step.
    let mut learners: Vec<RunLearner> = (0..spec.n_signals)
        .map(|_| RunLearner::build(algo, cfg, d, spec.gamma, None, alpha))
        .collect::<Result<_, _>>()?;
    let mut predictions = vec![Vec::with_capacity(n); spec.n_signals];
    let mut sample = TransitionSample::zeros(d);
    for t in 0..n {
        let phi = stream.features(t);
        let phi_next = stream.features(t + 1);
        for (k, learner) in learners.iter_mut().enumerate() {
            let theta = learner.eval_theta(t);
            predictions[k].push(dot(&theta, &phi));
            sample.phi.clone_from(&phi);
            sample.phi_next.clone_from(&phi_next);
            sample.reward = stream.rewards[k][t];
            sample.rho = 1.0;
            learner.step(&sample, spec.gamma);
        }
    }

    // Prequential SMAPE prefixes per signal, reported as the median across
    // signals at every checkpoint.
    let returns: Vec<Vec<f64>> = (0..spec.n_signals)
        .map(|k| true_returns(&stream.rewards[k][..n], spec.gamma).values)
        .collect();
    let checkpoints = cfg.checkpoints();
    let mut metrics = Vec::with_capacity(checkpoints.len());
    for &t in &checkpoints {
        let prefix = (t + 1).min(n.max(1));
        let mut per_signal = Vec::with_capacity(spec.n_signals);
        for k in 0..spec.n_signals {
            if n == 0 {
                per_signal.push(0.0);
            } else {
                per_signal
                    .push(smape(&predictions[k][..prefix], &returns[k][..prefix]).unwrap_or(1.0));
            }
        }
        per_signal.sort_by(|a, b| a.partial_cmp(b).unwrap());
        metrics.push(per_signal[per_signal.len() / 2]);
    }
    Ok(RunRecord::from_metrics(run_index, seed, metrics, alpha))
}

fn run_many(
    cfg: &ExperimentConfig,
    n_runs: usize,
    alpha: Option<AlphaSource>,
) -> Result<Vec<RunRecord>, Error> {
    cfg.validate()?;
    let algo = cfg.algorithm()?;
    let env = resolve_env(cfg)?;
    match env {
        Environment::Mdp(spec) => {
            let model = build_exact_model(&spec, cfg.objective)?;
            (0..n_runs)
                .into_par_iter()
                .map(|i| single_mdp_run(&spec, &model, algo, cfg, i, alpha))
                .collect()
        }
        Environment::MultiScale(spec) => (0..n_runs)
            .into_par_iter()
            .map(|i| single_multiscale_run(&spec, algo, cfg, i, alpha))
            .collect(),
    }
}

/// Learning curves: `n_runs` seeded runs with the metric recorded at every
/// checkpoint, aggregated as mean and standard error over runs still finite.
pub fn run_learning_curves(cfg: &ExperimentConfig) -> Result<CurvesResult, Error> {
    let fixed = cfg.alpha.map(AlphaSource::Fixed);
    let records = run_many(cfg, cfg.n_runs, fixed)?;
    Ok(aggregate(cfg, cfg.checkpoints(), records))
}

/// CDF robustness study result.
#[derive(Debug, Clone, Serialize)]
pub struct CdfResult {
    pub config: ExperimentConfig,
    pub budget: usize,
    /// Final metrics sorted ascending; diverged runs sort last as `+inf` and
    /// are reported as nulls in JSON.
    pub finals_sorted: Vec<Option<f64>>,
    /// Empirical CDF pairs `(x, fraction of runs <= x)`.
    pub cdf: Vec<(f64, f64)>,
    pub diverged_runs: usize,
    pub records: Vec<RunRecord>,
}

impl CdfResult {
    /// Nearest-rank quantile over all runs (diverged count as `+inf`).
    pub fn quantile(&self, q: f64) -> f64 {
        let n = self.finals_sorted.len();
        assert!(n > 0 && (0.0..=1.0).contains(&q));
        let rank = ((q * n as f64).ceil() as usize).clamp(1, n);
        self.finals_sorted[rank - 1].unwrap_or(f64::INFINITY)
    }

    /// Interquartile range of the final metric.
    pub fn iqr(&self) -> f64 {
        self.quantile(0.75) - self.quantile(0.25)
    }
}

/// Hyperparameter-robustness study: every run draws the baseline step size
/// from the configured distribution (parameter-free algorithms take no draw
/// and reflect seed noise only), runs to completion, and contributes its
/// final metric to the empirical CDF.
pub fn run_cdf_study(cfg: &ExperimentConfig, budget: usize) -> Result<CdfResult, Error> {
    if budget == 0 {
        return Err(Error::InvalidConfig("cdf budget must be at least 1".into()));
    }
    let records = run_many(cfg, budget, Some(AlphaSource::Draw))?;
    let mut finals: Vec<f64> = records.iter().map(|r| *r.metrics.last().unwrap()).collect();
    finals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = finals.len() as f64;
    let mut cdf: Vec<(f64, f64)> = Vec::new();
    for (i, &x) in finals.iter().enumerate() {
        if !x.is_finite() {
            break;
        }
        let frac = (i + 1) as f64 / n;
        match cdf.last_mut() {
            Some(last) if last.0 == x => last.1 = frac,
            _ => cdf.push((x, frac)),
        }
    }
    let diverged_runs = records.iter().filter(|r| r.diverged).count();
    if diverged_runs > 0 {
        cdf.push((f64::INFINITY, 1.0));
    }
    Ok(CdfResult {
        config: cfg.clone(),
        budget,
        finals_sorted: finals
            .iter()
            .map(|&x| if x.is_finite() { Some(x) } else { None })
            .collect(),
        cdf,
        diverged_runs,
        records,
    })
}

/// One run's regret/duality-gap audit.
#[derive(Debug, Clone, Serialize)]
pub struct AuditRun {
    pub run_index: usize,
    pub seed: u64,
    /// Regrets against the comparators realizing the duality gap (the best
    /// responses to the averaged iterates) — the pair for which the
    /// online-to-batch inequality holds deterministically.
    pub regret_theta: f64,
    pub regret_y: f64,
    /// Regrets against the exact saddle point, for reference.
    pub regret_theta_star: f64,
    pub regret_y_star: f64,
    pub gap: f64,
    /// `(regret_theta + regret_y) / T` plus the floating-point allowance.
    pub folk_bound: f64,
    pub pass: bool,
}

/// Audit outcome across runs.
#[derive(Debug, Clone, Serialize)]
pub struct AuditResult {
    pub config: ExperimentConfig,
    pub lambda_max_m: f64,
    pub radius: f64,
    pub pass_count: usize,
    pub runs: Vec<AuditRun>,
}

const FOLK_SLACK: f64 = 1e-9;

/// Per-run audit of the online-to-batch conversion: accumulates the exact
/// expected subgradients at the played iterates, then checks
/// `gap(avg) <= (R_theta + R_y) / T` against the gap's own comparators.
pub fn run_regret_audit(cfg: &ExperimentConfig) -> Result<AuditResult, Error> {
    cfg.validate()?;
    if cfg.n_steps == 0 {
        return Err(Error::InvalidConfig("audit needs at least one step".into()));
    }
    let algo = cfg.algorithm()?;
    let variant = match algo {
        Algorithm::Saddle(v) => v,
        Algorithm::Baseline(_) => {
            return Err(Error::InvalidConfig(
                "the regret audit applies to the parameter-free variants".into(),
            ))
        }
    };
    let env = resolve_env(cfg)?;
    let spec = env.as_mdp()?;
    let model = build_exact_model(spec, cfg.objective)?;

    let runs: Vec<AuditRun> = (0..cfg.n_runs)
        .into_par_iter()
        .map(|i| -> Result<AuditRun, Error> {
            let seed = cfg.seed_base + i as u64;
            let warm = warm_start_for(spec);
            let sc = SaddleConfig::new(variant, spec.dim(), spec.gamma)
                .with_objective(cfg.objective)
                .with_radius(cfg.radius)
                .with_warm_start(warm);
            let mut learner = saddle_learner(&sc)?;
            let mut sampler = Sampler::new(spec, seed);
            let mut sample = TransitionSample::zeros(spec.dim());
            let mut tracker = RegretTracker::new(spec.dim());
            for _ in 0..cfg.n_steps {
                sampler.next_into(spec, &mut sample);
                learner.step(&sample);
                let (theta_t, y_t) = learner.last_played();
                let (g_theta, g_y) = model.exact_subgradients(theta_t, y_t);
                tracker.record(&g_theta, theta_t, &g_y, y_t);
            }
            let report =
                duality_gap(&model, learner.theta_avg(), learner.y_avg(), cfg.radius);
            let regret_theta = tracker.regret_theta(&report.theta_witness);
            let regret_y = tracker.regret_y(&report.y_witness);
            let folk_bound =
                (regret_theta + regret_y) / cfg.n_steps as f64 + FOLK_SLACK;
            Ok(AuditRun {
                run_index: i,
                seed,
                regret_theta,
                regret_y,
                regret_theta_star: tracker.regret_theta(model.theta_star.as_slice()),
                regret_y_star: tracker.regret_y(model.y_star.as_slice()),
                gap: report.gap,
                folk_bound,
                pass: report.gap <= folk_bound,
            })
        })
        .collect::<Result<_, _>>()?;

    let pass_count = runs.iter().filter(|r| r.pass).count();
    Ok(AuditResult {
        config: cfg.clone(),
        lambda_max_m: model.lambda_max_m,
        radius: cfg.radius,
        pass_count,
        runs,
    })
}

/// One grid point of a baseline sweep.
#[derive(Debug, Clone, Serialize)]
pub struct SweepPoint {
    pub alpha: f64,
    /// Area under the mean curve with divergence propagated (any diverged
    /// run disqualifies the candidate).
    pub auc: f64,
    pub final_mean: f64,
    pub diverged_runs: usize,
}

/// Baseline step-size sweep outcome.
#[derive(Debug, Clone, Serialize)]
pub struct SweepResult {
    pub config: ExperimentConfig,
    pub points: Vec<SweepPoint>,
    pub best_alpha: Option<f64>,
}

/// Grid sweep over baseline step sizes, ranking by area under the mean
/// metric curve.
pub fn run_sweep(cfg: &ExperimentConfig, grid: &[f64]) -> Result<SweepResult, Error> {
    cfg.validate()?;
    if !cfg.algorithm()?.is_baseline() {
        return Err(Error::InvalidConfig(
            "sweeps tune baseline step sizes; parameter-free variants take no step size".into(),
        ));
    }
    let mut points = Vec::with_capacity(grid.len());
    for &alpha in grid {
        let mut sub = cfg.clone();
        sub.alpha = Some(alpha);
        let curves = run_learning_curves(&sub)?;
        points.push(SweepPoint {
            alpha,
            auc: curves.auc_with_divergence(),
            final_mean: curves.final_mean_with_divergence(),
            diverged_runs: curves.diverged_runs,
        });
    }
    let best_alpha = points
        .iter()
        .filter(|p| p.auc.is_finite())
        .min_by(|a, b| a.auc.partial_cmp(&b.auc).unwrap())
        .map(|p| p.alpha);
    Ok(SweepResult { config: cfg.clone(), points, best_alpha })
}
