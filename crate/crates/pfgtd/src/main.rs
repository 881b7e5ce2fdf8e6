//! Command-line front end for the experiment protocols.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use pfgtd::envs::{by_name, BairdBehavior, EnvOptions, ENVIRONMENT_NAMES};
use pfgtd::experiment::{
    run_cdf_study, run_learning_curves, run_regret_audit, run_sweep, ExperimentConfig,
    BASELINE_GRID,
};
use pfgtd::metrics::build_exact_model;
use pfgtd::Objective;

#[derive(Parser)]
#[command(
    name = "pfgtd",
    about = "Parameter-free gradient TD policy evaluation experiments",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Learning curves averaged over seeded runs.
    Run(CommonArgs),
    /// Hyperparameter-robustness CDF study (step sizes drawn per run).
    Cdf(CommonArgs),
    /// Baseline step-size grid sweep ranked by area under the mean curve.
    Sweep(CommonArgs),
    /// Per-run regret vs. duality-gap audit for the parameter-free variants.
    Audit(CommonArgs),
    /// Dump the exact model (A, b, C, saddle point, state distribution).
    DumpModel(DumpArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Config file (TOML key-value, mirroring the flags; flags override).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Environment name (see `dump-model --list`).
    #[arg(long)]
    env: Option<String>,
    /// Algorithm: pfgtd, cw-pfgtd, pfgtd+, td, gtd2, tdc, tdrc.
    #[arg(long)]
    algo: Option<String>,
    /// Number of runs (the budget, for `cdf`).
    #[arg(long)]
    runs: Option<usize>,
    /// Steps per run (defaults to the environment's protocol length).
    #[arg(long)]
    steps: Option<usize>,
    /// Base seed; run i uses seed + i.
    #[arg(long)]
    seed: Option<u64>,
    /// Baseline step size.
    #[arg(long)]
    alpha: Option<f64>,
    /// Objective metric: mspbe or neu.
    #[arg(long)]
    objective: Option<String>,
    /// Radius of the feasible balls.
    #[arg(long)]
    radius: Option<f64>,
    /// Evaluate baselines on averaged iterates.
    #[arg(long)]
    average: bool,
    /// Steps between metric evaluations.
    #[arg(long)]
    cadence: Option<usize>,
    /// CDF step-size law: log-uniform or uniform.
    #[arg(long)]
    cdf_dist: Option<String>,
    /// CDF step-size range, e.g. --cdf-range 0.0009765625,1.0
    #[arg(long, value_delimiter = ',', num_args = 2)]
    cdf_range: Option<Vec<f64>>,
    /// Star-counterexample behavior policy: equiprobable or classic.
    #[arg(long)]
    baird_behavior: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DumpArgs {
    /// Environment name.
    #[arg(long)]
    env: Option<String>,
    /// Objective metric: mspbe or neu.
    #[arg(long)]
    objective: Option<String>,
    /// Star-counterexample behavior policy.
    #[arg(long)]
    baird_behavior: Option<String>,
    /// Output directory (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// List registered environments and exit.
    #[arg(long)]
    list: bool,
    /// Dump the environment description instead of the exact model.
    #[arg(long)]
    spec: bool,
}

/// Config-file image of the flags. Unknown keys are rejected.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
struct FileConfig {
    env: Option<String>,
    algo: Option<String>,
    runs: Option<usize>,
    steps: Option<usize>,
    seed: Option<u64>,
    alpha: Option<f64>,
    objective: Option<String>,
    radius: Option<f64>,
    average: Option<bool>,
    cadence: Option<usize>,
    cdf_dist: Option<String>,
    cdf_range: Option<[f64; 2]>,
    baird_behavior: Option<String>,
    out: Option<String>,
}

/// Protocol run lengths used when --steps is omitted.
fn protocol_steps(env: &str) -> usize {
    match env {
        "boyan" => 10_000,
        "baird" => 5_000,
        "multi-scale" => 10_000,
        _ => 3_000,
    }
}

/// Metric is evaluated every step on the classic problems and every 100
/// steps on the long prediction stream.
fn protocol_cadence(env: &str) -> usize {
    if env == "multi-scale" {
        100
    } else {
        1
    }
}

/// Default feasible-set radius. The classic problems use the oracle-verified
/// ball of radius 100; the multi-scale stream's value targets reach
/// `scale / (1 - gamma)` (about 1e8 at the default scales), so its ball must
/// be wide enough to contain them.
fn protocol_radius(env: &str) -> f64 {
    if env == "multi-scale" {
        1e9
    } else {
        100.0
    }
}

fn merge(args: &CommonArgs) -> Result<(ExperimentConfig, PathBuf)> {
    let file: FileConfig = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading config file {}", path.display()))?;
            toml::from_str(&text)
                .with_context(|| format!("parsing config file {}", path.display()))?
        }
        None => FileConfig::default(),
    };

    let env = args
        .env
        .clone()
        .or(file.env)
        .context("no environment given (use --env or the config file)")?;
    let algo = args
        .algo
        .clone()
        .or(file.algo)
        .context("no algorithm given (use --algo or the config file)")?;

    let mut cfg = ExperimentConfig::new(&env, &algo);
    cfg.n_runs = args.runs.or(file.runs).unwrap_or(200);
    cfg.n_steps = args.steps.or(file.steps).unwrap_or_else(|| protocol_steps(&env));
    cfg.seed_base = args.seed.or(file.seed).unwrap_or(0);
    cfg.metric_cadence = args.cadence.or(file.cadence).unwrap_or_else(|| protocol_cadence(&env));
    cfg.alpha = args.alpha.or(file.alpha);
    cfg.radius = args.radius.or(file.radius).unwrap_or_else(|| protocol_radius(&env));
    cfg.average = args.average || file.average.unwrap_or(false);
    if let Some(text) = args.objective.clone().or(file.objective) {
        cfg.objective = text.parse::<Objective>()?;
    }
    if let Some(text) = args.cdf_dist.clone().or(file.cdf_dist) {
        cfg.cdf_dist = text.parse()?;
    }
    if let Some(range) = &args.cdf_range {
        cfg.cdf_range = (range[0], range[1]);
    } else if let Some([lo, hi]) = file.cdf_range {
        cfg.cdf_range = (lo, hi);
    }
    if let Some(behavior) = args.baird_behavior.clone().or(file.baird_behavior) {
        cfg.baird_behavior = behavior;
    }
    cfg.validate()?;

    let out = args
        .out
        .clone()
        .or(file.out.map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("results"));
    Ok((cfg, out))
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Run(args) => {
            let (cfg, out) = merge(&args)?;
            let curves = run_learning_curves(&cfg)?;
            let (csv, json) = curves.emit(&out)?;
            let last = curves.mean.last().copied().unwrap_or(f64::NAN);
            println!(
                "run: {} x {} steps on {} with {}",
                cfg.n_runs, cfg.n_steps, cfg.environment, cfg.algorithm
            );
            println!("final mean metric: {last} ({} diverged)", curves.diverged_runs);
            println!("wrote {} and {} in {}", csv, json, out.display());
        }
        Command::Cdf(args) => {
            let (cfg, out) = merge(&args)?;
            let result = run_cdf_study(&cfg, cfg.n_runs)?;
            let (csv, json) = result.emit(&out)?;
            println!(
                "cdf: {} runs on {} with {} ({} diverged), iqr {}",
                result.budget,
                cfg.environment,
                cfg.algorithm,
                result.diverged_runs,
                result.iqr()
            );
            println!("wrote {} and {} in {}", csv, json, out.display());
        }
        Command::Sweep(args) => {
            let (cfg, out) = merge(&args)?;
            let sweep = run_sweep(&cfg, &BASELINE_GRID)?;
            let (csv, json) = sweep.emit(&out)?;
            match sweep.best_alpha {
                Some(alpha) => println!(
                    "sweep: best step size {alpha} for {} on {}",
                    cfg.algorithm, cfg.environment
                ),
                None => println!("sweep: every candidate diverged"),
            }
            println!("wrote {} and {} in {}", csv, json, out.display());
        }
        Command::Audit(args) => {
            let (cfg, out) = merge(&args)?;
            let audit = run_regret_audit(&cfg)?;
            let (csv, json) = audit.emit(&out)?;
            println!(
                "audit: {}/{} runs satisfy gap <= (R_theta + R_y)/T (lambda_max {}, radius {})",
                audit.pass_count,
                audit.runs.len(),
                audit.lambda_max_m,
                audit.radius
            );
            println!("wrote {} and {} in {}", csv, json, out.display());
        }
        Command::DumpModel(args) => {
            if args.list {
                for name in ENVIRONMENT_NAMES {
                    println!("{name}");
                }
                return Ok(());
            }
            let env_name = args.env.context("no environment given (--env)")?;
            let objective = match args.objective {
                Some(text) => text.parse::<Objective>()?,
                None => Objective::Mspbe,
            };
            let baird_behavior = match args.baird_behavior.as_deref() {
                None | Some("equiprobable") => BairdBehavior::Equiprobable,
                Some("classic") => BairdBehavior::Classic,
                Some(other) => bail!("unknown baird behavior `{other}`"),
            };
            let env = by_name(&env_name, &EnvOptions { baird_behavior })?;
            let (text, file_name) = if args.spec {
                let text = match &env {
                    pfgtd::envs::Environment::Mdp(spec) => serde_json::to_string_pretty(spec)?,
                    pfgtd::envs::Environment::MultiScale(spec) => {
                        serde_json::to_string_pretty(spec)?
                    }
                };
                (text, format!("env_{env_name}.json"))
            } else {
                let spec = env.as_mdp().context("the exact model needs an MDP environment")?;
                let model = build_exact_model(spec, objective)?;
                let text = serde_json::to_string_pretty(&model.dump(&env_name))?;
                (text, format!("model_{env_name}_{objective}.json"))
            };
            match args.out {
                Some(dir) => {
                    std::fs::create_dir_all(&dir)
                        .with_context(|| format!("creating {}", dir.display()))?;
                    let path = dir.join(file_name);
                    std::fs::write(&path, format!("{text}\n"))
                        .with_context(|| format!("writing {}", path.display()))?;
                    println!("wrote {}", path.display());
                }
                None => println!("{text}"),
            }
        }
    }
    Ok(())
}
