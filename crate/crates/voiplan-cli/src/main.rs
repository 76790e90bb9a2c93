//! Command-line front end for the voiplan toolkit: single episodes,
//! experiment sweeps, the verification suite, and exact solving.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use serde_json::json;
use voiplan::harness::verify::{verify, VerifyLevel, VerifyOptions};
use voiplan::harness::{derive_seed, run_episode, run_to_csv, DomainConfig, ExperimentConfig};
use voiplan::{regret_bound, DenseBelief, ExactSolver, Mode};

#[derive(Parser)]
#[command(
    name = "voiplan",
    version,
    about = "Online planning under partial observability, with tree search \
             that weighs whether observations are worth branching on"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one plan–act–observe–update episode and print its JSON record.
    Plan(PlanArgs),
    /// Run a full experiment sweep and write the aggregated CSV.
    Bench(BenchArgs),
    /// Run the exact-solver verification sweeps and print the JSON report.
    Verify(VerifyArgs),
    /// Solve a small explicit model exactly and print the value breakdown.
    SolveExact(SolveExactArgs),
}

#[derive(Args)]
struct PlanArgs {
    /// Experiment config JSON (same schema as `bench`).
    #[arg(long)]
    config: PathBuf,
    /// Index into the config's algorithm list.
    #[arg(long, default_value_t = 0)]
    algorithm: usize,
    /// Query budget; defaults to the config's first budget.
    #[arg(long)]
    budget: Option<usize>,
    /// Episode seed; defaults to the trial-0 seed derived from the
    /// config's master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Measure wall-clock time (the one nondeterministic field).
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
struct BenchArgs {
    /// Experiment config JSON.
    #[arg(long)]
    config: PathBuf,
    /// Output CSV path; falls back to the config's `output` field.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker thread count; defaults to one per core. The output bytes are
    /// identical at any setting.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Sweep size: "fast" or "full".
    #[arg(long, default_value = "fast", value_parser = parse_level)]
    level: VerifyLevel,
}

#[derive(Args)]
struct SolveExactArgs {
    /// Domain: a name ("tiger", "tracking", "fvrs") or a JSON object like
    /// {"name":"fvrs","n":3,"k":2}. Must be small enough to enumerate.
    #[arg(long, default_value = "tiger")]
    domain: String,
    /// Lookahead depth.
    #[arg(long)]
    depth: usize,
    /// Adaptive tolerance κ.
    #[arg(long, default_value_t = 0.0)]
    kappa: f64,
    /// Belief as comma-separated probabilities over states, e.g. "0.5,0.5";
    /// defaults to the model's initial belief.
    #[arg(long)]
    belief: Option<String>,
    /// Discount override.
    #[arg(long)]
    discount: Option<f64>,
}

fn parse_level(s: &str) -> Result<VerifyLevel, voiplan::Error> {
    s.parse()
}

fn load_config(path: &PathBuf) -> anyhow::Result<ExperimentConfig> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let cfg = ExperimentConfig::from_json_str(&text)
        .with_context(|| format!("parsing {}", path.display()))?;
    Ok(cfg)
}

fn cmd_plan(args: &PlanArgs) -> anyhow::Result<()> {
    let cfg = load_config(&args.config)?;
    let Some(planner) = cfg.algorithms.get(args.algorithm) else {
        bail!(
            "--algorithm {} is out of range: the config lists {} planner(s)",
            args.algorithm,
            cfg.algorithms.len()
        );
    };
    let mut planner = planner.clone();
    planner.queries = args.budget.unwrap_or(cfg.budgets[0]);
    let seed = args
        .seed
        .unwrap_or_else(|| derive_seed(cfg.master_seed, 0));
    let model = cfg.domain.build()?;
    let episode = run_episode(
        model.as_ref(),
        &planner,
        cfg.execution_filter,
        args.timing || cfg.measure_wall_time,
        cfg.particles,
        seed,
    );
    println!("{}", serde_json::to_string_pretty(&episode)?);
    Ok(())
}

fn cmd_bench(args: &BenchArgs) -> anyhow::Result<()> {
    let cfg = load_config(&args.config)?;
    let out = match (&args.out, &cfg.output) {
        (Some(path), _) => path.clone(),
        (None, Some(path)) => PathBuf::from(path),
        (None, None) => bail!("no output path: pass --out or set \"output\" in the config"),
    };
    let csv = match args.threads {
        Some(threads) => rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .context("building the worker pool")?
            .install(|| run_to_csv(&cfg))?,
        None => run_to_csv(&cfg)?,
    };
    fs::write(&out, csv).with_context(|| format!("writing {}", out.display()))?;
    eprintln!("wrote {}", out.display());
    Ok(())
}

fn cmd_verify(args: &VerifyArgs) -> anyhow::Result<bool> {
    let report = verify(&VerifyOptions {
        level: args.level,
        flip_adaptive_case: false,
    });
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(report.passed)
}

fn cmd_solve_exact(args: &SolveExactArgs) -> anyhow::Result<()> {
    let domain: DomainConfig = if args.domain.trim_start().starts_with('{') {
        serde_json::from_str(&args.domain).context("parsing --domain as a JSON object")?
    } else {
        serde_json::from_str(&json!({ "name": args.domain }).to_string())
            .with_context(|| format!("unknown domain {:?}", args.domain))?
    };
    let mut model = domain.build_explicit()?;
    if let Some(gamma) = args.discount {
        if !(0.0..=1.0).contains(&gamma) {
            bail!("--discount must lie in [0, 1], got {gamma}");
        }
        model.discount = gamma;
    }

    let belief = match &args.belief {
        Some(text) => {
            let probs = text
                .split(',')
                .map(|tok| tok.trim().parse::<f64>())
                .collect::<Result<Vec<f64>, _>>()
                .with_context(|| format!("parsing --belief {text:?}"))?;
            if probs.len() != model.num_states {
                bail!(
                    "--belief lists {} probabilities but the model has {} states",
                    probs.len(),
                    model.num_states
                );
            }
            DenseBelief::from_probs(probs)?
        }
        None => model.initial_belief.clone(),
    };

    let solver = ExactSolver::new(&model);
    let optimal = solver.value(&belief, args.depth)?;
    let closed = solver.value_cl(&belief, args.depth)?;
    let open = solver.value_ol(&belief, args.depth)?;
    let adaptive = solver.value_adaptive(&belief, args.depth, args.kappa)?;
    let simple_voi = solver.simple_voi(&belief, args.depth)?;
    let adaptive_voi = solver.adaptive_voi(&belief, args.depth, args.kappa)?;
    let regret = solver.regret(&belief, args.depth, args.kappa)?;
    let bound = regret_bound(args.kappa, model.r_max, model.discount, args.depth)
        .map(serde_json::Value::from)
        .unwrap_or(serde_json::Value::Null);

    let report = json!({
        "domain": domain.label(),
        "depth": args.depth,
        "kappa": args.kappa,
        "discount": model.discount,
        "belief": belief.probs(),
        "value_optimal": optimal,
        "value_closed_loop": closed,
        "value_open_loop": open,
        "value_adaptive": adaptive.value,
        "adaptive_mode": match adaptive.chosen_mode {
            Mode::OpenLoop => "open_loop",
            Mode::ClosedLoop => "closed_loop",
        },
        "adaptive_best_action": adaptive.best_action,
        "simple_voi": simple_voi,
        "adaptive_voi": adaptive_voi,
        "regret": regret,
        "regret_bound": bound,
    });
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Plan(args) => cmd_plan(args).map(|()| true),
        Command::Bench(args) => cmd_bench(args).map(|()| true),
        Command::Verify(args) => cmd_verify(args),
        Command::SolveExact(args) => cmd_solve_exact(args).map(|()| true),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        // The command ran and printed its report, but the verdict is a
        // failure; the report already says why.
        Ok(false) => ExitCode::FAILURE,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
