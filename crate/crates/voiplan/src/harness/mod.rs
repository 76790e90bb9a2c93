//! Episode execution and experiment sweeps.
//!
//! This module turns a planner configuration into numbers: [`run_episode`]
//! interleaves planning, acting, observing, and belief updates on a
//! generative model; [`run_experiment`] sweeps (algorithm × budget) cells
//! over seeded trials in parallel and aggregates them into CSV-ready rows
//! with normal-approximation 95% confidence intervals.
//!
//! Determinism contract: an identical [`ExperimentConfig`] produces
//! byte-identical CSV output at any worker-thread count. Trials parallelize
//! with per-trial derived seeds and are aggregated in trial-index order, so
//! scheduling cannot leak into the results. Wall-clock measurement is off by
//! default because timing columns are the one thing that cannot be
//! deterministic; switching it on changes only the `mean_wall_ms` column.
//!
//! The verification suite that drives the exact solver over belief grids
//! lives in [`verify`].

pub mod verify;

use crate::belief::ParticleBelief;
use crate::domains::{FvrsModel, TigerModel, TrackingModel};
use crate::planner::{search, PlannerConfig};
use crate::pomdp::GenerativeModel;
use crate::Error;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::time::Instant;

/// Tiger-domain parameters accepted in the experiment config.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TigerDomain {
    /// Probability that listening reports the tiger's true side.
    pub listen_accuracy: f64,
}

impl Default for TigerDomain {
    fn default() -> Self {
        TigerDomain {
            listen_accuracy: 0.85,
        }
    }
}

/// Tracking-domain parameters accepted in the experiment config.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrackingDomain {
    /// Side length of the grid.
    pub grid_size: usize,
    /// Probability that the target reading is the true cell.
    pub p_correct: f64,
    /// Probability that the target does not move this step.
    pub stay_prob: f64,
}

impl Default for TrackingDomain {
    fn default() -> Self {
        TrackingDomain {
            grid_size: 10,
            p_correct: 0.7,
            stay_prob: 0.5,
        }
    }
}

/// Field-and-rocks domain parameters accepted in the experiment config.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FvrsDomain {
    /// Grid side length.
    pub n: usize,
    /// Number of rocks.
    pub k: usize,
    /// Seed that determines the rock layout.
    pub seed: u64,
    /// Sensor half-efficiency distance.
    pub sensor_half_distance: f64,
}

impl Default for FvrsDomain {
    fn default() -> Self {
        FvrsDomain {
            n: 5,
            k: 5,
            seed: FvrsModel::default().layout_seed,
            sensor_half_distance: 2.0,
        }
    }
}

/// Domain selection for experiments, written in JSON as
/// `{"name": "tiger" | "tracking" | "fvrs", ...parameters}`.
///
/// Each variant carries only the parameters that experiments sweep; the
/// remaining domain knobs stay at the builders' defaults. Unknown parameter
/// keys are rejected.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum DomainConfig {
    Tiger(TigerDomain),
    Tracking(TrackingDomain),
    Fvrs(FvrsDomain),
}

impl DomainConfig {
    /// Lowercase token used in the CSV `domain` column.
    pub fn label(&self) -> &'static str {
        match self {
            DomainConfig::Tiger(_) => "tiger",
            DomainConfig::Tracking(_) => "tracking",
            DomainConfig::Fvrs(_) => "fvrs",
        }
    }

    /// Builds the explicit (matrix-form) model this config describes, for
    /// exact solving. Fails with [`Error::InfeasibleExplicitModel`] when the
    /// state/observation spaces are too large to enumerate.
    pub fn build_explicit(&self) -> Result<crate::pomdp::DiscretePomdp, Error> {
        match self {
            DomainConfig::Tiger(p) => Ok(TigerModel {
                listen_accuracy: p.listen_accuracy,
                ..TigerModel::default()
            }
            .build()),
            DomainConfig::Tracking(p) => TrackingModel {
                grid_size: p.grid_size,
                p_correct: p.p_correct,
                stay_prob: p.stay_prob,
                ..TrackingModel::default()
            }
            .to_discrete(),
            DomainConfig::Fvrs(p) => FvrsModel {
                grid_size: p.n,
                rock_count: p.k,
                layout_seed: p.seed,
                sensor_half_distance: p.sensor_half_distance,
                ..FvrsModel::default()
            }
            .to_discrete(),
        }
    }

    /// Builds the generative model this config describes.
    pub fn build(&self) -> Result<Box<dyn GenerativeModel>, Error> {
        match self {
            DomainConfig::Tiger(p) => Ok(Box::new(
                TigerModel {
                    listen_accuracy: p.listen_accuracy,
                    ..TigerModel::default()
                }
                .build(),
            )),
            DomainConfig::Tracking(p) => Ok(Box::new(TrackingModel {
                grid_size: p.grid_size,
                p_correct: p.p_correct,
                stay_prob: p.stay_prob,
                ..TrackingModel::default()
            })),
            DomainConfig::Fvrs(p) => Ok(Box::new(
                FvrsModel {
                    grid_size: p.n,
                    rock_count: p.k,
                    layout_seed: p.seed,
                    sensor_half_distance: p.sensor_half_distance,
                    ..FvrsModel::default()
                }
                .build()?,
            )),
        }
    }
}

/// How the belief is updated after each executed action.
///
/// `Closed` is the standard SIR update conditioning on the real environment
/// observation — the default, and what the planner's action choice never
/// changes: even when the chosen arm was an open-loop variant, the
/// environment still emits an observation and the filter may use it. `Open`
/// propagates particles blindly between replans instead.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExecutionFilter {
    #[default]
    Closed,
    Open,
}

fn default_particles() -> usize {
    10_000
}

/// A full experiment: one domain, a list of planner configurations, and a
/// grid of query budgets, each cell averaged over seeded trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Environment to run on.
    pub domain: DomainConfig,
    /// Planner configurations to compare; each is swept over every budget.
    /// The per-config `queries` value is overridden by the budget.
    pub algorithms: Vec<PlannerConfig>,
    /// Query budgets (simulations per planning call).
    pub budgets: Vec<usize>,
    /// Trials per (algorithm, budget) cell.
    pub trials: usize,
    /// Particle count for the execution-time filter.
    #[serde(default = "default_particles")]
    pub particles: usize,
    /// Master seed; trial seeds derive from it by trial index.
    #[serde(default)]
    pub master_seed: u64,
    /// Optional output path recorded for CLI convenience.
    #[serde(default)]
    pub output: Option<String>,
    /// Execution-time belief update rule.
    #[serde(default)]
    pub execution_filter: ExecutionFilter,
    /// Record wall-clock time per episode. Off by default so output bytes
    /// stay deterministic; the timing columns read 0 when disabled.
    #[serde(default)]
    pub measure_wall_time: bool,
}

impl ExperimentConfig {
    /// Parses and validates a JSON experiment config.
    pub fn from_json_str(text: &str) -> Result<Self, Error> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks structural invariants and every planner configuration.
    pub fn validate(&self) -> Result<(), Error> {
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be at least 1".into()));
        }
        if self.budgets.is_empty() {
            return Err(Error::InvalidConfig("budgets must be nonempty".into()));
        }
        if self.budgets.iter().any(|&b| b == 0) {
            return Err(Error::InvalidConfig(
                "every budget must be at least 1 query".into(),
            ));
        }
        if self.algorithms.is_empty() {
            return Err(Error::InvalidConfig(
                "algorithms must list at least one planner configuration".into(),
            ));
        }
        if self.particles == 0 {
            return Err(Error::InvalidConfig(
                "particles must be at least 1".into(),
            ));
        }
        for (i, planner) in self.algorithms.iter().enumerate() {
            planner.validate().map_err(|e| {
                Error::InvalidConfig(format!("algorithms[{i}]: {e}"))
            })?;
        }
        Ok(())
    }
}

/// One executed episode: the discounted return, how long it ran, per-step
/// tree-shape statistics, and filter health.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeResult {
    /// γ^t-discounted sum of received rewards.
    pub discounted_return: f64,
    /// Steps actually executed (≤ the planning horizon; episodes stop early
    /// at terminal states).
    pub steps: usize,
    /// Deepest tree node per planning call, one entry per step.
    pub max_depths: Vec<usize>,
    /// Effective branching factor per planning call, one entry per step.
    pub eff_branchings: Vec<f64>,
    /// Wall-clock episode duration in seconds; 0 unless timing was requested.
    pub wall_time_s: f64,
    /// How many closed-loop updates hit particle depletion and fell back to
    /// the open-loop recovery.
    pub depletion_events: usize,
}

/// Derives the RNG seed for one trial from the master seed with a single
/// splitmix64 step.
///
/// The derived seed depends only on `(master, index)` — not on the
/// algorithm or budget — so trial `i` faces the same environment randomness
/// in every cell, pairing the comparisons across planners and budgets.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Runs one plan–act–observe–update episode.
///
/// Each step plans from the current particle belief with a fresh search,
/// executes the chosen arm's base action in the environment, receives the
/// real observation, and updates the belief per `filter`. The loop stops at
/// a terminal state or after `planner.horizon` steps. A depleted closed
/// update falls back to open-loop propagation of the pre-update particles
/// and is counted, never fatal.
pub fn run_episode(
    model: &dyn GenerativeModel,
    planner: &PlannerConfig,
    filter: ExecutionFilter,
    measure_wall_time: bool,
    particles: usize,
    seed: u64,
) -> EpisodeResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let started = if measure_wall_time {
        Some(Instant::now())
    } else {
        None
    };

    let mut state = model.sample_initial(&mut rng);
    let mut belief = ParticleBelief::from_initial(model, particles, &mut rng);
    let mut discounted_return = 0.0;
    let mut discount_t = 1.0;
    let mut steps = 0;
    let mut max_depths = Vec::new();
    let mut eff_branchings = Vec::new();
    let mut depletion_events = 0;

    for _ in 0..planner.horizon {
        if model.is_terminal(state) {
            break;
        }
        let outcome = search(&belief, model, planner, &mut rng);
        max_depths.push(outcome.stats.max_depth);
        eff_branchings.push(outcome.stats.effective_branching);

        let action = outcome.best.base;
        let (next, observation, reward) = model.step(state, action, &mut rng);
        discounted_return += discount_t * reward;
        discount_t *= planner.discount;
        state = next;
        steps += 1;

        match filter {
            ExecutionFilter::Closed => {
                if belief.sir_update(model, action, observation, &mut rng).is_err() {
                    // The observation carries no weight under this particle
                    // set; keep the episode alive on the prediction-only
                    // update and make the contamination visible in the count.
                    depletion_events += 1;
                    belief.propagate_open(model, action, &mut rng);
                }
            }
            ExecutionFilter::Open => belief.propagate_open(model, action, &mut rng),
        }
    }

    EpisodeResult {
        discounted_return,
        steps,
        max_depths,
        eff_branchings,
        wall_time_s: started.map_or(0.0, |t| t.elapsed().as_secs_f64()),
        depletion_events,
    }
}

/// One aggregated (algorithm, budget) cell of an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRow {
    /// Domain token.
    pub domain: String,
    /// Algorithm token; repeated algorithms get `_2`, `_3`, … suffixes so
    /// rows stay distinguishable.
    pub algorithm: String,
    /// Queries per planning call.
    pub budget: usize,
    /// Trials that produced a finite return and entered the aggregates.
    pub trials: usize,
    /// Mean discounted return.
    pub mean_return: f64,
    /// 95% CI halfwidth, `1.96·sd/√n`; NaN when undefined (n < 2).
    pub ci95: f64,
    /// Mean over episodes of the per-episode mean max tree depth.
    pub mean_max_depth: f64,
    /// Mean over episodes of the per-episode mean effective branching.
    pub mean_eff_branching: f64,
    /// Mean episode wall time in milliseconds; 0 unless timing was on.
    pub mean_wall_ms: f64,
}

fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.iter().sum::<f64>() / values.len() as f64
}

fn ci95_halfwidth(values: &[f64], mean: f64) -> f64 {
    let n = values.len();
    if n < 2 {
        return f64::NAN;
    }
    let variance =
        values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
    1.96 * variance.sqrt() / (n as f64).sqrt()
}

/// Per-episode mean of a per-step series; an episode that never planned
/// contributes 0.
fn per_step_mean(series: &[f64]) -> f64 {
    if series.is_empty() {
        return 0.0;
    }
    series.iter().sum::<f64>() / series.len() as f64
}

fn aggregate(
    domain: &str,
    algorithm: &str,
    budget: usize,
    episodes: &[EpisodeResult],
) -> ExperimentRow {
    let kept: Vec<&EpisodeResult> = episodes
        .iter()
        .filter(|e| e.discounted_return.is_finite())
        .collect();
    let dropped = episodes.len() - kept.len();
    if dropped > 0 {
        eprintln!(
            "warning: excluded {dropped} of {} trials for {algorithm} at budget {budget}: non-finite return",
            episodes.len()
        );
    }

    let returns: Vec<f64> = kept.iter().map(|e| e.discounted_return).collect();
    let mean_return = mean(&returns);
    let depth_means: Vec<f64> = kept
        .iter()
        .map(|e| {
            let depths: Vec<f64> = e.max_depths.iter().map(|&d| d as f64).collect();
            per_step_mean(&depths)
        })
        .collect();
    let branching_means: Vec<f64> = kept.iter().map(|e| per_step_mean(&e.eff_branchings)).collect();
    let wall_ms: Vec<f64> = kept.iter().map(|e| e.wall_time_s * 1000.0).collect();

    ExperimentRow {
        domain: domain.to_string(),
        algorithm: algorithm.to_string(),
        budget,
        trials: kept.len(),
        mean_return,
        ci95: ci95_halfwidth(&returns, mean_return),
        mean_max_depth: mean(&depth_means),
        mean_eff_branching: mean(&branching_means),
        mean_wall_ms: mean(&wall_ms),
    }
}

/// Tokens for the CSV `algorithm` column: the algorithm name, with `_2`,
/// `_3`, … appended to repeats so two configurations of the same algorithm
/// stay distinguishable.
fn algorithm_labels(algorithms: &[PlannerConfig]) -> Vec<String> {
    let mut counts: HashMap<String, usize> = HashMap::new();
    algorithms
        .iter()
        .map(|cfg| {
            let base = cfg.algorithm.to_string();
            let seen = counts.entry(base.clone()).or_insert(0);
            *seen += 1;
            if *seen == 1 {
                base
            } else {
                format!("{base}_{seen}")
            }
        })
        .collect()
}

/// Runs the full experiment sweep: every algorithm at every budget, trials
/// in parallel, aggregated in trial-index order.
///
/// Row order is deterministic: algorithms in config order, budgets in config
/// order within each algorithm. Trials whose return is non-finite are
/// excluded from the aggregates (with a note on stderr) and the run
/// continues; the `trials` column records how many survived.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ExperimentRow>, Error> {
    cfg.validate()?;
    let model = cfg.domain.build()?;
    let model: &dyn GenerativeModel = model.as_ref();
    let labels = algorithm_labels(&cfg.algorithms);

    let mut rows = Vec::with_capacity(cfg.algorithms.len() * cfg.budgets.len());
    for (planner_cfg, label) in cfg.algorithms.iter().zip(&labels) {
        for &budget in &cfg.budgets {
            let mut planner = planner_cfg.clone();
            planner.queries = budget;
            let episodes: Vec<EpisodeResult> = (0..cfg.trials)
                .into_par_iter()
                .map(|trial| {
                    run_episode(
                        model,
                        &planner,
                        cfg.execution_filter,
                        cfg.measure_wall_time,
                        cfg.particles,
                        derive_seed(cfg.master_seed, trial as u64),
                    )
                })
                .collect();
            rows.push(aggregate(cfg.domain.label(), label, budget, &episodes));
        }
    }
    Ok(rows)
}

/// Renders rows as CSV with the fixed column order
/// `domain,algorithm,budget,trials,mean_return,ci95,mean_max_depth,mean_eff_branching,mean_wall_ms`.
///
/// Floats print with 6 decimal places (`NaN` for undefined entries), wall
/// time with 3. Output is UTF-8 with `.` as the decimal separator, one
/// header row, `\n` line endings.
pub fn rows_to_csv(rows: &[ExperimentRow]) -> String {
    let mut out = String::from(
        "domain,algorithm,budget,trials,mean_return,ci95,mean_max_depth,mean_eff_branching,mean_wall_ms\n",
    );
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{:.6},{:.6},{:.6},{:.6},{:.3}\n",
            r.domain,
            r.algorithm,
            r.budget,
            r.trials,
            r.mean_return,
            r.ci95,
            r.mean_max_depth,
            r.mean_eff_branching,
            r.mean_wall_ms
        ));
    }
    out
}

/// Convenience: run the experiment and render the CSV in one call.
pub fn run_to_csv(cfg: &ExperimentConfig) -> Result<String, Error> {
    Ok(rows_to_csv(&run_experiment(cfg)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planner::Algorithm;
    use crate::pomdp::{DenseBelief, DiscretePomdp};
    use approx::assert_abs_diff_eq;
    use rand::RngCore;

    fn chain(discount: f64) -> DiscretePomdp {
        DiscretePomdp {
            num_states: 1,
            num_actions: 1,
            num_observations: 1,
            transition: vec![vec![vec![1.0]]],
            reward: vec![vec![1.0]],
            observation: vec![vec![vec![1.0]]],
            horizon: 3,
            discount,
            initial_belief: DenseBelief::one_hot(1, 0),
            r_max: 1.0,
        }
    }

    fn small_planner(horizon: usize, discount: f64) -> PlannerConfig {
        PlannerConfig {
            queries: 16,
            horizon,
            discount,
            ..PlannerConfig::default()
        }
    }

    #[test]
    fn chain_episode_accumulates_geometric_return() {
        let model = chain(0.5);
        let result = run_episode(
            &model,
            &small_planner(3, 0.5),
            ExecutionFilter::Closed,
            false,
            32,
            7,
        );
        // Deterministic reward-1 chain: 1 + 0.5 + 0.25.
        assert_abs_diff_eq!(result.discounted_return, 1.75, epsilon = 1e-12);
        assert_eq!(result.steps, 3);
        assert_eq!(result.max_depths.len(), 3);
        assert_eq!(result.eff_branchings.len(), 3);
        assert_eq!(result.depletion_events, 0);
        assert_eq!(result.wall_time_s, 0.0);
    }

    #[test]
    fn zero_horizon_episode_does_nothing() {
        let model = chain(0.5);
        let result = run_episode(
            &model,
            &small_planner(0, 0.5),
            ExecutionFilter::Closed,
            false,
            32,
            7,
        );
        assert_eq!(result.discounted_return, 0.0);
        assert_eq!(result.steps, 0);
        assert!(result.max_depths.is_empty());
        assert!(result.eff_branchings.is_empty());
    }

    #[test]
    fn episode_with_fixed_seed_is_reproducible() {
        let model = TigerModel::default().build();
        let planner = PlannerConfig {
            queries: 64,
            horizon: 3,
            ..PlannerConfig::default()
        };
        let a = run_episode(&model, &planner, ExecutionFilter::Closed, false, 200, 11);
        let b = run_episode(&model, &planner, ExecutionFilter::Closed, false, 200, 11);
        assert_eq!(a, b);
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    /// A model whose observations never carry weight, to force the
    /// depletion-recovery path deterministically.
    struct Unobservable;

    impl GenerativeModel for Unobservable {
        fn num_actions(&self) -> usize {
            1
        }
        fn num_observations(&self) -> usize {
            1
        }
        fn r_max(&self) -> f64 {
            1.0
        }
        fn sample_initial(&self, _rng: &mut dyn RngCore) -> usize {
            0
        }
        fn step(&self, _state: usize, _action: usize, _rng: &mut dyn RngCore) -> (usize, usize, f64) {
            (0, 0, 1.0)
        }
        fn step_open(&self, _state: usize, _action: usize, _rng: &mut dyn RngCore) -> (usize, f64) {
            (0, 1.0)
        }
        fn observation_weight(&self, _next: usize, _action: usize, _obs: usize) -> f64 {
            0.0
        }
        fn is_terminal(&self, _state: usize) -> bool {
            false
        }
    }

    #[test]
    fn depleted_updates_are_counted_and_survived() {
        let result = run_episode(
            &Unobservable,
            &small_planner(4, 0.5),
            ExecutionFilter::Closed,
            false,
            16,
            3,
        );
        assert_eq!(result.steps, 4);
        assert_eq!(result.depletion_events, 4);
        // The open filter never depletes.
        let open = run_episode(
            &Unobservable,
            &small_planner(4, 0.5),
            ExecutionFilter::Open,
            false,
            16,
            3,
        );
        assert_eq!(open.depletion_events, 0);
    }

    #[test]
    fn derived_seeds_match_pinned_vectors_and_do_not_collide() {
        assert_eq!(derive_seed(0, 0), 0xE220_A839_7B1D_CDAF);
        assert_eq!(derive_seed(0, 1), 0x6E78_9E6A_A1B9_65F4);
        assert_eq!(derive_seed(42, 0), 0xBDD7_3226_2FEB_6E95);
        let mut seen = std::collections::HashSet::new();
        for i in 0..10_000 {
            assert!(seen.insert(derive_seed(0, i)));
        }
    }

    fn tiny_experiment() -> ExperimentConfig {
        ExperimentConfig {
            domain: DomainConfig::Tiger(TigerDomain::default()),
            algorithms: vec![
                PlannerConfig {
                    algorithm: Algorithm::Voimcp,
                    horizon: 2,
                    ..PlannerConfig::default()
                },
                PlannerConfig {
                    algorithm: Algorithm::Pouct,
                    horizon: 2,
                    ..PlannerConfig::default()
                },
            ],
            budgets: vec![8, 16],
            trials: 2,
            particles: 50,
            master_seed: 0,
            output: None,
            execution_filter: ExecutionFilter::Closed,
            measure_wall_time: false,
        }
    }

    #[test]
    fn csv_has_fixed_header_and_config_row_order() {
        let csv = run_to_csv(&tiny_experiment()).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(
            lines[0],
            "domain,algorithm,budget,trials,mean_return,ci95,mean_max_depth,mean_eff_branching,mean_wall_ms"
        );
        assert_eq!(lines.len(), 5);
        assert!(lines[1].starts_with("tiger,voimcp,8,2,"));
        assert!(lines[2].starts_with("tiger,voimcp,16,2,"));
        assert!(lines[3].starts_with("tiger,pouct,8,2,"));
        assert!(lines[4].starts_with("tiger,pouct,16,2,"));
        // Timing off ⇒ the wall column is exactly zero.
        for line in &lines[1..] {
            assert!(line.ends_with(",0.000"), "line: {line}");
        }
    }

    #[test]
    fn thread_count_does_not_change_output_bytes() {
        let cfg = ExperimentConfig {
            trials: 4,
            budgets: vec![16],
            ..tiny_experiment()
        };
        let run_at = |threads: usize| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| run_to_csv(&cfg).unwrap())
        };
        let single = run_at(1);
        assert_eq!(single, run_at(2));
        assert_eq!(single, run_at(8));
    }

    #[test]
    fn repeated_algorithms_get_distinct_labels() {
        let base = PlannerConfig::default();
        let labels = algorithm_labels(&[
            base.clone(),
            PlannerConfig {
                kappa: 0.1,
                ..base.clone()
            },
            PlannerConfig {
                algorithm: Algorithm::Pouct,
                ..base.clone()
            },
            PlannerConfig {
                kappa: 0.3,
                ..base
            },
        ]);
        assert_eq!(labels, vec!["voimcp", "voimcp_2", "pouct", "voimcp_3"]);
    }

    #[test]
    fn single_trial_reports_nan_interval() {
        let cfg = ExperimentConfig {
            trials: 1,
            budgets: vec![8],
            algorithms: vec![PlannerConfig {
                horizon: 2,
                ..PlannerConfig::default()
            }],
            ..tiny_experiment()
        };
        let rows = run_experiment(&cfg).unwrap();
        assert!(rows[0].ci95.is_nan());
        let csv = rows_to_csv(&rows);
        let data_line = csv.lines().nth(1).unwrap();
        assert_eq!(data_line.split(',').nth(5).unwrap(), "NaN");
    }

    #[test]
    fn identical_returns_yield_zero_interval() {
        let episode = EpisodeResult {
            discounted_return: 1.75,
            steps: 3,
            max_depths: vec![2, 3, 4],
            eff_branchings: vec![1.0, 2.0, 3.0],
            wall_time_s: 0.0,
            depletion_events: 0,
        };
        let row = aggregate("tiger", "voimcp", 8, &[episode.clone(), episode.clone(), episode]);
        assert_eq!(row.trials, 3);
        assert_abs_diff_eq!(row.ci95, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(row.mean_return, 1.75, epsilon = 1e-15);
        assert_abs_diff_eq!(row.mean_max_depth, 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(row.mean_eff_branching, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn non_finite_trials_are_excluded_from_aggregates() {
        let good = EpisodeResult {
            discounted_return: 2.0,
            steps: 1,
            max_depths: vec![1],
            eff_branchings: vec![1.0],
            wall_time_s: 0.0,
            depletion_events: 0,
        };
        let bad = EpisodeResult {
            discounted_return: f64::NAN,
            ..good.clone()
        };
        let row = aggregate("tiger", "voimcp", 8, &[good.clone(), bad, good]);
        assert_eq!(row.trials, 2);
        assert_abs_diff_eq!(row.mean_return, 2.0, epsilon = 1e-15);
    }

    #[test]
    fn config_json_fills_defaults() {
        let cfg = ExperimentConfig::from_json_str(
            r#"{
                "domain": {"name": "fvrs", "n": 3, "k": 2, "seed": 7},
                "algorithms": [{"algorithm": "voimcp"}],
                "budgets": [100],
                "trials": 3
            }"#,
        )
        .unwrap();
        assert_eq!(
            cfg.domain,
            DomainConfig::Fvrs(FvrsDomain {
                n: 3,
                k: 2,
                seed: 7,
                sensor_half_distance: 2.0,
            })
        );
        assert_eq!(cfg.domain.label(), "fvrs");
        assert_eq!(cfg.particles, 10_000);
        assert_eq!(cfg.master_seed, 0);
        assert_eq!(cfg.execution_filter, ExecutionFilter::Closed);
        assert!(!cfg.measure_wall_time);
        assert!(cfg.output.is_none());
        assert_eq!(cfg.algorithms[0].algorithm, Algorithm::Voimcp);
    }

    #[test]
    fn config_json_rejects_unknown_and_invalid_input() {
        // Unknown top-level key.
        assert!(ExperimentConfig::from_json_str(
            r#"{"domain": {"name": "tiger"}, "algorithms": [{}], "budgets": [10], "trials": 1, "bogus": 1}"#,
        )
        .is_err());
        // Unknown domain parameter.
        assert!(ExperimentConfig::from_json_str(
            r#"{"domain": {"name": "tiger", "accuracy": 0.9}, "algorithms": [{}], "budgets": [10], "trials": 1}"#,
        )
        .is_err());
        // Unknown domain name.
        assert!(ExperimentConfig::from_json_str(
            r#"{"domain": {"name": "chess"}, "algorithms": [{}], "budgets": [10], "trials": 1}"#,
        )
        .is_err());
        // Structural violations.
        assert!(matches!(
            ExperimentConfig::from_json_str(
                r#"{"domain": {"name": "tiger"}, "algorithms": [{}], "budgets": [10], "trials": 0}"#,
            ),
            Err(Error::InvalidConfig(_))
        ));
        assert!(matches!(
            ExperimentConfig::from_json_str(
                r#"{"domain": {"name": "tiger"}, "algorithms": [{}], "budgets": [], "trials": 1}"#,
            ),
            Err(Error::InvalidConfig(_))
        ));
        assert!(matches!(
            ExperimentConfig::from_json_str(
                r#"{"domain": {"name": "tiger"}, "algorithms": [], "budgets": [10], "trials": 1}"#,
            ),
            Err(Error::InvalidConfig(_))
        ));
        // Invalid nested planner configuration (horizon 0).
        assert!(matches!(
            ExperimentConfig::from_json_str(
                r#"{"domain": {"name": "tiger"}, "algorithms": [{"horizon": 0}], "budgets": [10], "trials": 1}"#,
            ),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn domain_config_builds_each_family() {
        let tiger = DomainConfig::Tiger(TigerDomain::default()).build().unwrap();
        assert_eq!(tiger.num_actions(), 3);
        let tracking = DomainConfig::Tracking(TrackingDomain {
            grid_size: 3,
            ..TrackingDomain::default()
        })
        .build()
        .unwrap();
        assert_eq!(tracking.num_actions(), 5);
        let fvrs = DomainConfig::Fvrs(FvrsDomain {
            n: 3,
            k: 2,
            ..FvrsDomain::default()
        })
        .build()
        .unwrap();
        assert_eq!(fvrs.num_observations(), 4);
        // Invalid parameters surface as errors rather than panics.
        assert!(DomainConfig::Fvrs(FvrsDomain {
            n: 0,
            ..FvrsDomain::default()
        })
        .build()
        .is_err());
    }

    #[test]
    fn explicit_models_build_when_small_and_refuse_when_large() {
        let tiger = DomainConfig::Tiger(TigerDomain::default())
            .build_explicit()
            .unwrap();
        assert_eq!(tiger.num_states, 2);
        let tracking = DomainConfig::Tracking(TrackingDomain {
            grid_size: 3,
            ..TrackingDomain::default()
        })
        .build_explicit()
        .unwrap();
        assert_eq!(tracking.num_states, 81);
        let fvrs = DomainConfig::Fvrs(FvrsDomain {
            n: 3,
            k: 2,
            ..FvrsDomain::default()
        })
        .build_explicit()
        .unwrap();
        assert_eq!(fvrs.num_states, 37);
        // Default sizes cannot be enumerated.
        assert!(matches!(
            DomainConfig::Tracking(TrackingDomain::default()).build_explicit(),
            Err(Error::InfeasibleExplicitModel { .. })
        ));
        assert!(matches!(
            DomainConfig::Fvrs(FvrsDomain::default()).build_explicit(),
            Err(Error::InfeasibleExplicitModel { .. })
        ));
    }
}
