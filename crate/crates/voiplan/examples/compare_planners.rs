//! Run a small head-to-head benchmark through the experiment harness: three
//! planners on the rock-sampling grid domain, paired seeds per trial, and
//! the aggregate table printed as CSV.
//!
//! Run with `cargo run --release --example compare_planners`. The release
//! profile matters: this executes hundreds of planning calls.

use voiplan::harness::{
    rows_to_csv, run_experiment, DomainConfig, ExperimentConfig, FvrsDomain,
};
use voiplan::{Algorithm, PlannerConfig};

fn main() {
    let shared = PlannerConfig {
        horizon: 20,
        discount: 0.95,
        ucb_c: 10.0,
        ..PlannerConfig::default()
    };
    let cfg = ExperimentConfig {
        domain: DomainConfig::Fvrs(FvrsDomain::default()),
        algorithms: vec![
            PlannerConfig {
                algorithm: Algorithm::Voimcp,
                kappa: 0.02,
                ..shared.clone()
            },
            PlannerConfig {
                algorithm: Algorithm::Pouct,
                ..shared.clone()
            },
            PlannerConfig {
                algorithm: Algorithm::OpenLoop,
                ..shared
            },
        ],
        budgets: vec![200, 1_000],
        trials: 50,
        particles: 10_000,
        master_seed: 0,
        output: None,
        execution_filter: Default::default(),
        measure_wall_time: false,
    };

    eprintln!(
        "running {} planner/budget cells x {} paired trials...",
        cfg.algorithms.len() * cfg.budgets.len(),
        cfg.trials
    );
    let rows = run_experiment(&cfg).unwrap();
    print!("{}", rows_to_csv(&rows));
}
