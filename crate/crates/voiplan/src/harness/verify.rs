//! Self-checking sweeps over the exact solver.
//!
//! Each check evaluates a closed-form guarantee across a grid of beliefs,
//! depths, tolerances, and discounts on the two-state listening domain, and
//! reports the worst violation it observed next to the tolerance it is held
//! to. The suite never panics on a failed guarantee — failures are report
//! entries — so a regression shows up as a readable JSON diff rather than a
//! backtrace.
//!
//! [`VerifyOptions::flip_adaptive_case`] is a planted-bug fixture: it makes
//! every adaptive evaluation use the solver's inverted case split, which the
//! regret-bound check must then catch. It exists to prove the suite can
//! fail, and is exercised by tests and hidden from the CLI.

use crate::domains::tiger::TigerModel;
use crate::exact::{regret_bound, ExactSolver};
use crate::pomdp::{DenseBelief, DiscretePomdp};
use crate::Error;
use serde::{Deserialize, Serialize};

/// Sweep size. `Fast` finishes in well under a second; `Full` widens the
/// belief grid, adds a depth, and sweeps more tolerances and discounts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerifyLevel {
    Fast,
    Full,
}

impl std::str::FromStr for VerifyLevel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fast" => Ok(VerifyLevel::Fast),
            "full" => Ok(VerifyLevel::Full),
            other => Err(Error::InvalidConfig(format!(
                "unknown verify level {other:?}; expected \"fast\" or \"full\""
            ))),
        }
    }
}

/// What to verify and whether to sabotage the adaptive case split.
#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub level: VerifyLevel,
    /// Run every adaptive evaluation with the inverted case split — the
    /// negative control that the regret-bound check must fail on.
    pub flip_adaptive_case: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            level: VerifyLevel::Fast,
            flip_adaptive_case: false,
        }
    }
}

/// One guarantee's outcome: its worst observed violation and the tolerance
/// it must stay under to pass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub passed: bool,
    pub max_violation: f64,
    pub tolerance: f64,
}

/// The whole suite's outcome; `passed` is the conjunction of the checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub level: VerifyLevel,
    pub passed: bool,
    pub checks: Vec<CheckReport>,
}

impl VerifyLevel {
    fn depths(self) -> Vec<usize> {
        match self {
            VerifyLevel::Fast => (1..=3).collect(),
            VerifyLevel::Full => (1..=4).collect(),
        }
    }

    fn beliefs(self) -> Vec<DenseBelief> {
        let divisions = match self {
            VerifyLevel::Fast => 10,
            VerifyLevel::Full => 20,
        };
        (0..=divisions)
            .map(|i| {
                let p = i as f64 / divisions as f64;
                DenseBelief::from_normalized(vec![p, 1.0 - p])
            })
            .collect()
    }

    fn kappas(self) -> Vec<f64> {
        match self {
            VerifyLevel::Fast => vec![0.0, 0.1, 0.3, 1.0],
            VerifyLevel::Full => vec![0.0, 0.05, 0.1, 0.3, 1.0],
        }
    }
}

fn tiger_with(discount: f64) -> DiscretePomdp {
    TigerModel {
        discount,
        ..TigerModel::default()
    }
    .build()
}

fn uninformative_with(discount: f64) -> DiscretePomdp {
    TigerModel {
        discount,
        ..TigerModel::uninformative()
    }
    .build()
}

fn solver<'a>(model: &'a DiscretePomdp, options: &VerifyOptions) -> ExactSolver<'a> {
    let s = ExactSolver::new(model);
    if options.flip_adaptive_case {
        s.with_flipped_case_split()
    } else {
        s
    }
}

fn report(name: &str, max_violation: f64, tolerance: f64) -> CheckReport {
    CheckReport {
        name: name.to_string(),
        passed: max_violation <= tolerance,
        max_violation,
        tolerance,
    }
}

/// Penalized-argmax formulation vs. adaptive case split: the two exact
/// recursions must agree at every grid point.
fn check_equivalence(options: &VerifyOptions) -> CheckReport {
    let gammas: &[f64] = match options.level {
        VerifyLevel::Fast => &[0.95],
        VerifyLevel::Full => &[0.9, 0.95],
    };
    let mut worst = 0.0f64;
    for &gamma in gammas {
        let model = tiger_with(gamma);
        let solver = solver(&model, options);
        for b in options.level.beliefs() {
            for &d in &options.level.depths() {
                for &kappa in &options.level.kappas() {
                    let penalized = solver.value_voi_pomdp(&b, d, kappa).expect("within cap");
                    let adaptive = solver.value_adaptive(&b, d, kappa).expect("within cap");
                    worst = worst.max((penalized - adaptive.value).abs());
                }
            }
        }
    }
    report("penalized_argmax_equivalence", worst, 1e-9)
}

/// Adaptive regret must stay under the closed-form bound everywhere (the
/// κ = 0 rows make the bound zero, so exactness at κ = 0 is included).
fn check_regret_bound(options: &VerifyOptions) -> CheckReport {
    let mut worst = 0.0f64;
    for gamma in [0.9, 0.95] {
        let model = tiger_with(gamma);
        let solver = solver(&model, options);
        for b in options.level.beliefs() {
            for &d in &options.level.depths() {
                for &kappa in &options.level.kappas() {
                    let regret = solver.regret(&b, d, kappa).expect("within cap");
                    let bound =
                        regret_bound(kappa, model.r_max, gamma, d).expect("discount below 1");
                    worst = worst.max(regret - bound);
                }
            }
        }
    }
    report("regret_within_bound", worst.max(0.0), 1e-12)
}

/// With zero tolerance the adaptive recursion must reproduce the optimal
/// value to machine precision.
fn check_kappa_zero(options: &VerifyOptions) -> CheckReport {
    let mut worst = 0.0f64;
    for gamma in [0.9, 0.95] {
        let model = tiger_with(gamma);
        let solver = solver(&model, options);
        for b in options.level.beliefs() {
            for &d in &options.level.depths() {
                worst = worst.max(solver.regret(&b, d, 0.0).expect("within cap"));
            }
        }
    }
    report("kappa_zero_exactness", worst, 1e-12)
}

/// Ordering V^OL ≤ V̂ ≤ V*: conditioning on observations can only help, and
/// the adaptive value sits between the two extremes. Includes γ = 1.
fn check_sandwich(options: &VerifyOptions) -> CheckReport {
    let mut worst = 0.0f64;
    for gamma in [0.9, 0.95, 1.0] {
        let model = tiger_with(gamma);
        let solver = solver(&model, options);
        for b in options.level.beliefs() {
            for &d in &options.level.depths() {
                let optimal = solver.value(&b, d).expect("within cap");
                let open = solver.value_ol(&b, d).expect("within cap");
                worst = worst.max(open - optimal);
                for &kappa in &options.level.kappas() {
                    let adaptive =
                        solver.value_adaptive(&b, d, kappa).expect("within cap").value;
                    worst = worst.max(open - adaptive).max(adaptive - optimal);
                }
            }
        }
    }
    report("value_sandwich_jensen", worst.max(0.0), 1e-9)
}

/// With observations carrying no information, observing is worth nothing:
/// all three values coincide and the simple value of information vanishes.
fn check_degeneracy(options: &VerifyOptions) -> CheckReport {
    let gammas: &[f64] = match options.level {
        VerifyLevel::Fast => &[0.95],
        VerifyLevel::Full => &[0.9, 0.95],
    };
    let mut worst = 0.0f64;
    for &gamma in gammas {
        let model = uninformative_with(gamma);
        let solver = solver(&model, options);
        for b in options.level.beliefs() {
            for &d in &options.level.depths() {
                let optimal = solver.value(&b, d).expect("within cap");
                let open = solver.value_ol(&b, d).expect("within cap");
                worst = worst
                    .max(solver.simple_voi(&b, d).expect("within cap").abs())
                    .max((open - optimal).abs());
                for &kappa in &options.level.kappas() {
                    let adaptive =
                        solver.value_adaptive(&b, d, kappa).expect("within cap").value;
                    worst = worst.max((adaptive - optimal).abs());
                }
            }
        }
    }
    report("uninformative_degeneracy", worst, 1e-9)
}

/// Runs every check at the requested level and aggregates the verdicts.
pub fn verify(options: &VerifyOptions) -> VerifyReport {
    let checks = vec![
        check_equivalence(options),
        check_regret_bound(options),
        check_kappa_zero(options),
        check_sandwich(options),
        check_degeneracy(options),
    ];
    VerifyReport {
        level: options.level,
        passed: checks.iter().all(|c| c.passed),
        checks,
    }
}
