//! Online planning for discrete POMDPs with adaptive value-of-information
//! (VOI) reasoning.
//!
//! The crate is organized around one idea: closed-loop planning (branch on
//! every observation) is accurate but expensive, open-loop planning (ignore
//! observations while looking ahead) is cheap but can be badly suboptimal,
//! and a planner can choose *per belief, per depth* which of the two to use
//! by estimating the value of the information an observation would carry.
//!
//! Modules:
//!
//! - [`pomdp`] — discrete model representation ([`DiscretePomdp`]), dense
//!   beliefs, exact belief updates, and the [`GenerativeModel`] sampling
//!   interface shared by all planners.
//! - [`belief`] — sequential importance resampling over particle sets for
//!   execution-time state estimation in large models.
//! - [`transform`] — the mode-augmented POMDP: every action is split into an
//!   open-loop and a closed-loop variant, and open-loop variants emit a null
//!   observation. Planning in the augmented model *is* the adaptive
//!   open/closed choice.
//! - [`exact`] — finite-horizon exact solvers over dense beliefs: optimal,
//!   open-loop, adaptive, and augmented-model values, plus VOI and regret
//!   diagnostics.
//! - [`planner`] — the Monte Carlo tree search family: the VOI-aware
//!   planner with fixed or annealed meta-penalty, plus standard UCT,
//!   entropy-augmented UCT, and pure open-loop baselines on one shared
//!   search engine.
//! - [`domains`] — benchmark problems (tiger, grid target tracking,
//!   field-vision rock sampling) in explicit and generative form.
//! - [`harness`] — episode execution, multi-trial benchmark runs with
//!   deterministic parallelism, CSV reporting, and a self-check suite.

pub mod belief;
pub mod domains;
pub mod exact;
pub mod harness;
pub mod planner;
pub mod pomdp;
pub mod transform;

pub use belief::ParticleBelief;
pub use exact::{regret_bound, AdaptiveValueResult, ExactSolver};
pub use harness::{run_episode, run_experiment, EpisodeResult, ExperimentConfig};
pub use planner::{search, Algorithm, PlannerConfig, SearchOutcome, TreeStats};
pub use pomdp::{DenseBelief, DiscretePomdp, GenerativeModel, ModelDefect};
pub use transform::{AugmentedAction, AugmentedModel, AugmentedObservation, Mode, VoiPomdp};

/// Absolute tolerance for checking that a probability vector sums to one.
///
/// Applied when validating model rows and belief vectors. Loose enough to
/// admit tables assembled from floating-point arithmetic, tight enough to
/// reject genuinely unnormalized input.
pub const PROB_SUM_TOLERANCE: f64 = 1e-9;

/// Observations with likelihood below this floor are treated as impossible.
///
/// Conditioning a belief on such an observation is refused (the posterior
/// would be numerical noise), and exact solvers skip these branches when
/// taking expectations over observations.
pub const MIN_OBSERVATION_PROB: f64 = 1e-12;

/// Default cap on the number of belief nodes an exact solve may expand.
///
/// Exact finite-horizon expansion is exponential in depth; the cap turns a
/// runaway solve into a reportable error instead of an apparent hang.
pub const DEFAULT_NODE_CAP: usize = 10_000_000;

/// Errors produced by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A belief was conditioned on an observation whose predicted
    /// probability is below [`MIN_OBSERVATION_PROB`].
    #[error(
        "observation {observation} has probability {probability:.3e} under action {action}; \
         cannot condition a belief on an impossible observation"
    )]
    ImpossibleObservation {
        action: usize,
        observation: usize,
        probability: f64,
    },

    /// Every particle received (numerically) zero weight during a filter
    /// update; the filter has lost track of the state.
    #[error(
        "particle filter depleted: total weight {total_weight:.3e} after action {action}, \
         observation {observation}"
    )]
    ParticleDepletion {
        action: usize,
        observation: usize,
        total_weight: f64,
    },

    /// An augmented belief update paired an action mode with the wrong
    /// observation kind (open-loop actions emit exactly the null
    /// observation; closed-loop actions emit exactly the real ones).
    #[error(
        "augmented update: {action_mode} action paired with a {observation_kind} observation; \
         open-loop pairs with the null observation, closed-loop with real ones"
    )]
    ModeObservationMismatch {
        action_mode: &'static str,
        observation_kind: &'static str,
    },

    /// An exact solve expanded more belief nodes than its configured cap.
    #[error("exact expansion exceeded the budget of {cap} belief nodes")]
    ExpansionBudgetExceeded { cap: usize },

    /// The closed-form regret bound divides by (1 - discount) twice and is
    /// undefined for undiscounted problems.
    #[error("the regret bound is undefined at discount 1; use a discount strictly below 1")]
    RegretBoundUndefinedAtDiscountOne,

    /// Materializing explicit tables for this instance would exceed the
    /// configured entry cap; use the generative interface instead.
    #[error(
        "explicit tables for this instance need {needed} entries, over the cap of {cap}; \
         use the generative interface"
    )]
    InfeasibleExplicitModel { needed: usize, cap: usize },

    /// A model failed validation; every violation is listed.
    #[error("invalid model:{}", format_defects(.defects))]
    InvalidModel { defects: Vec<ModelDefect> },

    /// A configuration value is out of its documented range.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// A JSON document could not be parsed.
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
}

fn format_defects(defects: &[ModelDefect]) -> String {
    let mut out = String::new();
    for d in defects {
        out.push_str("\n  - ");
        out.push_str(&d.to_string());
    }
    out
}
