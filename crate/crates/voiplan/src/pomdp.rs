//! Discrete POMDP representation and exact belief arithmetic.
//!
//! A [`DiscretePomdp`] stores the transition, reward, and observation tables
//! of a finite model explicitly. Beliefs over its states are dense
//! probability vectors ([`DenseBelief`]) and are updated in two ways:
//!
//! - closed-loop (conditioned on an observation `o` received after `a`):
//!   `b'(s') ∝ Z(o | s', a) · Σ_s T(s' | s, a) · b(s)`
//! - open-loop (no observation, pure prediction):
//!   `b'(s') = Σ_s T(s' | s, a) · b(s)`
//!
//! The open update is exactly the observation-expectation of the closed one,
//! which is the identity the rest of the crate leans on: planning without
//! observations means planning on predicted beliefs.
//!
//! Models too large to tabulate implement [`GenerativeModel`] directly; a
//! `DiscretePomdp` gets a `GenerativeModel` implementation for free by
//! categorical sampling from its rows.

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::{Error, MIN_OBSERVATION_PROB, PROB_SUM_TOLERANCE};

/// A dense probability distribution over the states of a model.
///
/// Entries are nonnegative and sum to one within [`PROB_SUM_TOLERANCE`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DenseBelief {
    probs: Vec<f64>,
}

impl DenseBelief {
    /// The uniform distribution over `n` states.
    pub fn uniform(n: usize) -> Self {
        DenseBelief {
            probs: vec![1.0 / n as f64; n],
        }
    }

    /// All probability mass on state `s`.
    pub fn one_hot(n: usize, s: usize) -> Self {
        let mut probs = vec![0.0; n];
        probs[s] = 1.0;
        DenseBelief { probs }
    }

    /// Builds a belief from raw probabilities, rejecting vectors that are
    /// not a distribution (negative entries, or sum off by more than
    /// [`PROB_SUM_TOLERANCE`]).
    pub fn from_probs(probs: Vec<f64>) -> Result<Self, Error> {
        let b = DenseBelief { probs };
        match b.check() {
            Some(defect) => Err(Error::InvalidModel {
                defects: vec![defect],
            }),
            None => Ok(b),
        }
    }

    fn check(&self) -> Option<ModelDefect> {
        if self.probs.is_empty() {
            return Some(ModelDefect::BadBelief {
                detail: "belief over zero states".to_string(),
            });
        }
        for (s, &p) in self.probs.iter().enumerate() {
            if !is_nonneg(p) {
                return Some(ModelDefect::BadBelief {
                    detail: format!("entry {s} is {p}, not a nonnegative number"),
                });
            }
        }
        let sum: f64 = self.probs.iter().sum();
        if (sum - 1.0).abs() > PROB_SUM_TOLERANCE {
            return Some(ModelDefect::BadBelief {
                detail: format!("entries sum to {sum}, expected 1"),
            });
        }
        None
    }

    /// Number of states the belief ranges over.
    pub fn len(&self) -> usize {
        self.probs.len()
    }

    /// True when the belief ranges over zero states (never constructible
    /// through the public API).
    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Probability of state `s`.
    pub fn prob(&self, s: usize) -> f64 {
        self.probs[s]
    }

    /// The raw probability vector.
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Internal constructor for vectors already known to be normalized.
    pub(crate) fn from_normalized(probs: Vec<f64>) -> Self {
        DenseBelief { probs }
    }
}

fn is_nonneg(x: f64) -> bool {
    x >= 0.0 && x.is_finite()
}

/// One concrete violation found while validating a model.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelDefect {
    /// A table has the wrong shape for the declared state/action/observation
    /// counts.
    BadDimension { detail: String },
    /// A probability row does not sum to one.
    BadDistribution {
        table: &'static str,
        row: String,
        sum: f64,
    },
    /// A probability entry is negative (or not a number).
    NegativeProbability {
        table: &'static str,
        entry: String,
        value: f64,
    },
    /// A reward magnitude exceeds the declared bound.
    RewardBound {
        state: usize,
        action: usize,
        value: f64,
        r_max: f64,
    },
    /// The initial belief is not a distribution over the declared states.
    BadBelief { detail: String },
    /// A scalar field (discount, horizon, reward bound) is out of range.
    BadScalar { detail: String },
}

impl std::fmt::Display for ModelDefect {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ModelDefect::BadDimension { detail } => write!(f, "dimension mismatch: {detail}"),
            ModelDefect::BadDistribution { table, row, sum } => {
                write!(f, "{table} row {row} sums to {sum}, expected 1")
            }
            ModelDefect::NegativeProbability {
                table,
                entry,
                value,
            } => write!(f, "{table} entry {entry} is {value}, not a nonnegative number"),
            ModelDefect::RewardBound {
                state,
                action,
                value,
                r_max,
            } => write!(
                f,
                "reward ({state},{action}) is {value}, outside the declared bound {r_max}"
            ),
            ModelDefect::BadBelief { detail } => write!(f, "initial belief: {detail}"),
            ModelDefect::BadScalar { detail } => write!(f, "{detail}"),
        }
    }
}

/// An explicit finite POMDP.
///
/// Index conventions: `transition[s][a][s']` is the probability of moving
/// from `s` to `s'` under action `a`; `reward[s][a]` is the immediate reward
/// for taking `a` in `s`; `observation[s'][a][o]` is the probability of
/// perceiving `o` after action `a` lands in `s'`.
///
/// The struct is its own JSON schema: serializing with `serde_json` produces
/// the on-disk model format, and [`DiscretePomdp::from_json_str`] parses and
/// validates it.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscretePomdp {
    pub num_states: usize,
    pub num_actions: usize,
    pub num_observations: usize,
    /// `transition[s][a][s']` = P(s' | s, a).
    pub transition: Vec<Vec<Vec<f64>>>,
    /// `reward[s][a]`, bounded by `r_max` in magnitude.
    pub reward: Vec<Vec<f64>>,
    /// `observation[s'][a][o]` = P(o | s', a).
    pub observation: Vec<Vec<Vec<f64>>>,
    /// Nominal problem horizon (planning depth used by default).
    pub horizon: usize,
    /// Discount factor in [0, 1].
    pub discount: f64,
    /// Belief the problem starts from.
    pub initial_belief: DenseBelief,
    /// Declared bound on |reward|; planners use it for exploration scaling.
    pub r_max: f64,
}

impl DiscretePomdp {
    /// Parses a model from its JSON representation and validates it,
    /// returning every violation found if the model is malformed.
    pub fn from_json_str(text: &str) -> Result<Self, Error> {
        let model: DiscretePomdp = serde_json::from_str(text)?;
        let defects = model.validate();
        if defects.is_empty() {
            Ok(model)
        } else {
            Err(Error::InvalidModel { defects })
        }
    }

    /// Checks every structural invariant and returns the full list of
    /// violations; an empty list means the model is well formed.
    ///
    /// Checks: table shapes against the declared counts, each transition and
    /// observation row a probability distribution, rewards within `±r_max`,
    /// discount in [0, 1], positive horizon and reward bound, and the
    /// initial belief a distribution over `num_states`.
    pub fn validate(&self) -> Vec<ModelDefect> {
        let mut defects = Vec::new();
        let (ns, na, no) = (self.num_states, self.num_actions, self.num_observations);

        if ns == 0 || na == 0 || no == 0 {
            defects.push(ModelDefect::BadDimension {
                detail: format!(
                    "state/action/observation counts must be positive, got ({ns},{na},{no})"
                ),
            });
            return defects; // nothing below is meaningful on empty axes
        }

        check_table(
            "transition",
            &self.transition,
            ns,
            na,
            ns,
            &mut defects,
        );
        check_table(
            "observation",
            &self.observation,
            ns,
            na,
            no,
            &mut defects,
        );

        if self.reward.len() != ns || self.reward.iter().any(|row| row.len() != na) {
            defects.push(ModelDefect::BadDimension {
                detail: format!("reward table is not {ns}x{na}"),
            });
        } else if !(self.r_max > 0.0 && self.r_max.is_finite()) {
            defects.push(ModelDefect::BadScalar {
                detail: format!("r_max is {}, expected a positive number", self.r_max),
            });
        } else {
            for s in 0..ns {
                for a in 0..na {
                    let r = self.reward[s][a];
                    if !r.is_finite() || r.abs() > self.r_max {
                        defects.push(ModelDefect::RewardBound {
                            state: s,
                            action: a,
                            value: r,
                            r_max: self.r_max,
                        });
                    }
                }
            }
        }

        if !(0.0..=1.0).contains(&self.discount) || !self.discount.is_finite() {
            defects.push(ModelDefect::BadScalar {
                detail: format!("discount is {}, expected a value in [0, 1]", self.discount),
            });
        }
        if self.horizon == 0 {
            defects.push(ModelDefect::BadScalar {
                detail: "horizon is 0, expected a positive integer".to_string(),
            });
        }

        if self.initial_belief.len() != ns {
            defects.push(ModelDefect::BadBelief {
                detail: format!(
                    "has {} entries, expected one per state ({ns})",
                    self.initial_belief.len()
                ),
            });
        } else if let Some(d) = self.initial_belief.check() {
            defects.push(d);
        }

        defects
    }

    /// Predicted belief after taking `a` without observing:
    /// `b'(s') = Σ_s T(s' | s, a) · b(s)`.
    pub fn belief_update_open(&self, b: &DenseBelief, a: usize) -> DenseBelief {
        let mut next = vec![0.0; self.num_states];
        for (s, &p) in b.probs().iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            let row = &self.transition[s][a];
            for (sp, &t) in row.iter().enumerate() {
                next[sp] += t * p;
            }
        }
        DenseBelief::from_normalized(next)
    }

    /// Posterior belief after taking `a` and observing `o`:
    /// `b'(s') ∝ Z(o | s', a) · Σ_s T(s' | s, a) · b(s)`.
    ///
    /// Fails with [`Error::ImpossibleObservation`] when the predicted
    /// probability of `o` is below [`MIN_OBSERVATION_PROB`]; the output is
    /// renormalized otherwise.
    pub fn belief_update_closed(
        &self,
        b: &DenseBelief,
        a: usize,
        o: usize,
    ) -> Result<DenseBelief, Error> {
        let predicted = self.belief_update_open(b, a);
        let mut unnorm: Vec<f64> = predicted
            .probs()
            .iter()
            .enumerate()
            .map(|(sp, &p)| self.observation[sp][a][o] * p)
            .collect();
        let total: f64 = unnorm.iter().sum();
        if total < MIN_OBSERVATION_PROB {
            return Err(Error::ImpossibleObservation {
                action: a,
                observation: o,
                probability: total,
            });
        }
        for w in &mut unnorm {
            *w /= total;
        }
        Ok(DenseBelief::from_normalized(unnorm))
    }

    /// Probability of observing `o` after taking `a` from belief `b`:
    /// `P(o | b, a) = Σ_{s'} Z(o | s', a) · Σ_s T(s' | s, a) · b(s)`.
    pub fn observation_likelihood(&self, b: &DenseBelief, a: usize, o: usize) -> f64 {
        let predicted = self.belief_update_open(b, a);
        predicted
            .probs()
            .iter()
            .enumerate()
            .map(|(sp, &p)| self.observation[sp][a][o] * p)
            .sum()
    }

    /// Expected immediate reward of `a` under `b`: `Σ_s b(s) · R(s, a)`.
    pub fn expected_reward(&self, b: &DenseBelief, a: usize) -> f64 {
        b.probs()
            .iter()
            .enumerate()
            .map(|(s, &p)| p * self.reward[s][a])
            .sum()
    }
}

fn check_table(
    name: &'static str,
    table: &[Vec<Vec<f64>>],
    dim0: usize,
    dim1: usize,
    dim2: usize,
    defects: &mut Vec<ModelDefect>,
) {
    if table.len() != dim0
        || table.iter().any(|per_action| per_action.len() != dim1)
        || table
            .iter()
            .any(|per_action| per_action.iter().any(|row| row.len() != dim2))
    {
        defects.push(ModelDefect::BadDimension {
            detail: format!("{name} table is not {dim0}x{dim1}x{dim2}"),
        });
        return;
    }
    for (i, per_action) in table.iter().enumerate() {
        for (a, row) in per_action.iter().enumerate() {
            let mut ok = true;
            for (j, &p) in row.iter().enumerate() {
                if !is_nonneg(p) {
                    defects.push(ModelDefect::NegativeProbability {
                        table: name,
                        entry: format!("({i},{a},{j})"),
                        value: p,
                    });
                    ok = false;
                }
            }
            if ok {
                let sum: f64 = row.iter().sum();
                if (sum - 1.0).abs() > PROB_SUM_TOLERANCE {
                    defects.push(ModelDefect::BadDistribution {
                        table: name,
                        row: format!("({i},{a})"),
                        sum,
                    });
                }
            }
        }
    }
}

/// Sampling interface every planner and filter works against.
///
/// States and observations are opaque `usize` indices; implementors define
/// their own encodings. Two contracts matter beyond the obvious ones:
///
/// - **Shared state draw.** [`step`](GenerativeModel::step) and
///   [`step_open`](GenerativeModel::step_open) must draw the successor state
///   from the same transition law, consuming identical randomness for that
///   draw; `step` then draws the observation afterwards. Starting both from
///   equal RNG states therefore yields the same `(s', r)` pair.
/// - **Honest weights.** [`observation_weight`](GenerativeModel::observation_weight)
///   must return the same likelihood `P(o | s', a)` that `step` samples
///   from, or filtering against this model is biased.
pub trait GenerativeModel: Send + Sync {
    /// Number of actions.
    fn num_actions(&self) -> usize;
    /// Number of distinct observations (real ones; the augmentation layer
    /// adds its null observation on top of this count).
    fn num_observations(&self) -> usize;
    /// Bound on |reward| per step.
    fn r_max(&self) -> f64;
    /// Draws a state from the initial distribution.
    fn sample_initial(&self, rng: &mut dyn RngCore) -> usize;
    /// Samples `(s', o, r)` for taking `a` in `s`.
    fn step(&self, state: usize, action: usize, rng: &mut dyn RngCore) -> (usize, usize, f64);
    /// Samples `(s', r)` only — same state draw as [`step`](GenerativeModel::step),
    /// no observation.
    fn step_open(&self, state: usize, action: usize, rng: &mut dyn RngCore) -> (usize, f64);
    /// Likelihood `P(o | s', a)` used to weight particles.
    fn observation_weight(&self, next_state: usize, action: usize, observation: usize) -> f64;
    /// True for absorbing states that end an episode.
    fn is_terminal(&self, state: usize) -> bool;
}

/// Uniform double in [0, 1) built from the top 53 bits of one `u64` draw.
pub(crate) fn uniform_f64(rng: &mut dyn RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

/// Uniform index in `0..n`. The modulo bias is below `n/2⁶⁴`, far beneath
/// anything the statistical tests can resolve.
pub(crate) fn uniform_index(rng: &mut dyn RngCore, n: usize) -> usize {
    (rng.next_u64() % n as u64) as usize
}

/// Draws an index from a probability row by inverse CDF over stored order.
pub(crate) fn sample_categorical(probs: &[f64], rng: &mut dyn RngCore) -> usize {
    let u = uniform_f64(rng);
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    // Rounding can leave acc fractionally below 1; fall back to the last
    // index that carries mass.
    probs
        .iter()
        .rposition(|&p| p > 0.0)
        .expect("categorical row with no mass")
}

impl GenerativeModel for DiscretePomdp {
    fn num_actions(&self) -> usize {
        self.num_actions
    }

    fn num_observations(&self) -> usize {
        self.num_observations
    }

    fn r_max(&self) -> f64 {
        self.r_max
    }

    fn sample_initial(&self, rng: &mut dyn RngCore) -> usize {
        sample_categorical(self.initial_belief.probs(), rng)
    }

    fn step(&self, state: usize, action: usize, rng: &mut dyn RngCore) -> (usize, usize, f64) {
        let (next, r) = self.step_open(state, action, rng);
        let o = sample_categorical(&self.observation[next][action], rng);
        (next, o, r)
    }

    fn step_open(&self, state: usize, action: usize, rng: &mut dyn RngCore) -> (usize, f64) {
        let next = sample_categorical(&self.transition[state][action], rng);
        (next, self.reward[state][action])
    }

    fn observation_weight(&self, next_state: usize, action: usize, observation: usize) -> f64 {
        self.observation[next_state][action][observation]
    }

    /// A state is terminal when it is absorbing with zero reward under every
    /// action — the convention all domain builders encode episode ends with.
    fn is_terminal(&self, state: usize) -> bool {
        (0..self.num_actions).all(|a| {
            self.transition[state][a][state] == 1.0 && self.reward[state][a] == 0.0
        })
    }
}
