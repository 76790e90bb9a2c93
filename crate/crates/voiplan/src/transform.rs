//! The mode-augmented POMDP: planning over "act and look" versus "act blind".
//!
//! Given a base model with actions `A` and observations `O`, the augmented
//! model has:
//!
//! - action set `A' = A_OL ∪ A_CL` — every base action in an *open-loop*
//!   variant (indices `0..|A|`) and a *closed-loop* variant (indices
//!   `|A|..2|A|`);
//! - observation set `O' = O ∪ {null}` — the null observation (index `|O|`)
//!   is emitted, with probability one, exactly by open-loop actions, while
//!   closed-loop actions keep the base observation law;
//! - unchanged transitions and rewards for both variants of an action.
//!
//! Conditioning a belief on the null observation is a no-op beyond state
//! prediction, so a planner that picks the open-loop variant of an action
//! has chosen to skip observation branching at that node — the augmentation
//! turns the open/closed planning choice into an ordinary action choice.
//! Both views here are O(1) wrappers; no augmented table is materialized.

use rand::RngCore;

use crate::pomdp::{DenseBelief, DiscretePomdp, GenerativeModel};
use crate::Error;

/// Whether an augmented action branches on the observation it produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Mode {
    /// Skip the observation: the lookahead continues on the predicted belief.
    OpenLoop,
    /// Receive the observation: the lookahead branches per outcome.
    ClosedLoop,
}

impl Mode {
    fn name(self) -> &'static str {
        match self {
            Mode::OpenLoop => "open-loop",
            Mode::ClosedLoop => "closed-loop",
        }
    }
}

/// A base action tagged with a planning mode.
///
/// Augmented actions are indexed with the open-loop block first: the
/// open-loop variant of base action `a` has index `a`, the closed-loop
/// variant has index `|A| + a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AugmentedAction {
    pub base: usize,
    pub mode: Mode,
}

impl AugmentedAction {
    /// Open-loop variant of `base`.
    pub fn open(base: usize) -> Self {
        AugmentedAction {
            base,
            mode: Mode::OpenLoop,
        }
    }

    /// Closed-loop variant of `base`.
    pub fn closed(base: usize) -> Self {
        AugmentedAction {
            base,
            mode: Mode::ClosedLoop,
        }
    }

    /// Position in the augmented action set of a model with
    /// `num_base_actions` actions.
    pub fn index(self, num_base_actions: usize) -> usize {
        match self.mode {
            Mode::OpenLoop => self.base,
            Mode::ClosedLoop => num_base_actions + self.base,
        }
    }

    /// Inverse of [`index`](AugmentedAction::index).
    pub fn from_index(index: usize, num_base_actions: usize) -> Self {
        if index < num_base_actions {
            AugmentedAction::open(index)
        } else {
            AugmentedAction::closed(index - num_base_actions)
        }
    }
}

/// A base observation or the null observation of the augmented model.
///
/// The null observation is encoded as index `|O|`, after all real ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AugmentedObservation {
    Real(usize),
    Null,
}

impl AugmentedObservation {
    /// Position in the augmented observation set of a model with
    /// `num_base_observations` observations.
    pub fn index(self, num_base_observations: usize) -> usize {
        match self {
            AugmentedObservation::Real(o) => o,
            AugmentedObservation::Null => num_base_observations,
        }
    }

    /// Inverse of [`index`](AugmentedObservation::index).
    pub fn from_index(index: usize, num_base_observations: usize) -> Self {
        if index < num_base_observations {
            AugmentedObservation::Real(index)
        } else {
            AugmentedObservation::Null
        }
    }

    fn kind(self) -> &'static str {
        match self {
            AugmentedObservation::Real(_) => "real",
            AugmentedObservation::Null => "null",
        }
    }
}

/// Dense-belief view of the augmented model over an explicit base model.
///
/// Used by the exact solvers; every accessor computes from the base tables
/// on the fly.
#[derive(Debug, Clone, Copy)]
pub struct VoiPomdp<'a> {
    base: &'a DiscretePomdp,
}

impl<'a> VoiPomdp<'a> {
    /// Wraps a base model. The base is borrowed, not copied.
    pub fn new(base: &'a DiscretePomdp) -> Self {
        VoiPomdp { base }
    }

    /// The wrapped base model.
    pub fn base(&self) -> &'a DiscretePomdp {
        self.base
    }

    /// `2·|A|`: every base action in both modes.
    pub fn num_augmented_actions(&self) -> usize {
        2 * self.base.num_actions
    }

    /// `|O| + 1`: the base observations plus the null observation.
    pub fn num_augmented_observations(&self) -> usize {
        self.base.num_observations + 1
    }

    /// Augmented transition probability — identical to the base law for
    /// both variants of an action.
    pub fn transition_prob(&self, s: usize, action: AugmentedAction, sp: usize) -> f64 {
        self.base.transition[s][action.base][sp]
    }

    /// Augmented reward — identical to the base reward for both variants.
    pub fn reward(&self, s: usize, action: AugmentedAction) -> f64 {
        self.base.reward[s][action.base]
    }

    /// Augmented observation probability `Z'(o' | s', a')`: an indicator on
    /// the null observation under open-loop actions, the base law on real
    /// observations under closed-loop actions.
    pub fn observation_prob(
        &self,
        sp: usize,
        action: AugmentedAction,
        obs: AugmentedObservation,
    ) -> f64 {
        match (action.mode, obs) {
            (Mode::OpenLoop, AugmentedObservation::Null) => 1.0,
            (Mode::OpenLoop, AugmentedObservation::Real(_)) => 0.0,
            (Mode::ClosedLoop, AugmentedObservation::Null) => 0.0,
            (Mode::ClosedLoop, AugmentedObservation::Real(o)) => {
                self.base.observation[sp][action.base][o]
            }
        }
    }

    /// Expected immediate reward under `b` — mode-independent.
    pub fn expected_reward(&self, b: &DenseBelief, action: AugmentedAction) -> f64 {
        self.base.expected_reward(b, action.base)
    }

    /// Probability of an augmented observation from belief `b`.
    pub fn observation_likelihood(
        &self,
        b: &DenseBelief,
        action: AugmentedAction,
        obs: AugmentedObservation,
    ) -> f64 {
        match (action.mode, obs) {
            (Mode::OpenLoop, AugmentedObservation::Null) => 1.0,
            (Mode::OpenLoop, AugmentedObservation::Real(_)) => 0.0,
            (Mode::ClosedLoop, AugmentedObservation::Null) => 0.0,
            (Mode::ClosedLoop, AugmentedObservation::Real(o)) => {
                self.base.observation_likelihood(b, action.base, o)
            }
        }
    }

    /// Belief update in the augmented model.
    ///
    /// Open-loop actions pair with the null observation and delegate to the
    /// base open update; closed-loop actions pair with real observations and
    /// delegate to the base closed update. Any other pairing is a
    /// [`Error::ModeObservationMismatch`].
    pub fn belief_update(
        &self,
        b: &DenseBelief,
        action: AugmentedAction,
        obs: AugmentedObservation,
    ) -> Result<DenseBelief, Error> {
        match (action.mode, obs) {
            (Mode::OpenLoop, AugmentedObservation::Null) => {
                Ok(self.base.belief_update_open(b, action.base))
            }
            (Mode::ClosedLoop, AugmentedObservation::Real(o)) => {
                self.base.belief_update_closed(b, action.base, o)
            }
            (mode, obs) => Err(Error::ModeObservationMismatch {
                action_mode: mode.name(),
                observation_kind: obs.kind(),
            }),
        }
    }
}

/// Sampling view of the augmented model over any generative base model.
///
/// Open-loop steps suppress the observation draw (emitting the null
/// observation), closed-loop steps delegate to the base `step`. Because the
/// base model's `step` and `step_open` share their state draw, the two
/// variants of an action produce identical `(s', r)` from identical RNG
/// states — the modes differ only in what the planner gets to see.
#[derive(Clone, Copy)]
pub struct AugmentedModel<'a> {
    base: &'a dyn GenerativeModel,
}

impl<'a> AugmentedModel<'a> {
    /// Wraps a base generative model.
    pub fn new(base: &'a dyn GenerativeModel) -> Self {
        AugmentedModel { base }
    }

    /// The wrapped base model.
    pub fn base(&self) -> &'a dyn GenerativeModel {
        self.base
    }

    /// Number of base actions.
    pub fn num_base_actions(&self) -> usize {
        self.base.num_actions()
    }

    /// `2·|A|`.
    pub fn num_augmented_actions(&self) -> usize {
        2 * self.base.num_actions()
    }

    /// `|O| + 1`, counting the null observation.
    pub fn num_augmented_observations(&self) -> usize {
        self.base.num_observations() + 1
    }

    /// Samples one augmented step.
    pub fn step(
        &self,
        state: usize,
        action: AugmentedAction,
        rng: &mut dyn RngCore,
    ) -> (usize, AugmentedObservation, f64) {
        match action.mode {
            Mode::OpenLoop => {
                let (sp, r) = self.base.step_open(state, action.base, rng);
                (sp, AugmentedObservation::Null, r)
            }
            Mode::ClosedLoop => {
                let (sp, o, r) = self.base.step(state, action.base, rng);
                (sp, AugmentedObservation::Real(o), r)
            }
        }
    }

    /// Likelihood of an augmented observation, for filtering in the
    /// augmented model.
    pub fn observation_weight(
        &self,
        next_state: usize,
        action: AugmentedAction,
        obs: AugmentedObservation,
    ) -> f64 {
        match (action.mode, obs) {
            (Mode::OpenLoop, AugmentedObservation::Null) => 1.0,
            (Mode::OpenLoop, AugmentedObservation::Real(_)) => 0.0,
            (Mode::ClosedLoop, AugmentedObservation::Null) => 0.0,
            (Mode::ClosedLoop, AugmentedObservation::Real(o)) => {
                self.base.observation_weight(next_state, action.base, o)
            }
        }
    }

    /// Delegates to the base model.
    pub fn is_terminal(&self, state: usize) -> bool {
        self.base.is_terminal(state)
    }

    /// Delegates to the base model.
    pub fn r_max(&self) -> f64 {
        self.base.r_max()
    }
}
