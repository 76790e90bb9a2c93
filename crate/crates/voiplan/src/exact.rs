//! Exact finite-horizon value recursions over dense beliefs.
//!
//! Everything here expands the belief tree in full, so it is exponential in
//! depth and meant for desk-scale models (tiger, tiny grids) where it serves
//! as the ground truth that planners and tests are checked against.
//!
//! Five value functions, all with base case 0 at depth 0:
//!
//! - **optimal / closed-loop** `V*` — Bellman backup branching on every
//!   positive-probability observation;
//! - **open-loop** `V^OL` — backup through the predicted belief only, no
//!   observation branching anywhere below;
//! - **adaptive** `V̂*` — at each belief, compute an open-loop-style backup
//!   and a closed-loop-style backup (both recursing through `V̂*`), then keep
//!   the open one whenever it is within a `κ` fraction of the closed one:
//!   open wins iff `V̂^OL ≥ V̂^CL − κ·|V̂^CL|`, ties to open;
//! - **augmented-model** `V̂′` — the same quantity computed the other way:
//!   a penalized argmax over the doubled action set of the
//!   [`VoiPomdp`](crate::transform::VoiPomdp) view, where closed-loop
//!   variants compete with their Q-value deflated by `κ·|Q|` and the backup
//!   returns the *undeflated* Q of the winner. The two routes agreeing is a
//!   key correctness check, exercised by the verification suite;
//! - **Q-values** per base action, for diagnostics.
//!
//! Derived diagnostics: the simple VOI `V* − V^OL`, the adaptive VOI
//! `V̂^CL − V̂^OL`, the regret `|V* − V̂*|`, and its closed-form bound
//! `κ·(r_max/(1−γ))·((1−γ^d)/(1−γ))` (undefined at γ = 1).

use crate::pomdp::{DenseBelief, DiscretePomdp};
use crate::transform::{AugmentedAction, AugmentedObservation, Mode, VoiPomdp};
use crate::{Error, DEFAULT_NODE_CAP, MIN_OBSERVATION_PROB};

/// Outcome of one adaptive-value evaluation at a belief.
#[derive(Debug, Clone, PartialEq)]
pub struct AdaptiveValueResult {
    /// The adaptive value: `ol_value` or `cl_value` per the case split.
    pub value: f64,
    /// Which backup the case split kept (ties go to open-loop).
    pub chosen_mode: Mode,
    /// Maximizing action of the chosen backup; `None` at depth 0, where no
    /// action is taken. Ties resolve to the lowest action index.
    pub best_action: Option<usize>,
    /// The open-loop-style backup value at this belief.
    pub ol_value: f64,
    /// The closed-loop-style backup value at this belief.
    pub cl_value: f64,
}

/// Exact solver over one explicit model.
///
/// Construction is free; each call expands from scratch (no caching), counts
/// every belief-node evaluation, and fails with
/// [`Error::ExpansionBudgetExceeded`] past the node cap instead of hanging.
#[derive(Debug, Clone, Copy)]
pub struct ExactSolver<'a> {
    model: &'a DiscretePomdp,
    node_cap: usize,
    flip_case_split: bool,
}

impl<'a> ExactSolver<'a> {
    /// Solver with the default node cap ([`DEFAULT_NODE_CAP`]).
    pub fn new(model: &'a DiscretePomdp) -> Self {
        ExactSolver {
            model,
            node_cap: DEFAULT_NODE_CAP,
            flip_case_split: false,
        }
    }

    /// Replaces the expansion budget (number of belief nodes a single call
    /// may evaluate).
    pub fn with_node_cap(mut self, cap: usize) -> Self {
        self.node_cap = cap;
        self
    }

    /// Negative-control fixture: inverts the adaptive case-split inequality
    /// so the solver knowingly picks the wrong backup. Exists so the
    /// verification suite can prove its own checks catch a planted bug;
    /// never use it for real solving.
    pub fn with_flipped_case_split(mut self) -> Self {
        self.flip_case_split = true;
        self
    }

    /// The model being solved.
    pub fn model(&self) -> &'a DiscretePomdp {
        self.model
    }

    fn charge(&self, nodes: &mut usize) -> Result<(), Error> {
        *nodes += 1;
        if *nodes > self.node_cap {
            Err(Error::ExpansionBudgetExceeded { cap: self.node_cap })
        } else {
            Ok(())
        }
    }

    /// Optimal `d`-step value of belief `b` (full observation branching).
    pub fn value(&self, b: &DenseBelief, d: usize) -> Result<f64, Error> {
        let mut nodes = 0;
        self.value_rec(b, d, &mut nodes)
    }

    /// Closed-loop value — by definition the optimal value; kept as its own
    /// entry point so call sites can say which concept they mean.
    pub fn value_cl(&self, b: &DenseBelief, d: usize) -> Result<f64, Error> {
        self.value(b, d)
    }

    /// Open-loop `d`-step value: the best value achievable while ignoring
    /// every observation, planning on predicted beliefs only.
    pub fn value_ol(&self, b: &DenseBelief, d: usize) -> Result<f64, Error> {
        let mut nodes = 0;
        self.value_ol_rec(b, d, &mut nodes)
    }

    /// Optimal `d`-step Q-value of every base action at `b` (the summands of
    /// [`value`](ExactSolver::value) before the max).
    pub fn action_values(&self, b: &DenseBelief, d: usize) -> Result<Vec<f64>, Error> {
        let mut nodes = 0;
        (0..self.model.num_actions)
            .map(|a| self.q_value_rec(b, a, d, &mut nodes))
            .collect()
    }

    /// Adaptive `d`-step value with tolerance `kappa`, with both backups and
    /// the chosen mode exposed.
    pub fn value_adaptive(
        &self,
        b: &DenseBelief,
        d: usize,
        kappa: f64,
    ) -> Result<AdaptiveValueResult, Error> {
        let mut nodes = 0;
        self.adaptive_rec(b, d, kappa, &mut nodes)
    }

    /// The adaptive value computed via the augmented model's penalized
    /// argmax instead of the explicit case split. Ties across augmented
    /// actions resolve to the lowest augmented index, which places the
    /// open-loop block first.
    pub fn value_voi_pomdp(&self, b: &DenseBelief, d: usize, kappa: f64) -> Result<f64, Error> {
        let mut nodes = 0;
        let voi = VoiPomdp::new(self.model);
        self.voi_pomdp_rec(&voi, b, d, kappa, &mut nodes)
    }

    /// Value of observing: `V* − V^OL` at `(b, d)`. Nonnegative up to
    /// floating-point noise.
    pub fn simple_voi(&self, b: &DenseBelief, d: usize) -> Result<f64, Error> {
        Ok(self.value(b, d)? - self.value_ol(b, d)?)
    }

    /// Adaptive analogue: `V̂^CL − V̂^OL` at `(b, d, κ)`.
    pub fn adaptive_voi(&self, b: &DenseBelief, d: usize, kappa: f64) -> Result<f64, Error> {
        let r = self.value_adaptive(b, d, kappa)?;
        Ok(r.cl_value - r.ol_value)
    }

    /// What the adaptive shortcut costs: `|V* − V̂*|` at `(b, d, κ)`.
    pub fn regret(&self, b: &DenseBelief, d: usize, kappa: f64) -> Result<f64, Error> {
        let optimal = self.value(b, d)?;
        let adaptive = self.value_adaptive(b, d, kappa)?.value;
        Ok((optimal - adaptive).abs())
    }

    fn value_rec(&self, b: &DenseBelief, d: usize, nodes: &mut usize) -> Result<f64, Error> {
        self.charge(nodes)?;
        if d == 0 {
            return Ok(0.0);
        }
        let mut best = f64::NEG_INFINITY;
        for a in 0..self.model.num_actions {
            let q = self.q_value_rec(b, a, d, nodes)?;
            if q > best {
                best = q;
            }
        }
        Ok(best)
    }

    /// One optimal Q backup: immediate reward plus the discounted
    /// observation expectation of the optimal continuation. Observations
    /// with probability below [`MIN_OBSERVATION_PROB`] contribute nothing
    /// and are skipped.
    fn q_value_rec(
        &self,
        b: &DenseBelief,
        a: usize,
        d: usize,
        nodes: &mut usize,
    ) -> Result<f64, Error> {
        let m = self.model;
        let mut continuation = 0.0;
        for o in 0..m.num_observations {
            let p = m.observation_likelihood(b, a, o);
            if p < MIN_OBSERVATION_PROB {
                continue;
            }
            let post = m.belief_update_closed(b, a, o)?;
            continuation += p * self.value_rec(&post, d - 1, nodes)?;
        }
        Ok(m.expected_reward(b, a) + m.discount * continuation)
    }

    fn value_ol_rec(&self, b: &DenseBelief, d: usize, nodes: &mut usize) -> Result<f64, Error> {
        self.charge(nodes)?;
        if d == 0 {
            return Ok(0.0);
        }
        let m = self.model;
        let mut best = f64::NEG_INFINITY;
        for a in 0..m.num_actions {
            let predicted = m.belief_update_open(b, a);
            let q = m.expected_reward(b, a)
                + m.discount * self.value_ol_rec(&predicted, d - 1, nodes)?;
            if q > best {
                best = q;
            }
        }
        Ok(best)
    }

    fn adaptive_rec(
        &self,
        b: &DenseBelief,
        d: usize,
        kappa: f64,
        nodes: &mut usize,
    ) -> Result<AdaptiveValueResult, Error> {
        self.charge(nodes)?;
        if d == 0 {
            return Ok(AdaptiveValueResult {
                value: 0.0,
                chosen_mode: Mode::OpenLoop,
                best_action: None,
                ol_value: 0.0,
                cl_value: 0.0,
            });
        }
        let m = self.model;
        let (mut ol_best, mut ol_arg) = (f64::NEG_INFINITY, 0);
        let (mut cl_best, mut cl_arg) = (f64::NEG_INFINITY, 0);
        for a in 0..m.num_actions {
            let r = m.expected_reward(b, a);

            // Open-loop-style backup: adaptive continuation on the
            // prediction.
            let predicted = m.belief_update_open(b, a);
            let q_ol =
                r + m.discount * self.adaptive_rec(&predicted, d - 1, kappa, nodes)?.value;
            if q_ol > ol_best {
                ol_best = q_ol;
                ol_arg = a;
            }

            // Closed-loop-style backup: adaptive continuation per
            // observation.
            let mut continuation = 0.0;
            for o in 0..m.num_observations {
                let p = m.observation_likelihood(b, a, o);
                if p < MIN_OBSERVATION_PROB {
                    continue;
                }
                let post = m.belief_update_closed(b, a, o)?;
                continuation += p * self.adaptive_rec(&post, d - 1, kappa, nodes)?.value;
            }
            let q_cl = r + m.discount * continuation;
            if q_cl > cl_best {
                cl_best = q_cl;
                cl_arg = a;
            }
        }

        let threshold = cl_best - kappa * cl_best.abs();
        let pick_open = if self.flip_case_split {
            ol_best < threshold
        } else {
            ol_best >= threshold
        };
        Ok(if pick_open {
            AdaptiveValueResult {
                value: ol_best,
                chosen_mode: Mode::OpenLoop,
                best_action: Some(ol_arg),
                ol_value: ol_best,
                cl_value: cl_best,
            }
        } else {
            AdaptiveValueResult {
                value: cl_best,
                chosen_mode: Mode::ClosedLoop,
                best_action: Some(cl_arg),
                ol_value: ol_best,
                cl_value: cl_best,
            }
        })
    }

    fn voi_pomdp_rec(
        &self,
        voi: &VoiPomdp<'_>,
        b: &DenseBelief,
        d: usize,
        kappa: f64,
        nodes: &mut usize,
    ) -> Result<f64, Error> {
        self.charge(nodes)?;
        if d == 0 {
            return Ok(0.0);
        }
        let m = self.model;
        let mut best_score = f64::NEG_INFINITY;
        let mut best_q = 0.0;
        for index in 0..voi.num_augmented_actions() {
            let action = AugmentedAction::from_index(index, m.num_actions);
            let r = voi.expected_reward(b, action);
            let q = match action.mode {
                Mode::OpenLoop => {
                    let child = voi.belief_update(b, action, AugmentedObservation::Null)?;
                    r + m.discount * self.voi_pomdp_rec(voi, &child, d - 1, kappa, nodes)?
                }
                Mode::ClosedLoop => {
                    let mut continuation = 0.0;
                    for o in 0..m.num_observations {
                        let obs = AugmentedObservation::Real(o);
                        let p = voi.observation_likelihood(b, action, obs);
                        if p < MIN_OBSERVATION_PROB {
                            continue;
                        }
                        let post = voi.belief_update(b, action, obs)?;
                        continuation +=
                            p * self.voi_pomdp_rec(voi, &post, d - 1, kappa, nodes)?;
                    }
                    r + m.discount * continuation
                }
            };
            // Closed-loop variants compete with a deflated score, but the
            // value backed up for the winner is its raw Q.
            let score = match action.mode {
                Mode::OpenLoop => q,
                Mode::ClosedLoop => q - kappa * q.abs(),
            };
            if score > best_score {
                best_score = score;
                best_q = q;
            }
        }
        Ok(best_q)
    }
}

/// Closed-form bound on the adaptive regret:
/// `κ·(r_max/(1−γ))·((1−γ^d)/(1−γ))`.
///
/// Rejects `γ = 1` (and anything above), where the expression is undefined;
/// the regret itself is still well defined and small there, just not covered
/// by this bound.
pub fn regret_bound(kappa: f64, r_max: f64, gamma: f64, d: usize) -> Result<f64, Error> {
    if gamma >= 1.0 {
        return Err(Error::RegretBoundUndefinedAtDiscountOne);
    }
    let horizon_factor = (1.0 - gamma.powi(d as i32)) / (1.0 - gamma);
    Ok(kappa * (r_max / (1.0 - gamma)) * horizon_factor)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::fvrs::FvrsModel;
    use crate::domains::tiger::TigerModel;
    use approx::assert_abs_diff_eq;

    fn tiger() -> DiscretePomdp {
        TigerModel::default().build()
    }

    /// Beliefs on the 0.1 grid over two states.
    fn tiger_belief_grid() -> Vec<DenseBelief> {
        (0..=10)
            .map(|i| {
                let p = i as f64 / 10.0;
                DenseBelief::from_probs(vec![p, 1.0 - p]).unwrap()
            })
            .collect()
    }

    #[test]
    fn depth_zero_is_zero_on_every_route() {
        let m = tiger();
        let solver = ExactSolver::new(&m);
        let b = DenseBelief::uniform(2);
        assert_eq!(solver.value(&b, 0).unwrap(), 0.0);
        assert_eq!(solver.value_ol(&b, 0).unwrap(), 0.0);
        assert_eq!(solver.value_voi_pomdp(&b, 0, 0.3).unwrap(), 0.0);
        let r = solver.value_adaptive(&b, 0, 0.3).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.best_action, None);
        assert_eq!(r.chosen_mode, Mode::OpenLoop);
    }

    // Hand-derived tiger values at the defaults (accuracy 0.85, rewards
    // −1/+10/−100, γ = 0.95), uniform belief:
    //
    //   depth 1: every informative plan is worth less than listening once;
    //            V = max(−1, −45, −45) = −1.
    //   depth 2: one listen reaches certainty 0.85, still below the
    //            open-a-door threshold 99/110 = 0.9, so the optimum listens
    //            twice: V = −1 − 0.95 = −1.95 — and equals the open-loop
    //            value, i.e. the VOI at depth 2 is exactly zero.
    //   depth 3: two consistent listens reach 0.7225/0.745 ≈ 0.9698 > 0.9,
    //            so observations finally pay: V = 2.3098, while the
    //            open-loop value is −1 − 0.95·1.95 = −2.8525.
    #[test]
    fn tiger_uniform_values_match_hand_computation() {
        let m = tiger();
        let solver = ExactSolver::new(&m);
        let b = DenseBelief::uniform(2);
        assert_abs_diff_eq!(solver.value(&b, 1).unwrap(), -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(solver.value(&b, 2).unwrap(), -1.95, epsilon = 1e-12);
        assert_abs_diff_eq!(solver.value(&b, 3).unwrap(), 2.3098, epsilon = 1e-9);
        assert_abs_diff_eq!(solver.value_ol(&b, 2).unwrap(), -1.95, epsilon = 1e-12);
        assert_abs_diff_eq!(solver.value_ol(&b, 3).unwrap(), -2.8525, epsilon = 1e-9);

        // One informative listen: posterior (0.85, 0.15), depth-2 value ahead.
        let post = DenseBelief::from_probs(vec![0.85, 0.15]).unwrap();
        assert_abs_diff_eq!(solver.value(&post, 2).unwrap(), 3.484, epsilon = 1e-9);
    }

    #[test]
    fn tiger_voi_appears_at_depth_three() {
        // At the 0.85-accuracy defaults one listen cannot cross the door
        // threshold, so the depth-2 VOI is exactly zero; two listens can,
        // so the depth-3 VOI is 2.3098 − (−2.8525) = 5.1623.
        let m = tiger();
        let solver = ExactSolver::new(&m);
        let b = DenseBelief::uniform(2);
        assert_abs_diff_eq!(solver.simple_voi(&b, 1).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(solver.simple_voi(&b, 2).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(solver.simple_voi(&b, 3).unwrap(), 5.1623, epsilon = 1e-9);
    }

    #[test]
    fn noiseless_tiger_has_positive_voi_already_at_depth_two() {
        // With a perfect ear one listen reaches certainty and the door pays:
        // V₂ = −1 + 0.95·10 = 8.5 against an open-loop −1.95.
        let m = TigerModel {
            listen_accuracy: 1.0,
            ..TigerModel::default()
        }
        .build();
        let solver = ExactSolver::new(&m);
        let b = DenseBelief::uniform(2);
        assert_abs_diff_eq!(solver.value(&b, 2).unwrap(), 8.5, epsilon = 1e-12);
        assert_abs_diff_eq!(solver.value_ol(&b, 2).unwrap(), -1.95, epsilon = 1e-12);
        assert!(solver.value_ol(&b, 2).unwrap() < solver.value_cl(&b, 2).unwrap());
    }

    #[test]
    fn single_action_chain_accumulates_discounted_constant_reward() {
        // One state, one action, constant reward 2.5: value is a plain
        // geometric sum, identical for every planning flavor.
        let chain = DiscretePomdp {
            num_states: 1,
            num_actions: 1,
            num_observations: 1,
            transition: vec![vec![vec![1.0]]],
            reward: vec![vec![2.5]],
            observation: vec![vec![vec![1.0]]],
            horizon: 4,
            discount: 1.0,
            initial_belief: DenseBelief::one_hot(1, 0),
            r_max: 2.5,
        };
        assert!(chain.validate().is_empty());
        let solver = ExactSolver::new(&chain);
        let b = DenseBelief::one_hot(1, 0);
        assert_abs_diff_eq!(solver.value(&b, 4).unwrap(), 10.0, epsilon = 1e-12);
        assert_abs_diff_eq!(solver.value_ol(&b, 4).unwrap(), 10.0, epsilon = 1e-12);

        let discounted = DiscretePomdp {
            discount: 0.5,
            ..chain
        };
        let solver = ExactSolver::new(&discounted);
        assert_abs_diff_eq!(solver.value(&b, 3).unwrap(), 4.375, epsilon = 1e-12);
    }

    #[test]
    fn closed_loop_value_is_the_optimal_value() {
        let m = tiger();
        let solver = ExactSolver::new(&m);
        for b in tiger_belief_grid() {
            for d in 0..=3 {
                assert_eq!(
                    solver.value(&b, d).unwrap(),
                    solver.value_cl(&b, d).unwrap()
                );
            }
        }
    }

    #[test]
    fn uninformative_observations_collapse_closed_to_open() {
        let m = TigerModel::uninformative().build();
        let solver = ExactSolver::new(&m);
        for b in tiger_belief_grid() {
            for d in 1..=4 {
                let cl = solver.value_cl(&b, d).unwrap();
                let ol = solver.value_ol(&b, d).unwrap();
                assert_abs_diff_eq!(cl, ol, epsilon = 1e-9);
                assert_abs_diff_eq!(solver.simple_voi(&b, d).unwrap(), 0.0, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn depth_one_adaptive_equals_optimal_for_any_kappa() {
        let m = tiger();
        let solver = ExactSolver::new(&m);
        for b in tiger_belief_grid() {
            let v1 = solver.value(&b, 1).unwrap();
            for kappa in [0.0, 0.3, 1.0] {
                let r = solver.value_adaptive(&b, 1, kappa).unwrap();
                assert_abs_diff_eq!(r.value, v1, epsilon = 1e-12);
                // One-step backups coincide, so the tie goes to open-loop.
                assert_eq!(r.chosen_mode, Mode::OpenLoop);
                assert_abs_diff_eq!(r.ol_value, r.cl_value, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn adaptive_at_kappa_zero_recovers_the_optimal_value() {
        let m = tiger();
        let solver = ExactSolver::new(&m);
        for b in tiger_belief_grid() {
            for d in 1..=4 {
                let adaptive = solver.value_adaptive(&b, d, 0.0).unwrap().value;
                let optimal = solver.value(&b, d).unwrap();
                assert_abs_diff_eq!(adaptive, optimal, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn adaptive_at_kappa_one_on_a_nonnegative_model_goes_fully_open_loop() {
        // With every value nonnegative the closed backup can never beat the
        // κ=1 threshold of zero, so the adaptive recursion is the open-loop
        // recursion. Uses a rock-sampling variant whose bad-sample penalty
        // is zeroed so all rewards are ≥ 0.
        let model = FvrsModel {
            grid_size: 3,
            rock_count: 2,
            bad_sample_reward: 0.0,
            ..FvrsModel::default()
        }
        .to_discrete()
        .unwrap();
        assert!(model.reward.iter().flatten().all(|&r| r >= 0.0));
        let solver = ExactSolver::new(&model);
        let b = model.initial_belief.clone();
        for d in 1..=3 {
            let r = solver.value_adaptive(&b, d, 1.0).unwrap();
            assert_eq!(r.chosen_mode, Mode::OpenLoop);
            assert_abs_diff_eq!(r.value, solver.value_ol(&b, d).unwrap(), epsilon = 1e-9);
        }
    }

    #[test]
    fn augmented_route_matches_the_case_split_route() {
        let m = tiger();
        let solver = ExactSolver::new(&m);
        for b in tiger_belief_grid() {
            for d in 1..=3 {
                for kappa in [0.0, 0.1, 0.3, 1.0] {
                    let case_split = solver.value_adaptive(&b, d, kappa).unwrap().value;
                    let augmented = solver.value_voi_pomdp(&b, d, kappa).unwrap();
                    assert_abs_diff_eq!(augmented, case_split, epsilon = 1e-9);
                }
            }
        }
    }

    #[test]
    fn augmented_route_at_kappa_zero_recovers_the_optimal_value() {
        let m = tiger();
        let solver = ExactSolver::new(&m);
        let b = DenseBelief::uniform(2);
        for d in 1..=4 {
            assert_abs_diff_eq!(
                solver.value_voi_pomdp(&b, d, 0.0).unwrap(),
                solver.value(&b, d).unwrap(),
                epsilon = 1e-9
            );
        }
    }

    #[test]
    fn value_sandwich_holds_across_kappa_depth_and_discount() {
        // V^OL ≤ V̂* ≤ V* at every grid point, including undiscounted.
        for discount in [0.9, 0.95, 1.0] {
            let m = TigerModel {
                discount,
                ..TigerModel::default()
            }
            .build();
            let solver = ExactSolver::new(&m);
            for b in tiger_belief_grid() {
                for d in 1..=3 {
                    let ol = solver.value_ol(&b, d).unwrap();
                    let cl = solver.value(&b, d).unwrap();
                    assert!(ol <= cl + 1e-9, "Jensen violated: {ol} > {cl}");
                    for kappa in [0.0, 0.1, 1.0] {
                        let adaptive = solver.value_adaptive(&b, d, kappa).unwrap().value;
                        assert!(
                            ol - 1e-9 <= adaptive && adaptive <= cl + 1e-9,
                            "sandwich violated at κ={kappa}, d={d}: \
                             ol={ol}, adaptive={adaptive}, cl={cl}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn adaptive_voi_is_the_backup_gap() {
        let m = tiger();
        let solver = ExactSolver::new(&m);
        let b = DenseBelief::uniform(2);
        // Depth 3, uniform: V̂^CL = 2.3098, V̂^OL = −2.8525 per the hand
        // derivation above.
        assert_abs_diff_eq!(
            solver.adaptive_voi(&b, 3, 0.1).unwrap(),
            5.1623,
            epsilon = 1e-9
        );
        assert_abs_diff_eq!(solver.adaptive_voi(&b, 1, 0.1).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn regret_is_zero_at_kappa_zero_and_bounded_elsewhere() {
        for discount in [0.9, 0.95] {
            let m = TigerModel {
                discount,
                ..TigerModel::default()
            }
            .build();
            let solver = ExactSolver::new(&m);
            for b in tiger_belief_grid() {
                for d in 1..=3 {
                    assert!(solver.regret(&b, d, 0.0).unwrap() <= 1e-12);
                    for kappa in [0.05, 0.1, 0.3, 1.0] {
                        let regret = solver.regret(&b, d, kappa).unwrap();
                        let bound = regret_bound(kappa, m.r_max, m.discount, d).unwrap();
                        assert!(
                            regret <= bound,
                            "regret {regret} above bound {bound} at κ={kappa}, d={d}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn regret_bound_matches_direct_evaluation() {
        // κ·(r_max/(1−γ))·((1−γ^d)/(1−γ)) at (0.1, 10, 0.9, 1):
        // 0.1 · 100 · 1 = 10.
        assert_abs_diff_eq!(
            regret_bound(0.1, 10.0, 0.9, 1).unwrap(),
            10.0,
            epsilon = 1e-12
        );
        assert_eq!(regret_bound(0.0, 10.0, 0.9, 5).unwrap(), 0.0);
    }

    #[test]
    fn regret_bound_is_monotone_in_depth_and_linear_in_kappa() {
        for d in 1..10 {
            let shallow = regret_bound(0.2, 50.0, 0.9, d).unwrap();
            let deep = regret_bound(0.2, 50.0, 0.9, d + 1).unwrap();
            assert!(deep >= shallow);
        }
        let one = regret_bound(0.1, 50.0, 0.95, 4).unwrap();
        let two = regret_bound(0.2, 50.0, 0.95, 4).unwrap();
        assert_abs_diff_eq!(two, 2.0 * one, epsilon = 1e-12);
    }

    #[test]
    fn regret_bound_rejects_undiscounted_problems() {
        assert!(matches!(
            regret_bound(0.1, 10.0, 1.0, 3),
            Err(Error::RegretBoundUndefinedAtDiscountOne)
        ));
    }

    #[test]
    fn expansion_budget_is_enforced() {
        let m = tiger();
        let solver = ExactSolver::new(&m).with_node_cap(10);
        let b = DenseBelief::uniform(2);
        let err = solver.value(&b, 3).unwrap_err();
        assert!(matches!(err, Error::ExpansionBudgetExceeded { cap: 10 }));
    }

    #[test]
    fn flipped_case_split_breaks_kappa_zero_exactness() {
        // The negative-control fixture must actually be broken: picking the
        // wrong backup at κ = 0 leaves a visible regret at depth 3.
        let m = tiger();
        let flipped = ExactSolver::new(&m).with_flipped_case_split();
        let b = DenseBelief::uniform(2);
        let regret = flipped.regret(&b, 3, 0.0).unwrap();
        assert!(
            regret > 1.0,
            "flipped case split should be visibly wrong, regret was {regret}"
        );
    }
}
