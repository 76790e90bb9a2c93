//! Monte Carlo tree search over the augmented (mode-annotated) action space.
//!
//! One engine serves four planners, distinguished only by which augmented
//! arms they admit and how they score a visited arm:
//!
//! | algorithm  | arms        | score of a visited arm                        |
//! |------------|-------------|-----------------------------------------------|
//! | `Voimcp`   | OL and CL   | `Q̄ + B` (OL), `Q̄ − κ_eff·|Q̄| + B` (CL)      |
//! | `Pouct`    | CL only     | `Q̄ + c·√(ln N(h)/N(ha))`                      |
//! | `Iucb`     | CL only     | PO-UCT score + weighted observation entropy    |
//! | `OpenLoop` | OL only     | `Q̄ + B`                                       |
//!
//! `B` is the polynomial bonus `β^{1/ξ}·N(h)^{α/ξ}/N(ha)^{1−η}` and `κ_eff`
//! comes from the configured deflation schedule: either the fixed `κ` or a
//! count-based annealing `κ_max·x/(1+x)` with `x = (κ/κ_max)·B`, optionally
//! clipped to `B/(c_κ·V_max)` so that deflation provably stays dominated by
//! exploration (the clip is the default; `V_max` is the discounted-return
//! magnitude bound).
//!
//! The observation-entropy heuristic used by `Iucb` is not uniquely pinned
//! down by its original description, so the formula implemented here is
//! documented as ground truth: the exploration term is augmented with
//! `entropy_weight · ucb_c · Ĥ(ha)`, where `Ĥ(ha)` is the Shannon entropy of
//! the arm's observation-child visit distribution normalized by
//! `ln(max(2, |O|))` to land in [0, 1]; arms with fewer than two visited
//! observation children get zero entropy bonus. With `entropy_weight = 0`
//! the planner is identical to `Pouct`.
//!
//! Bookkeeping follows the "count every entry" convention: expanding a node
//! initializes `N(h) = 1`, and each later pass through the node increments
//! `N(h)` and the selected arm's `N(ha)` once, so
//! `N(h) = Σ_a N(ha) + 1` holds after every simulation. Selection treats
//! unvisited arms as infinitely attractive; all argmaxes break ties toward
//! the lowest arm index, with the open-loop block ordered before the
//! closed-loop block. Search is deterministic given the RNG: identical
//! seeds yield byte-identical trees.
//!
//! Each call builds a fresh tree and discards it afterwards; there is no
//! tree reuse between planning calls.

use std::fmt;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::belief::ParticleBelief;
use crate::pomdp::{uniform_index, GenerativeModel};
use crate::transform::{AugmentedAction, AugmentedModel, Mode};
use crate::Error;

/// Which planner drives arm admission and scoring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    /// Value-of-information planner over both arm blocks with κ deflation.
    Voimcp,
    /// Classic partially observable UCT: closed-loop arms, UCB1 scores.
    Pouct,
    /// PO-UCT plus an observation-entropy exploration heuristic.
    Iucb,
    /// Pure open-loop search: open arms only, polynomial bonus.
    OpenLoop,
}

impl Algorithm {
    fn token(self) -> &'static str {
        match self {
            Algorithm::Voimcp => "voimcp",
            Algorithm::Pouct => "pouct",
            Algorithm::Iucb => "iucb",
            Algorithm::OpenLoop => "open_loop",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// Which block(s) of the augmented action space a planner may select from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionSet {
    /// Both open-loop and closed-loop variants (2·|A| arms).
    Full,
    /// Closed-loop variants only — the ordinary action space.
    ClosedOnly,
    /// Open-loop variants only.
    OpenOnly,
}

/// Exploration-term shape for visited arms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BonusRule {
    /// `β^{1/ξ}·N(h)^{α/ξ}/N(ha)^{1−η}`.
    Polynomial,
    /// `ucb_c·√(ln N(h)/N(ha))`.
    Ucb1,
}

/// How the deflation coefficient evolves with the exploration bonus.
///
/// JSON form is tagged: `{"type": "fixed"}` or
/// `{"type": "count_based", "kappa_max": …, "clip_to_premise": …}`.
/// Deserialization is hand-rolled so that unknown keys are rejected in
/// every variant, which the derive cannot promise for tagged enums.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum KappaSchedule {
    /// `κ_eff = κ` at every selection.
    Fixed,
    /// Annealed `κ_eff = κ_max·x/(1+x)` with `x = (κ/κ_max)·B`, so the
    /// deflation fades as arms accumulate visits and the bonus shrinks.
    CountBased {
        /// Asymptote of the schedule; defaults to `2κ`, which makes the
        /// configured `κ` the mid-schedule value.
        kappa_max: Option<f64>,
        /// Additionally clip to `B/(c_κ·V_max)` so the deflation never
        /// exceeds the exploration bonus scale — the regime the annealed
        /// convergence analysis assumes. Defaults to true; disable to get
        /// the literal count-based schedule.
        clip_to_premise: bool,
    },
}

impl<'de> Deserialize<'de> for KappaSchedule {
    fn deserialize<D>(deserializer: D) -> Result<Self, D::Error>
    where
        D: serde::Deserializer<'de>,
    {
        use serde::de::Error as _;

        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct FixedFields {}

        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct CountBasedFields {
            #[serde(default)]
            kappa_max: Option<f64>,
            #[serde(default = "default_true")]
            clip_to_premise: bool,
        }

        let mut map = match serde_json::Value::deserialize(deserializer)? {
            serde_json::Value::Object(map) => map,
            other => {
                return Err(D::Error::custom(format!(
                    "kappa_schedule must be an object, got {other}"
                )))
            }
        };
        let tag = match map.remove("type") {
            Some(serde_json::Value::String(tag)) => tag,
            Some(_) => return Err(D::Error::custom("kappa_schedule \"type\" must be a string")),
            None => return Err(D::Error::missing_field("type")),
        };
        let rest = serde_json::Value::Object(map);
        match tag.as_str() {
            "fixed" => {
                serde_json::from_value::<FixedFields>(rest).map_err(D::Error::custom)?;
                Ok(KappaSchedule::Fixed)
            }
            "count_based" => {
                let fields =
                    serde_json::from_value::<CountBasedFields>(rest).map_err(D::Error::custom)?;
                Ok(KappaSchedule::CountBased {
                    kappa_max: fields.kappa_max,
                    clip_to_premise: fields.clip_to_premise,
                })
            }
            other => Err(D::Error::unknown_variant(other, &["fixed", "count_based"])),
        }
    }
}

/// Leaf evaluation policy for freshly expanded nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RolloutPolicy {
    /// Uniform-random admissible arms until the horizon or a terminal state.
    Random,
}

/// Per-depth override of the polynomial-bonus parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DepthParams {
    pub beta: f64,
    pub xi: f64,
    pub alpha: f64,
}

fn default_true() -> bool {
    true
}

/// Full planner configuration. Deserializes from JSON with every field
/// optional except what the caller chooses to pin; unknown keys are
/// rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PlannerConfig {
    pub algorithm: Algorithm,
    /// Number of tree queries (simulations) per planning call.
    pub queries: usize,
    /// Planning horizon D: simulations and rollouts stop at this depth.
    pub horizon: usize,
    pub discount: f64,
    /// Polynomial-bonus scale; with `xi = 1` this is the experiment's `c`.
    pub beta: f64,
    pub xi: f64,
    pub alpha: f64,
    /// Visit-count exponent: the bonus decays as `N(ha)^{η−1}`.
    pub eta: f64,
    /// Value-of-information tolerance: deflation strength on closed arms.
    pub kappa: f64,
    pub kappa_schedule: KappaSchedule,
    pub rollout: RolloutPolicy,
    /// Exploration constant for the UCB1 bonus (and the entropy weight's
    /// scale in `Iucb`).
    pub ucb_c: f64,
    /// RNG seed used by callers that construct the search RNG from config.
    pub seed: u64,
    /// Annealing dominance constant (`> 1`) for the clipped schedule.
    pub c_kappa: f64,
    /// Override of the algorithm's default arm admission.
    pub action_set: Option<ActionSet>,
    /// Override of the algorithm's default exploration-term shape.
    pub bonus_rule: Option<BonusRule>,
    /// Optional per-depth (β, ξ, α) table; depths beyond the table reuse
    /// its last entry.
    pub per_depth: Option<Vec<DepthParams>>,
    /// Weight of the observation-entropy heuristic in `Iucb`.
    pub entropy_weight: f64,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        PlannerConfig {
            algorithm: Algorithm::Voimcp,
            queries: 1000,
            horizon: 10,
            discount: 0.95,
            beta: 10.0,
            xi: 1.0,
            alpha: 0.25,
            eta: 0.5,
            kappa: 0.0,
            kappa_schedule: KappaSchedule::Fixed,
            rollout: RolloutPolicy::Random,
            ucb_c: 10.0,
            seed: 0,
            c_kappa: 2.0,
            action_set: None,
            bonus_rule: None,
            per_depth: None,
            entropy_weight: 1.0,
        }
    }
}

impl PlannerConfig {
    /// Checks every config invariant, returning the first violation.
    pub fn validate(&self) -> Result<(), Error> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.queries == 0 {
            return bad("queries must be at least 1".into());
        }
        if self.horizon == 0 {
            return bad("horizon must be at least 1".into());
        }
        if !(0.0..=1.0).contains(&self.discount) {
            return bad(format!("discount {} outside [0, 1]", self.discount));
        }
        if !(0.5..1.0).contains(&self.eta) {
            return bad(format!("eta {} outside [1/2, 1)", self.eta));
        }
        if !(0.0..=1.0).contains(&self.kappa) {
            return bad(format!("kappa {} outside [0, 1]", self.kappa));
        }
        if self.c_kappa <= 1.0 {
            return bad(format!("c_kappa {} must exceed 1", self.c_kappa));
        }
        if self.beta < 0.0 || self.alpha < 0.0 || self.xi <= 0.0 {
            return bad(format!(
                "bonus parameters must satisfy beta ≥ 0, alpha ≥ 0, xi > 0 \
                 (got beta={}, alpha={}, xi={})",
                self.beta, self.alpha, self.xi
            ));
        }
        if self.ucb_c < 0.0 {
            return bad(format!("ucb_c {} must be nonnegative", self.ucb_c));
        }
        if self.entropy_weight < 0.0 {
            return bad(format!(
                "entropy_weight {} must be nonnegative",
                self.entropy_weight
            ));
        }
        if let KappaSchedule::CountBased { kappa_max, .. } = self.kappa_schedule {
            if let Some(k) = kappa_max {
                if k <= 0.0 {
                    return bad(format!("kappa_max {k} must be positive"));
                }
            }
        }
        if let Some(table) = &self.per_depth {
            if table.is_empty() {
                return bad("per_depth table must not be empty when present".into());
            }
            for (i, row) in table.iter().enumerate() {
                if row.beta < 0.0 || row.alpha < 0.0 || row.xi <= 0.0 {
                    return bad(format!(
                        "per_depth[{i}] must satisfy beta ≥ 0, alpha ≥ 0, xi > 0"
                    ));
                }
            }
        }
        Ok(())
    }

    /// The arm blocks this configuration admits: the explicit override if
    /// set, otherwise the algorithm's native choice.
    pub fn admissible_set(&self) -> ActionSet {
        self.action_set.unwrap_or(match self.algorithm {
            Algorithm::Voimcp => ActionSet::Full,
            Algorithm::Pouct | Algorithm::Iucb => ActionSet::ClosedOnly,
            Algorithm::OpenLoop => ActionSet::OpenOnly,
        })
    }

    /// The exploration-term shape: the explicit override if set, otherwise
    /// the algorithm's native choice.
    pub fn bonus_rule(&self) -> BonusRule {
        self.bonus_rule.unwrap_or(match self.algorithm {
            Algorithm::Voimcp | Algorithm::OpenLoop => BonusRule::Polynomial,
            Algorithm::Pouct | Algorithm::Iucb => BonusRule::Ucb1,
        })
    }

    /// Polynomial-bonus parameters in effect at `depth`.
    fn depth_params(&self, depth: usize) -> (f64, f64, f64) {
        match &self.per_depth {
            Some(table) => {
                let row = table[depth.min(table.len() - 1)];
                (row.beta, row.xi, row.alpha)
            }
            None => (self.beta, self.xi, self.alpha),
        }
    }
}

/// Polynomial exploration bonus `β^{1/ξ}·N(h)^{α/ξ}/N(ha)^{1−η}`.
///
/// With `ξ = 1`, `α = 1/4`, `η = 1/2` this is the experimental scaling
/// `β·N(h)^{1/4}/√N(ha)`.
pub fn bonus(n_h: u64, n_ha: u64, beta: f64, xi: f64, alpha: f64, eta: f64) -> f64 {
    beta.powf(1.0 / xi) * (n_h as f64).powf(alpha / xi) / (n_ha as f64).powf(1.0 - eta)
}

/// Mode-aware selection score: open arms take the plain optimistic score
/// `Q̄ + B`; closed arms pay the deflation `κ_eff·|Q̄|` first, which
/// worsens positive and negative estimates alike.
pub fn ucb_voi(q_mean: f64, mode: Mode, kappa_eff: f64, bonus: f64) -> f64 {
    match mode {
        Mode::OpenLoop => q_mean + bonus,
        Mode::ClosedLoop => q_mean - kappa_eff * q_mean.abs() + bonus,
    }
}

/// Classic UCB1 score `Q̄ + c·√(ln N(h)/N(ha))`.
pub fn ucb_pouct(q_mean: f64, n_ha: u64, c: f64, ln_n_h: f64) -> f64 {
    q_mean + c * (ln_n_h / n_ha as f64).sqrt()
}

/// Deflation coefficient in effect for one selection, given the exploration
/// bonus `b` of the arm under consideration and the search-wide return
/// magnitude bound `value_bound`.
pub fn kappa_effective(
    schedule: KappaSchedule,
    kappa: f64,
    c_kappa: f64,
    b: f64,
    value_bound: f64,
) -> f64 {
    match schedule {
        KappaSchedule::Fixed => kappa,
        KappaSchedule::CountBased {
            kappa_max,
            clip_to_premise,
        } => {
            if kappa == 0.0 {
                return 0.0;
            }
            let kappa_max = kappa_max.unwrap_or(2.0 * kappa);
            let x = (kappa / kappa_max) * b;
            let annealed = kappa_max * x / (1.0 + x);
            if clip_to_premise {
                annealed.min(b / (c_kappa * value_bound))
            } else {
                annealed
            }
        }
    }
}

/// Largest possible discounted-return magnitude over `horizon` steps.
pub fn value_bound(r_max: f64, discount: f64, horizon: usize) -> f64 {
    if discount >= 1.0 {
        r_max * horizon as f64
    } else {
        r_max * (1.0 - discount.powi(horizon as i32)) / (1.0 - discount)
    }
}

/// Index of a node in the search tree's arena.
pub type NodeId = usize;

/// Statistics of one arm (augmented action) under a history node.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionEdge {
    pub action: AugmentedAction,
    /// N(ha): simulations that selected this arm here.
    pub visits: u64,
    /// Q̄(ha): running mean of undeflated discounted returns.
    pub mean: f64,
    /// Observation children in first-traversal order, as
    /// (augmented observation index, child node) pairs.
    pub children: Vec<(usize, NodeId)>,
}

impl ActionEdge {
    fn new(action: AugmentedAction) -> Self {
        ActionEdge {
            action,
            visits: 0,
            mean: 0.0,
            children: Vec::new(),
        }
    }
}

/// One history node: a belief-state equivalent reached by a unique
/// action-observation path from the root.
#[derive(Debug, Clone, PartialEq)]
pub struct HistoryNode {
    pub depth: usize,
    /// N(h): 1 at expansion plus one per later pass.
    pub visits: u64,
    /// Arm statistics, in admissible order; empty until the node is
    /// expanded.
    pub arms: Vec<ActionEdge>,
}

/// Arena-allocated search tree; node 0 is the root. Equality is exact
/// (including every float), which is how reduction tests assert that two
/// configurations perform identical searches.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchTree {
    nodes: Vec<HistoryNode>,
}

/// Shape summary of a finished search tree.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreeStats {
    /// Depth of the deepest history node that exists in the tree.
    pub max_depth: usize,
    /// Mean, over traversed action nodes (arms with at least one visit), of
    /// the number of distinct observation children expanded under the arm.
    /// Open-loop arms always contribute exactly 1, closed-loop arms
    /// contribute one entry per distinct observation sampled through them,
    /// so the statistic measures how much of the budget goes into splitting
    /// on observations.
    pub effective_branching: f64,
}

impl SearchTree {
    fn with_root() -> Self {
        SearchTree {
            nodes: vec![HistoryNode {
                depth: 0,
                visits: 0,
                arms: Vec::new(),
            }],
        }
    }

    #[cfg(test)]
    pub(crate) fn from_nodes(nodes: Vec<HistoryNode>) -> Self {
        SearchTree { nodes }
    }

    /// All nodes in creation order; index 0 is the root.
    pub fn nodes(&self) -> &[HistoryNode] {
        &self.nodes
    }

    /// The root history node.
    pub fn root(&self) -> &HistoryNode {
        &self.nodes[0]
    }

    /// Number of history nodes in the tree.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    /// True only for a tree with no nodes, which `search` never produces.
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Visit-weighted mean of the root arm values: the search's estimate of
    /// the root belief's value. Zero when no root arm has been visited.
    pub fn root_value(&self) -> f64 {
        let root = self.root();
        let total: u64 = root.arms.iter().map(|a| a.visits).sum();
        if total == 0 {
            return 0.0;
        }
        root.arms
            .iter()
            .map(|a| a.visits as f64 * a.mean)
            .sum::<f64>()
            / total as f64
    }

    /// Computes the tree-shape statistics (see [`TreeStats`]).
    pub fn stats(&self) -> TreeStats {
        let max_depth = self.nodes.iter().map(|n| n.depth).max().unwrap_or(0);
        let mut traversed_arms = 0u64;
        let mut observation_children = 0u64;
        for node in &self.nodes {
            for arm in &node.arms {
                if arm.visits >= 1 {
                    traversed_arms += 1;
                    observation_children += arm.children.len() as u64;
                }
            }
        }
        let effective_branching = if traversed_arms == 0 {
            0.0
        } else {
            observation_children as f64 / traversed_arms as f64
        };
        TreeStats {
            max_depth,
            effective_branching,
        }
    }
}

/// Result of one planning call.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    /// Root argmax of raw Q̄ over visited admissible arms (first admissible
    /// arm if nothing has been visited yet).
    pub best: AugmentedAction,
    pub tree: SearchTree,
    pub stats: TreeStats,
}

/// The admissible augmented arms for `set`, in index order (open-loop block
/// first).
pub fn admissible_actions(set: ActionSet, num_base_actions: usize) -> Vec<AugmentedAction> {
    let range = match set {
        ActionSet::Full => 0..2 * num_base_actions,
        ActionSet::ClosedOnly => num_base_actions..2 * num_base_actions,
        ActionSet::OpenOnly => 0..num_base_actions,
    };
    range
        .map(|i| AugmentedAction::from_index(i, num_base_actions))
        .collect()
}

fn incremental_mean(mean: f64, visits_after: u64, value: f64) -> f64 {
    mean + (value - mean) / visits_after as f64
}

struct Searcher<'a, 'cfg> {
    model: AugmentedModel<'a>,
    cfg: &'cfg PlannerConfig,
    admissible: Vec<AugmentedAction>,
    tree: SearchTree,
    bonus_rule: BonusRule,
    /// Whether closed arms pay the κ deflation (only the VOI planner).
    deflate: bool,
    /// Whether the entropy heuristic is added (only `Iucb`).
    entropy: bool,
    num_real_observations: usize,
    vmax: f64,
}

impl<'a, 'cfg> Searcher<'a, 'cfg> {
    fn new(base: &'a dyn GenerativeModel, cfg: &'cfg PlannerConfig) -> Self {
        let model = AugmentedModel::new(base);
        let admissible = admissible_actions(cfg.admissible_set(), base.num_actions());
        Searcher {
            model,
            cfg,
            admissible,
            tree: SearchTree::with_root(),
            bonus_rule: cfg.bonus_rule(),
            deflate: cfg.algorithm == Algorithm::Voimcp,
            entropy: cfg.algorithm == Algorithm::Iucb,
            num_real_observations: base.num_observations(),
            vmax: value_bound(base.r_max(), cfg.discount, cfg.horizon),
        }
    }

    fn simulate(&mut self, node_id: NodeId, state: usize, depth: usize, rng: &mut dyn RngCore) -> f64 {
        if depth == self.cfg.horizon || self.model.is_terminal(state) {
            return 0.0;
        }
        if self.tree.nodes[node_id].visits == 0 {
            // Fresh node: expand every admissible arm with (N, Q̄) = (0, 0),
            // count this entry, and evaluate the state by rollout.
            let node = &mut self.tree.nodes[node_id];
            node.arms = self.admissible.iter().copied().map(ActionEdge::new).collect();
            node.visits = 1;
            return self.rollout(state, depth, rng);
        }

        let arm_index = self.select_arm(node_id, depth);
        let action = self.tree.nodes[node_id].arms[arm_index].action;
        let (next_state, observation, reward) = self.model.step(state, action, rng);
        assert!(
            reward.abs() <= self.model.r_max(),
            "generative model emitted reward {reward} outside ±{}; refusing to \
             clip because the deflation schedule's dominance analysis depends \
             on the declared bound",
            self.model.r_max()
        );

        let obs_index = observation.index(self.num_real_observations);
        let child_id = self.child(node_id, arm_index, obs_index, depth + 1);
        let future = self.simulate(child_id, next_state, depth + 1, rng);
        let total = reward + self.cfg.discount * future;

        let node = &mut self.tree.nodes[node_id];
        node.visits += 1;
        let arm = &mut node.arms[arm_index];
        arm.visits += 1;
        arm.mean = incremental_mean(arm.mean, arm.visits, total);
        total
    }

    /// Argmax of the algorithm's score over the node's arms; unvisited arms
    /// score +∞, and strict comparison makes every tie resolve to the lowest
    /// arm index.
    fn select_arm(&self, node_id: NodeId, depth: usize) -> usize {
        let node = &self.tree.nodes[node_id];
        let ln_n_h = (node.visits as f64).ln();
        let (beta, xi, alpha) = self.cfg.depth_params(depth);
        let mut best_index = 0;
        let mut best_score = f64::NEG_INFINITY;
        for (index, arm) in node.arms.iter().enumerate() {
            let score = if arm.visits == 0 {
                f64::INFINITY
            } else {
                let explore = match self.bonus_rule {
                    BonusRule::Polynomial => {
                        bonus(node.visits, arm.visits, beta, xi, alpha, self.cfg.eta)
                    }
                    BonusRule::Ucb1 => self.cfg.ucb_c * (ln_n_h / arm.visits as f64).sqrt(),
                };
                let kappa_eff = if self.deflate {
                    let k = kappa_effective(
                        self.cfg.kappa_schedule,
                        self.cfg.kappa,
                        self.cfg.c_kappa,
                        explore,
                        self.vmax,
                    );
                    if let KappaSchedule::CountBased {
                        clip_to_premise: true,
                        ..
                    } = self.cfg.kappa_schedule
                    {
                        debug_assert!(
                            k * self.vmax <= explore / self.cfg.c_kappa * (1.0 + 1e-9),
                            "clipped schedule violated its dominance premise"
                        );
                    }
                    k
                } else {
                    0.0
                };
                let mut score = ucb_voi(arm.mean, arm.action.mode, kappa_eff, explore);
                if self.entropy {
                    score += self.cfg.entropy_weight
                        * self.cfg.ucb_c
                        * self.normalized_child_entropy(arm);
                }
                score
            };
            if score > best_score {
                best_score = score;
                best_index = index;
            }
        }
        best_index
    }

    /// Shannon entropy of the arm's observation-child visit distribution,
    /// normalized to [0, 1] by `ln(max(2, |O|))`. Fewer than two visited
    /// children ⇒ 0.
    fn normalized_child_entropy(&self, arm: &ActionEdge) -> f64 {
        let counts: Vec<f64> = arm
            .children
            .iter()
            .map(|&(_, child)| self.tree.nodes[child].visits as f64)
            .filter(|&v| v > 0.0)
            .collect();
        if counts.len() < 2 {
            return 0.0;
        }
        let total: f64 = counts.iter().sum();
        let entropy: f64 = counts
            .iter()
            .map(|&c| {
                let p = c / total;
                -p * p.ln()
            })
            .sum();
        entropy / (self.num_real_observations.max(2) as f64).ln()
    }

    /// The child node for `(arm, observation)`, created on first traversal.
    fn child(
        &mut self,
        node_id: NodeId,
        arm_index: usize,
        obs_index: usize,
        depth: usize,
    ) -> NodeId {
        if let Some(&(_, id)) = self.tree.nodes[node_id].arms[arm_index]
            .children
            .iter()
            .find(|(o, _)| *o == obs_index)
        {
            return id;
        }
        let id = self.tree.nodes.len();
        self.tree.nodes.push(HistoryNode {
            depth,
            visits: 0,
            arms: Vec::new(),
        });
        self.tree.nodes[node_id].arms[arm_index]
            .children
            .push((obs_index, id));
        id
    }

    /// Uniform-random admissible arms through the augmented model until the
    /// horizon or a terminal state; returns the discounted return.
    fn rollout(&self, state: usize, depth: usize, rng: &mut dyn RngCore) -> f64 {
        let RolloutPolicy::Random = self.cfg.rollout;
        let mut total = 0.0;
        let mut weight = 1.0;
        let mut s = state;
        for _ in depth..self.cfg.horizon {
            if self.model.is_terminal(s) {
                break;
            }
            let action = self.admissible[uniform_index(rng, self.admissible.len())];
            let (next, _observation, reward) = self.model.step(s, action, rng);
            total += weight * reward;
            weight *= self.cfg.discount;
            s = next;
        }
        total
    }

    /// Root recommendation: raw-Q̄ argmax over visited arms, lowest index on
    /// ties; falls back to the first admissible arm before anything has
    /// been visited.
    fn best_root_action(&self) -> AugmentedAction {
        let root = self.tree.root();
        if root.arms.is_empty() {
            return self.admissible[0];
        }
        let mut best = None;
        let mut best_mean = f64::NEG_INFINITY;
        for arm in &root.arms {
            if arm.visits >= 1 && arm.mean > best_mean {
                best_mean = arm.mean;
                best = Some(arm.action);
            }
        }
        best.unwrap_or(root.arms[0].action)
    }
}

/// Plans from `belief` with `cfg.queries` simulations of the augmented
/// model built over `model`, sampling a fresh root state per simulation.
///
/// Panics if the configuration is invalid (use
/// [`PlannerConfig::validate`] to check untrusted input first) and on
/// generative-model contract violations (rewards outside ±r_max).
pub fn search(
    belief: &ParticleBelief,
    model: &dyn GenerativeModel,
    cfg: &PlannerConfig,
    rng: &mut dyn RngCore,
) -> SearchOutcome {
    cfg.validate().expect("invalid planner configuration");
    assert!(!belief.is_empty(), "cannot plan from an empty belief");
    let mut searcher = Searcher::new(model, cfg);
    for _ in 0..cfg.queries {
        let state = belief.sample_state(rng);
        searcher.simulate(0, state, 0, rng);
    }
    let best = searcher.best_root_action();
    let stats = searcher.tree.stats();
    SearchOutcome {
        best,
        tree: searcher.tree,
        stats,
    }
}
