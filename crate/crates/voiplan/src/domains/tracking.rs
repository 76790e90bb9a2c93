//! Target tracking on a square grid.
//!
//! The agent and a moving target each occupy one cell of a `g × g` grid.
//! The agent's five actions (stay plus the four compass moves) are
//! deterministic; moves off the grid leave it in place. The target performs
//! a lazy random walk: it stays put with probability `stay_prob`, otherwise
//! it steps to a uniformly chosen valid 4-neighbor.
//!
//! Each step the agent observes its own cell exactly, paired with a noisy
//! target reading: the true target cell with probability `p_correct`,
//! otherwise a uniform draw from the target's valid 8-neighborhood. The
//! agent collects `tag_reward` whenever it starts a step co-located with
//! the target.
//!
//! The model is primarily generative (the default 10×10 grid has 10⁴ states
//! and 10⁴ observations); [`TrackingModel::to_discrete`] materializes the
//! explicit tables for small grids and reports
//! [`Error::InfeasibleExplicitModel`] when the tables would exceed the
//! domain-wide entry cap.

use rand::RngCore;

use crate::domains::EXPLICIT_ENTRY_CAP;
use crate::pomdp::{uniform_f64, uniform_index, DenseBelief, DiscretePomdp, GenerativeModel};
use crate::Error;

/// Stay in place.
pub const STAY: usize = 0;
/// Increase the row coordinate.
pub const NORTH: usize = 1;
/// Decrease the row coordinate.
pub const SOUTH: usize = 2;
/// Increase the column coordinate.
pub const EAST: usize = 3;
/// Decrease the column coordinate.
pub const WEST: usize = 4;

const NUM_ACTIONS: usize = 5;

/// Configuration of the tracking domain. The concrete dynamics here are
/// stated choices, not canon — every number is overridable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackingModel {
    /// Side length of the grid.
    pub grid_size: usize,
    /// Probability that the target reading is the true cell.
    pub p_correct: f64,
    /// Probability that the target does not move this step.
    pub stay_prob: f64,
    /// Reward for starting a step co-located with the target.
    pub tag_reward: f64,
    pub discount: f64,
    pub horizon: usize,
}

impl Default for TrackingModel {
    fn default() -> Self {
        TrackingModel {
            grid_size: 10,
            p_correct: 0.7,
            stay_prob: 0.5,
            tag_reward: 1.0,
            discount: 0.95,
            horizon: 20,
        }
    }
}

impl TrackingModel {
    /// Cells per grid side squared: positions the agent or target can hold.
    pub fn cells(&self) -> usize {
        self.grid_size * self.grid_size
    }

    /// States are (agent, target) cell pairs.
    pub fn num_states(&self) -> usize {
        self.cells() * self.cells()
    }

    /// The agent's fixed starting cell (grid center).
    pub fn start_cell(&self) -> usize {
        let mid = self.grid_size / 2;
        self.cell(mid, mid)
    }

    fn cell(&self, x: usize, y: usize) -> usize {
        y * self.grid_size + x
    }

    fn xy(&self, cell: usize) -> (usize, usize) {
        (cell % self.grid_size, cell / self.grid_size)
    }

    /// Packs an (agent, target) pair into a state index.
    pub fn encode_state(&self, agent: usize, target: usize) -> usize {
        agent * self.cells() + target
    }

    /// Splits a state index into (agent, target) cells.
    pub fn decode_state(&self, state: usize) -> (usize, usize) {
        (state / self.cells(), state % self.cells())
    }

    /// Packs an (agent, reading) pair into an observation index.
    pub fn encode_observation(&self, agent: usize, reading: usize) -> usize {
        agent * self.cells() + reading
    }

    /// Splits an observation index into (agent, reading) cells.
    pub fn decode_observation(&self, observation: usize) -> (usize, usize) {
        (observation / self.cells(), observation % self.cells())
    }

    /// Deterministic agent move with off-grid moves absorbed in place.
    fn agent_next(&self, agent: usize, action: usize) -> usize {
        let (x, y) = self.xy(agent);
        let g = self.grid_size;
        let (nx, ny) = match action {
            STAY => (x, y),
            NORTH => (x, y + 1),
            SOUTH => (x, y.wrapping_sub(1)),
            EAST => (x + 1, y),
            WEST => (x.wrapping_sub(1), y),
            other => panic!("unknown action {other}"),
        };
        if nx < g && ny < g {
            self.cell(nx, ny)
        } else {
            agent
        }
    }

    /// Valid 4-neighbors of a cell (the target's move candidates).
    fn neighbors4(&self, cell: usize) -> Vec<usize> {
        let (x, y) = self.xy(cell);
        let g = self.grid_size;
        let mut out = Vec::with_capacity(4);
        if y + 1 < g {
            out.push(self.cell(x, y + 1));
        }
        if y > 0 {
            out.push(self.cell(x, y - 1));
        }
        if x + 1 < g {
            out.push(self.cell(x + 1, y));
        }
        if x > 0 {
            out.push(self.cell(x - 1, y));
        }
        out
    }

    /// Valid 8-neighbors of a cell (the sensor's error support).
    fn neighbors8(&self, cell: usize) -> Vec<usize> {
        let (x, y) = self.xy(cell);
        let g = self.grid_size as isize;
        let mut out = Vec::with_capacity(8);
        for dy in -1..=1isize {
            for dx in -1..=1isize {
                if dx == 0 && dy == 0 {
                    continue;
                }
                let nx = x as isize + dx;
                let ny = y as isize + dy;
                if nx >= 0 && nx < g && ny >= 0 && ny < g {
                    out.push(self.cell(nx as usize, ny as usize));
                }
            }
        }
        out
    }

    /// Transition distribution of the target from `target`.
    fn target_row(&self, target: usize) -> Vec<(usize, f64)> {
        let neighbors = self.neighbors4(target);
        let move_prob = (1.0 - self.stay_prob) / neighbors.len() as f64;
        let mut row = vec![(target, self.stay_prob)];
        row.extend(neighbors.into_iter().map(|c| (c, move_prob)));
        row
    }

    /// Probability that the sensor reports `reading` when the target is
    /// truly at `target`.
    fn reading_prob(&self, target: usize, reading: usize) -> f64 {
        if reading == target {
            return self.p_correct;
        }
        let support = self.neighbors8(target);
        if support.contains(&reading) {
            (1.0 - self.p_correct) / support.len() as f64
        } else {
            0.0
        }
    }

    fn reward_at(&self, state: usize) -> f64 {
        let (agent, target) = self.decode_state(state);
        if agent == target {
            self.tag_reward
        } else {
            0.0
        }
    }

    /// Materializes the explicit tables. Fails with
    /// [`Error::InfeasibleExplicitModel`] when |S|²·|A| + |S|·|A|·|O| would
    /// exceed [`EXPLICIT_ENTRY_CAP`] (the default 10×10 grid is generative
    /// only; grids up to 4×4 fit).
    pub fn to_discrete(&self) -> Result<DiscretePomdp, Error> {
        let s = self.num_states();
        let needed = s * s * NUM_ACTIONS + s * NUM_ACTIONS * s;
        if needed > EXPLICIT_ENTRY_CAP {
            return Err(Error::InfeasibleExplicitModel {
                needed,
                cap: EXPLICIT_ENTRY_CAP,
            });
        }

        let cells = self.cells();
        let mut transition = vec![vec![vec![0.0; s]; NUM_ACTIONS]; s];
        let mut reward = vec![vec![0.0; NUM_ACTIONS]; s];
        for state in 0..s {
            let (agent, target) = self.decode_state(state);
            let target_row = self.target_row(target);
            for action in 0..NUM_ACTIONS {
                let agent_next = self.agent_next(agent, action);
                for &(target_next, p) in &target_row {
                    transition[state][action][self.encode_state(agent_next, target_next)] += p;
                }
                reward[state][action] = self.reward_at(state);
            }
        }

        // The sensor depends on the landed state only, so one row per state
        // serves every action.
        let mut observation = vec![vec![Vec::new(); NUM_ACTIONS]; s];
        for state in 0..s {
            let (agent, target) = self.decode_state(state);
            let mut row = vec![0.0; s];
            row[self.encode_observation(agent, target)] = self.p_correct;
            let support = self.neighbors8(target);
            let err = (1.0 - self.p_correct) / support.len() as f64;
            for reading in support {
                row[self.encode_observation(agent, reading)] = err;
            }
            for action in 0..NUM_ACTIONS {
                observation[state][action] = row.clone();
            }
        }

        // Agent pinned at the start cell, target anywhere.
        let mut initial = vec![0.0; s];
        let mass = 1.0 / cells as f64;
        for target in 0..cells {
            initial[self.encode_state(self.start_cell(), target)] = mass;
        }

        Ok(DiscretePomdp {
            num_states: s,
            num_actions: NUM_ACTIONS,
            num_observations: s,
            transition,
            reward,
            observation,
            horizon: self.horizon,
            discount: self.discount,
            initial_belief: DenseBelief::from_probs(initial)
                .expect("initial tracking belief is a valid distribution"),
            r_max: self.tag_reward,
        })
    }
}

impl GenerativeModel for TrackingModel {
    fn num_actions(&self) -> usize {
        NUM_ACTIONS
    }

    fn num_observations(&self) -> usize {
        self.cells() * self.cells()
    }

    fn r_max(&self) -> f64 {
        self.tag_reward
    }

    fn sample_initial(&self, rng: &mut dyn RngCore) -> usize {
        let target = uniform_index(rng, self.cells());
        self.encode_state(self.start_cell(), target)
    }

    fn step(&self, state: usize, action: usize, rng: &mut dyn RngCore) -> (usize, usize, f64) {
        let (next, reward) = self.step_open(state, action, rng);
        let (agent, target) = self.decode_state(next);
        let reading = if uniform_f64(rng) < self.p_correct {
            target
        } else {
            let support = self.neighbors8(target);
            support[uniform_index(rng, support.len())]
        };
        (next, self.encode_observation(agent, reading), reward)
    }

    fn step_open(&self, state: usize, action: usize, rng: &mut dyn RngCore) -> (usize, f64) {
        let (agent, target) = self.decode_state(state);
        let reward = self.reward_at(state);
        let agent_next = self.agent_next(agent, action);
        let target_next = if uniform_f64(rng) < self.stay_prob {
            target
        } else {
            let neighbors = self.neighbors4(target);
            neighbors[uniform_index(rng, neighbors.len())]
        };
        (self.encode_state(agent_next, target_next), reward)
    }

    fn observation_weight(&self, next_state: usize, _action: usize, observation: usize) -> f64 {
        let (agent, target) = self.decode_state(next_state);
        let (obs_agent, reading) = self.decode_observation(observation);
        if obs_agent != agent {
            return 0.0;
        }
        self.reading_prob(target, reading)
    }

    fn is_terminal(&self, _state: usize) -> bool {
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn small() -> TrackingModel {
        TrackingModel {
            grid_size: 3,
            ..TrackingModel::default()
        }
    }

    #[test]
    fn explicit_form_passes_model_validation() {
        let m = small().to_discrete().unwrap();
        assert_eq!(m.num_states, 81);
        assert_eq!(m.num_observations, 81);
        let defects = m.validate();
        assert!(defects.is_empty(), "defects: {defects:?}");
    }

    #[test]
    fn default_grid_is_too_large_for_explicit_tables() {
        let err = TrackingModel::default().to_discrete().unwrap_err();
        assert!(matches!(err, Error::InfeasibleExplicitModel { .. }));
    }

    #[test]
    fn observed_agent_cell_is_always_exact() {
        let m = small();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..2000 {
            let state = m.encode_state(
                uniform_index(&mut rng, m.cells()),
                uniform_index(&mut rng, m.cells()),
            );
            let action = uniform_index(&mut rng, 5);
            let (next, obs, _) = m.step(state, action, &mut rng);
            let (agent_next, _) = m.decode_state(next);
            let (obs_agent, _) = m.decode_observation(obs);
            assert_eq!(obs_agent, agent_next);
        }
        // And a mismatched agent cell has zero likelihood.
        let next = m.encode_state(0, 4);
        let bad_obs = m.encode_observation(1, 4);
        assert_eq!(m.observation_weight(next, STAY, bad_obs), 0.0);
    }

    #[test]
    fn reward_pays_only_when_colocated_at_step_start() {
        let m = small();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let on = m.encode_state(4, 4);
        let off = m.encode_state(4, 5);
        for action in 0..5 {
            let (_, r_on) = m.step_open(on, action, &mut rng);
            let (_, r_off) = m.step_open(off, action, &mut rng);
            assert_eq!(r_on, 1.0);
            assert_eq!(r_off, 0.0);
        }
    }

    #[test]
    fn agent_moves_are_deterministic_and_clamped() {
        let m = small();
        // Center moves.
        assert_eq!(m.agent_next(m.cell(1, 1), NORTH), m.cell(1, 2));
        assert_eq!(m.agent_next(m.cell(1, 1), SOUTH), m.cell(1, 0));
        assert_eq!(m.agent_next(m.cell(1, 1), EAST), m.cell(2, 1));
        assert_eq!(m.agent_next(m.cell(1, 1), WEST), m.cell(0, 1));
        assert_eq!(m.agent_next(m.cell(1, 1), STAY), m.cell(1, 1));
        // Off-grid moves keep the agent in place.
        assert_eq!(m.agent_next(m.cell(0, 0), WEST), m.cell(0, 0));
        assert_eq!(m.agent_next(m.cell(2, 2), EAST), m.cell(2, 2));
    }

    #[test]
    fn target_stays_half_the_time() {
        let m = small();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let start = m.encode_state(0, 4);
        let trials = 10_000;
        let mut stayed = 0;
        for _ in 0..trials {
            let (next, _) = m.step_open(start, STAY, &mut rng);
            let (_, target) = m.decode_state(next);
            if target == 4 {
                stayed += 1;
            }
        }
        let freq = stayed as f64 / trials as f64;
        // Binomial 3σ ≈ 0.015.
        assert!((freq - 0.5).abs() < 0.015, "stay frequency {freq}");
    }

    #[test]
    fn open_and_closed_steps_share_the_state_draw() {
        let m = small();
        let state = m.encode_state(1, 7);
        for seed in 0..20 {
            let mut a = ChaCha8Rng::seed_from_u64(seed);
            let mut b = ChaCha8Rng::seed_from_u64(seed);
            let (s_open, r_open) = m.step_open(state, EAST, &mut a);
            let (s_closed, _, r_closed) = m.step(state, EAST, &mut b);
            assert_eq!(s_open, s_closed);
            assert_eq!(r_open, r_closed);
        }
    }

    #[test]
    fn generative_frequencies_match_the_explicit_tables() {
        let m = small();
        let explicit = m.to_discrete().unwrap();
        let state = m.encode_state(m.cell(0, 0), m.cell(1, 1));
        let action = EAST;
        let samples = 100_000;
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut state_counts = vec![0u32; explicit.num_states];
        let mut obs_counts = vec![0u32; explicit.num_observations];
        for _ in 0..samples {
            let (next, obs, reward) = m.step(state, action, &mut rng);
            assert_eq!(reward, explicit.reward[state][action]);
            state_counts[next] += 1;
            obs_counts[obs] += 1;
        }

        let t_row = &explicit.transition[state][action];
        for s_next in 0..explicit.num_states {
            let p = t_row[s_next];
            let f = state_counts[s_next] as f64 / samples as f64;
            let sigma = (p * (1.0 - p) / samples as f64).sqrt();
            assert!(
                (f - p).abs() <= 3.0 * sigma + 1e-12,
                "state {s_next}: frequency {f} vs probability {p}"
            );
        }

        // Observation marginal: Σ_s' T(s'|s,a)·Z(o|s',a).
        for o in 0..explicit.num_observations {
            let p: f64 = (0..explicit.num_states)
                .map(|s_next| t_row[s_next] * explicit.observation[s_next][action][o])
                .sum();
            let f = obs_counts[o] as f64 / samples as f64;
            let sigma = (p * (1.0 - p) / samples as f64).sqrt();
            assert!(
                (f - p).abs() <= 3.0 * sigma + 1e-12,
                "observation {o}: frequency {f} vs probability {p}"
            );
        }
    }
}
