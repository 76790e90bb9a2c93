//! The tiger problem: two doors, one tiger, one noisy ear.
//!
//! The state is which door hides the tiger. Listening costs a little and
//! reports the correct side with probability `listen_accuracy`; opening a
//! door pays the treasure or the tiger and resets the problem to a uniform
//! draw (the classic formulation — behind-door contents are reshuffled, so
//! no state is terminal). Small enough to solve exactly at any depth used in
//! practice, which is why it anchors most of the crate's oracle checks.

use crate::pomdp::{DenseBelief, DiscretePomdp};

/// Builder for tiger instances. All parameters are overridable; defaults are
/// the classic ones.
#[derive(Debug, Clone)]
pub struct TigerModel {
    /// Probability that listening reports the tiger's true side (default 0.85).
    pub listen_accuracy: f64,
    /// Reward for listening (default −1).
    pub listen_reward: f64,
    /// Reward for opening the treasure door (default +10).
    pub treasure_reward: f64,
    /// Reward for opening the tiger door (default −100).
    pub tiger_penalty: f64,
    /// Discount factor (default 0.95).
    pub discount: f64,
    /// Nominal horizon (default 3).
    pub horizon: usize,
}

impl Default for TigerModel {
    fn default() -> Self {
        TigerModel {
            listen_accuracy: 0.85,
            listen_reward: -1.0,
            treasure_reward: 10.0,
            tiger_penalty: -100.0,
            discount: 0.95,
            horizon: 3,
        }
    }
}

/// State: tiger behind the left door.
pub const TIGER_LEFT: usize = 0;
/// State: tiger behind the right door.
pub const TIGER_RIGHT: usize = 1;
/// Action: listen.
pub const LISTEN: usize = 0;
/// Action: open the left door.
pub const OPEN_LEFT: usize = 1;
/// Action: open the right door.
pub const OPEN_RIGHT: usize = 2;
/// Observation: heard the tiger on the left.
pub const HEAR_LEFT: usize = 0;
/// Observation: heard the tiger on the right.
pub const HEAR_RIGHT: usize = 1;

impl TigerModel {
    /// A variant whose ear is pure noise (accuracy 1/2), making every
    /// observation in the model uninformative. Useful as a degenerate case:
    /// with nothing to learn, closed- and open-loop planning coincide.
    pub fn uninformative() -> Self {
        TigerModel {
            listen_accuracy: 0.5,
            ..TigerModel::default()
        }
    }

    /// Materializes the explicit model.
    pub fn build(&self) -> DiscretePomdp {
        let acc = self.listen_accuracy;
        let ns = 2;
        let na = 3;
        let no = 2;

        // Listening leaves the tiger in place; opening either door resets
        // the problem to a fresh uniform draw.
        let identity = |s: usize| {
            let mut row = vec![0.0; ns];
            row[s] = 1.0;
            row
        };
        let reset = vec![0.5, 0.5];
        let transition: Vec<Vec<Vec<f64>>> = (0..ns)
            .map(|s| vec![identity(s), reset.clone(), reset.clone()])
            .collect();

        // reward[s][a]: listening always costs the same; a door pays the
        // penalty when the tiger is behind it and the treasure otherwise.
        let reward = vec![
            vec![self.listen_reward, self.tiger_penalty, self.treasure_reward],
            vec![self.listen_reward, self.treasure_reward, self.tiger_penalty],
        ];

        // observation[s'][a][o]: listening reports the true side with
        // probability `acc`; door actions tell you nothing.
        let listen_row = |s: usize| {
            if s == TIGER_LEFT {
                vec![acc, 1.0 - acc]
            } else {
                vec![1.0 - acc, acc]
            }
        };
        let noise = vec![0.5, 0.5];
        let observation: Vec<Vec<Vec<f64>>> = (0..ns)
            .map(|s| vec![listen_row(s), noise.clone(), noise.clone()])
            .collect();

        let r_max = self
            .listen_reward
            .abs()
            .max(self.treasure_reward.abs())
            .max(self.tiger_penalty.abs());

        DiscretePomdp {
            num_states: ns,
            num_actions: na,
            num_observations: no,
            transition,
            reward,
            observation,
            horizon: self.horizon,
            discount: self.discount,
            initial_belief: DenseBelief::uniform(ns),
            r_max,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_build_is_valid() {
        let m = TigerModel::default().build();
        assert!(m.validate().is_empty());
        assert_eq!(m.num_states, 2);
        assert_eq!(m.num_actions, 3);
        assert_eq!(m.num_observations, 2);
        assert_eq!(m.r_max, 100.0);
    }

    #[test]
    fn door_actions_reset_to_uniform() {
        let m = TigerModel::default().build();
        for s in 0..2 {
            for a in [OPEN_LEFT, OPEN_RIGHT] {
                assert_eq!(m.transition[s][a], vec![0.5, 0.5]);
                assert_eq!(m.observation[s][a], vec![0.5, 0.5]);
            }
        }
    }

    #[test]
    fn uninformative_variant_is_valid_and_noisy() {
        let m = TigerModel::uninformative().build();
        assert!(m.validate().is_empty());
        for sp in 0..2 {
            for a in 0..3 {
                assert_eq!(m.observation[sp][a], vec![0.5, 0.5]);
            }
        }
    }
}
