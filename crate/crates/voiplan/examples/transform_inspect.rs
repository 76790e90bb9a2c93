//! Inspect the augmented model that doubles each action into an open-loop
//! and a closed-loop variant: enumerate the augmented action and observation
//! spaces, step both variants of the same action from identical RNG states,
//! and compare the open- and closed-loop belief updates.
//!
//! Run with `cargo run --example transform_inspect`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use voiplan::domains::tiger::{self, TigerModel};
use voiplan::{AugmentedAction, AugmentedModel, AugmentedObservation, GenerativeModel, VoiPomdp};

fn main() {
    let pomdp = TigerModel::default().build();
    let voi = VoiPomdp::new(&pomdp);
    let augmented = AugmentedModel::new(&pomdp);

    println!(
        "base model: {} states, {} actions, {} observations",
        pomdp.num_states,
        pomdp.num_actions(),
        pomdp.num_observations()
    );
    println!(
        "augmented:  {} actions, {} observations (last index is the null observation)",
        augmented.num_augmented_actions(),
        augmented.num_augmented_observations()
    );
    println!();

    println!("augmented action space:");
    for index in 0..augmented.num_augmented_actions() {
        let action = AugmentedAction::from_index(index, pomdp.num_actions());
        println!(
            "  index {index}: base action {} in mode {:?}",
            action.base, action.mode
        );
    }
    println!();

    // The two variants of an action share dynamics: stepping them from the
    // same state with identically seeded RNGs yields the same next state and
    // reward. Only the emitted observation differs.
    let state = tiger::TIGER_LEFT;
    let listen_open = AugmentedAction::open(tiger::LISTEN);
    let listen_closed = AugmentedAction::closed(tiger::LISTEN);
    let mut rng_a = ChaCha8Rng::seed_from_u64(7);
    let mut rng_b = ChaCha8Rng::seed_from_u64(7);
    let (open_next, open_obs, open_reward) = augmented.step(state, listen_open, &mut rng_a);
    let (closed_next, closed_obs, closed_reward) =
        augmented.step(state, listen_closed, &mut rng_b);
    println!("stepping LISTEN from the tiger-left state, identical RNG seeds:");
    println!(
        "  open-loop:   next state {open_next}, reward {open_reward:+.1}, observation {:?} \
         (index {})",
        open_obs,
        open_obs.index(pomdp.num_observations())
    );
    println!(
        "  closed-loop: next state {closed_next}, reward {closed_reward:+.1}, observation {:?} \
         (index {})",
        closed_obs,
        closed_obs.index(pomdp.num_observations())
    );
    println!();

    // The belief update honours the same split: the closed-loop variant
    // conditions on the received observation, the open-loop variant merely
    // predicts forward and must be paired with the null observation.
    let uniform = pomdp.initial_belief.clone();
    let heard_left = AugmentedObservation::Real(tiger::HEAR_LEFT);
    let closed_posterior = voi
        .belief_update(&uniform, listen_closed, heard_left)
        .unwrap();
    let open_prediction = voi
        .belief_update(&uniform, listen_open, AugmentedObservation::Null)
        .unwrap();
    println!("belief update from uniform after LISTEN:");
    println!(
        "  closed-loop, heard left: [{:.4}, {:.4}]",
        closed_posterior.prob(0),
        closed_posterior.prob(1)
    );
    println!(
        "  open-loop, null:         [{:.4}, {:.4}]",
        open_prediction.prob(0),
        open_prediction.prob(1)
    );
    match voi.belief_update(&uniform, listen_open, heard_left) {
        Err(error) => println!("  open-loop with a real observation is rejected: {error}"),
        Ok(_) => unreachable!("mismatched mode and observation must not succeed"),
    }
}
