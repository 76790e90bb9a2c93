//! A full online planning episode on the tiger domain, spelled out step by
//! step: plan from the current particle belief, execute the chosen arm in
//! the (hidden) environment, and update the filter — conditioning on the
//! observation after a closed-loop arm, predicting forward after an
//! open-loop one.
//!
//! The printed arm mean is the lifetime average return of every simulation
//! routed through that arm, early exploratory ones included, so it can sit
//! well below the arm's converged value while still being the best arm.
//!
//! Run with `cargo run --example plan_episode`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use voiplan::domains::tiger::TigerModel;
use voiplan::{search, Algorithm, GenerativeModel, Mode, ParticleBelief, PlannerConfig};

fn main() {
    let pomdp = TigerModel::default().build();
    let cfg = PlannerConfig {
        algorithm: Algorithm::Voimcp,
        queries: 2_000,
        horizon: 5,
        discount: pomdp.discount,
        kappa: 0.1,
        ..PlannerConfig::default()
    };

    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut state = pomdp.sample_initial(&mut rng);
    let mut belief = ParticleBelief::from_initial(&pomdp, 2_000, &mut rng);
    let mut discounted_return = 0.0;
    let mut discount = 1.0;
    let action_names = ["listen", "open-left", "open-right"];

    println!("tiger episode, {} queries per planning call", cfg.queries);
    let observation_names = ["hear-left", "hear-right"];
    for step in 0..8 {
        let outcome = search(&belief, &pomdp, &cfg, &mut rng);
        let arm = outcome.best;
        let (arm_visits, arm_mean) = outcome
            .tree
            .root()
            .arms
            .iter()
            .find(|a| a.action == arm)
            .map_or((0, 0.0), |a| (a.visits, a.mean));
        let freq = belief.state_frequencies(pomdp.num_states);
        println!(
            "step {step}: belief [{:.3}, {:.3}], chose {} ({:?}), \
             arm mean {:+.2} over {} sims, tree {} nodes, depth {}, branching {:.2}",
            freq[0],
            freq[1],
            action_names[arm.base],
            arm.mode,
            arm_mean,
            arm_visits,
            outcome.tree.len(),
            outcome.stats.max_depth,
            outcome.stats.effective_branching,
        );

        match arm.mode {
            Mode::ClosedLoop => {
                let (next, obs, reward) = pomdp.step(state, arm.base, &mut rng);
                println!(
                    "        observed {}, reward {reward:+.1}",
                    observation_names[obs]
                );
                belief
                    .sir_update(&pomdp, arm.base, obs, &mut rng)
                    .expect("tiger observations never deplete the filter");
                discounted_return += discount * reward;
                state = next;
            }
            Mode::OpenLoop => {
                let (next, reward) = pomdp.step_open(state, arm.base, &mut rng);
                println!("        no observation requested, reward {reward:+.1}");
                belief.propagate_open(&pomdp, arm.base, &mut rng);
                discounted_return += discount * reward;
                state = next;
            }
        }
        discount *= pomdp.discount;
    }

    println!();
    println!("discounted return over 8 steps: {discounted_return:+.3}");
}
