//! Compare the particle filter against the exact Bayes update on the tiger
//! domain: run the same listening sequence through both and report the total
//! variation distance as the particle count grows.
//!
//! Run with `cargo run --example particle_filter`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use voiplan::domains::tiger::{self, TigerModel};
use voiplan::ParticleBelief;

fn main() {
    let pomdp = TigerModel::default().build();
    let observations = [tiger::HEAR_LEFT, tiger::HEAR_LEFT, tiger::HEAR_RIGHT];

    // Exact chain of Bayes updates.
    let mut exact = pomdp.initial_belief.clone();
    for &obs in &observations {
        exact = pomdp
            .belief_update_closed(&exact, tiger::LISTEN, obs)
            .unwrap();
    }
    println!("observation sequence: hear-left, hear-left, hear-right");
    println!(
        "exact posterior:      [{:.4}, {:.4}]",
        exact.prob(0),
        exact.prob(1)
    );
    println!();

    // Total variation distance between the filter estimate and the exact
    // posterior, averaged over independently seeded filter runs so the
    // table shows the systematic decay rather than one run's luck.
    let seeds = 20;
    println!(
        "{:>10} {:>22} {:>16}",
        "particles", "estimate (seed 0)", "mean tv distance"
    );
    for count in [10, 100, 1_000, 10_000, 100_000] {
        let mut first = Vec::new();
        let mut tv_total = 0.0;
        for seed in 0..seeds {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut filter = ParticleBelief::from_initial(&pomdp, count, &mut rng);
            for &obs in &observations {
                filter
                    .sir_update(&pomdp, tiger::LISTEN, obs, &mut rng)
                    .unwrap();
            }
            let frequencies = filter.state_frequencies(pomdp.num_states);
            tv_total += 0.5
                * frequencies
                    .iter()
                    .zip(exact.probs())
                    .map(|(f, p)| (f - p).abs())
                    .sum::<f64>();
            if seed == 0 {
                first = frequencies;
            }
        }
        println!(
            "{:>10} {:>22} {:>16.5}",
            count,
            format!("[{:.4}, {:.4}]", first[0], first[1]),
            tv_total / seeds as f64
        );
    }
}
