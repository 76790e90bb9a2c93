//! Exact value computations on the tiger domain: the optimal, closed-loop,
//! open-loop, and adaptive values, the two value-of-information quantities,
//! and the regret of the adaptive rule against its closed-form bound.
//!
//! Run with `cargo run --example solve_exact`.

use voiplan::domains::tiger::TigerModel;
use voiplan::{regret_bound, DenseBelief, ExactSolver};

fn main() {
    let model = TigerModel::default().build();
    let solver = ExactSolver::new(&model);
    let uniform = model.initial_belief.clone();

    println!("tiger, uniform belief");
    println!("{:>5} {:>10} {:>10} {:>10} {:>10}", "depth", "optimal", "closed", "open", "voi");
    for depth in 1..=4 {
        println!(
            "{:>5} {:>10.4} {:>10.4} {:>10.4} {:>10.4}",
            depth,
            solver.value(&uniform, depth).unwrap(),
            solver.value_cl(&uniform, depth).unwrap(),
            solver.value_ol(&uniform, depth).unwrap(),
            solver.simple_voi(&uniform, depth).unwrap(),
        );
    }

    // The adaptive rule chooses per belief between the open- and closed-loop
    // backups, giving up at most a kappa fraction of the closed-loop value.
    // Sweep the tolerance at a belief where the choice is genuinely close.
    let belief = DenseBelief::from_probs(vec![0.8, 0.2]).unwrap();
    let depth = 3;
    println!();
    println!("belief (0.8, 0.2), depth {depth}");
    println!(
        "{:>6} {:>10} {:>12} {:>8} {:>10} {:>12}",
        "kappa", "adaptive", "mode", "action", "regret", "bound"
    );
    for kappa in [0.0, 0.1, 0.3, 0.5, 1.0] {
        let adaptive = solver.value_adaptive(&belief, depth, kappa).unwrap();
        let regret = solver.regret(&belief, depth, kappa).unwrap();
        let bound = regret_bound(kappa, model.r_max, model.discount, depth).unwrap();
        println!(
            "{:>6.2} {:>10.4} {:>12} {:>8} {:>10.4} {:>12.4}",
            kappa,
            adaptive.value,
            format!("{:?}", adaptive.chosen_mode),
            adaptive
                .best_action
                .map_or("-".to_string(), |a| a.to_string()),
            regret,
            bound,
        );
    }

    println!();
    println!(
        "adaptive voi at the 0.8 belief (depth {depth}, kappa 0.5): {:+.4}",
        solver.adaptive_voi(&belief, depth, 0.5).unwrap()
    );
}
