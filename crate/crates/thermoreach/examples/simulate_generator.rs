//! Evolves a population under a random detailed-balance rate matrix and
//! confirms that every visited state is certified reachable from the
//! start: continuous relaxation never escapes the set the elementary
//! protocol engine constructs.
//!
//! Run with `cargo run --example simulate_generator`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thermoreach::reach::{build_reach_set, is_reachable, ReachOptions};
use thermoreach::thermalization::random_detailed_balance_generator;
use thermoreach::{ArithmeticMode, GibbsContext, ReachDecision};

fn main() -> thermoreach::Result<()> {
    let gamma = [0.5, 1.0 / 3.0, 1.0 / 6.0];
    let float_ctx = GibbsContext::from_gamma_f64(&gamma, ArithmeticMode::Float)?;
    let exact_ctx = GibbsContext::from_gamma_f64(&gamma, ArithmeticMode::Rational)?;

    let p0 = [0.65, 0.3, 0.05];
    let start_exact = exact_ctx.population_from_f64(&p0)?;
    let rs = build_reach_set(&exact_ctx, &start_exact, ReachOptions::default())?;

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let generator = random_detailed_balance_generator(&float_ctx, &mut rng, 0.8)?;
    println!("rates:");
    for i in 0..3 {
        let row: Vec<String> = (0..3)
            .map(|j| format!("{:>8.4}", generator.rate(i, j)))
            .collect();
        println!("  [{}]", row.join(", "));
    }

    let mut current = float_ctx.population_from_f64(&p0)?;
    let dt = 0.35;
    for k in 1..=8 {
        current = generator.evolve(&float_ctx, &current, dt)?;
        let snapshot: Vec<f64> = current.iter().map(|x| x.to_f64()).collect();
        let exact_snapshot = exact_ctx.population_from_f64(&snapshot)?;
        let answer = is_reachable(&rs, &exact_snapshot)?;
        let verdict = match answer.decision {
            ReachDecision::Reachable => "reachable",
            ReachDecision::Unreachable => "ESCAPED",
            ReachDecision::Unknown => "undecided",
        };
        println!(
            "t = {:>4.2}: [{:.5}, {:.5}, {:.5}]  {verdict}",
            dt * k as f64,
            snapshot[0],
            snapshot[1],
            snapshot[2]
        );
    }
    Ok(())
}
