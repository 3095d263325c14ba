//! Decides reachability for two targets from the same source: one inside
//! the reachable set and one outside it, printing the synthesized protocol
//! for the first and the refusal for the second.
//!
//! Run with `cargo run --example check_reachability`.

use thermoreach::reach::{build_reach_set, is_reachable, ReachOptions};
use thermoreach::{ArithmeticMode, GibbsContext, ReachDecision};

fn main() -> thermoreach::Result<()> {
    let ctx = GibbsContext::from_gamma_f64(&[0.5, 1.0 / 3.0, 1.0 / 6.0], ArithmeticMode::Rational)?;
    let source = ctx.population_from_strs(&["1", "0", "0"])?;
    let rs = build_reach_set(&ctx, &source, ReachOptions::default())?;

    // Mixing the top pair halfway is realizable in one elementary move.
    let inside = ctx.population_from_strs(&["7/10", "3/10", "0"])?;
    // Pushing probability onto the last level beyond its stationary share
    // from this source is not.
    let outside = ctx.population_from_strs(&["1/10", "1/10", "4/5"])?;

    for (name, target) in [("inside ", &inside), ("outside", &outside)] {
        let answer = is_reachable(&rs, target)?;
        let entries: Vec<String> = target.iter().map(|x| x.to_string()).collect();
        print!("{name} [{}] -> {}", entries.join(", "), answer.decision);
        match answer.decision {
            ReachDecision::Reachable => {
                let seq = answer.protocol.expect("reachable targets carry a protocol");
                println!(
                    " ({} steps, residual {:.2e})",
                    seq.len(),
                    answer.residual.unwrap_or(0.0)
                );
                for step in &seq.steps {
                    let (i, j) = step.levels();
                    println!("    thermalize ({i}, {j}) with weight {}", step.lambda());
                }
            }
            _ => println!(),
        }
    }
    Ok(())
}
