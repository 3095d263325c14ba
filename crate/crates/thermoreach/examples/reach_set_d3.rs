//! Builds the full reachable set of a three-level system and prints its
//! structure: one antichain of extremal states per visitable ordering.
//!
//! Run with `cargo run --example reach_set_d3`.

use thermoreach::reach::{build_reach_set, ReachOptions};
use thermoreach::{ArithmeticMode, GibbsContext};

fn main() -> thermoreach::Result<()> {
    let ctx = GibbsContext::from_gamma_f64(&[0.5, 1.0 / 3.0, 1.0 / 6.0], ArithmeticMode::Rational)?;
    let source = ctx.population_from_strs(&["7/10", "1/5", "1/10"])?;

    let rs = build_reach_set(&ctx, &source, ReachOptions::default())?;

    let fmt = |p: &[thermoreach::Scalar]| {
        let entries: Vec<String> = p.iter().map(|x| x.to_string()).collect();
        format!("[{}]", entries.join(", "))
    };
    println!("stationary weights : {}", fmt(ctx.gamma()));
    println!("source             : {}", fmt(&source));
    println!("orderings visited  : {}", rs.order_count());
    println!("extremal states    : {}", rs.member_count());
    println!("full moves explored: {}", rs.diagnostics().expansions);
    println!();

    for (order, members) in rs.frontier() {
        println!("order {:?}:", order.as_slice());
        for m in members {
            let state: Vec<String> = m.state().iter().map(|x| x.to_string()).collect();
            println!("  [{}] via {} moves", state.join(", "), m.path().len());
        }
    }
    Ok(())
}
