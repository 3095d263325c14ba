//! Exact linear optimization over reachable sets: enumerates the extreme
//! points of a reachable region, maximizes a linear functional over it,
//! and contrasts the answer with the bound over everything the stationary
//! state dominates.
//!
//! Run with `cargo run --example exact_optimization`.

use thermoreach::reach::{
    build_reach_set, curve_maximize_linear, extreme_points, maximize_linear, ReachOptions,
};
use thermoreach::{ArithmeticMode, GibbsContext, Scalar};

fn main() -> thermoreach::Result<()> {
    let ctx = GibbsContext::from_gamma_f64(&[0.5, 1.0 / 3.0, 1.0 / 6.0], ArithmeticMode::Rational)?;
    let source = ctx.population_from_strs(&["1/5", "1/5", "3/5"])?;
    let rs = build_reach_set(&ctx, &source, ReachOptions::default())?;

    let vertices = extreme_points(&rs)?;
    println!("extreme points of the reachable set ({}):", vertices.len());
    for v in &vertices {
        let entries: Vec<String> = v.iter().map(|x| x.to_string()).collect();
        println!("  [{}]", entries.join(", "));
    }

    // Maximize the ground population.
    let mode = ctx.mode();
    let objective = vec![Scalar::one(mode), Scalar::zero(mode), Scalar::zero(mode)];
    let (best, argmax) = maximize_linear(&rs, &objective)?;
    let entries: Vec<String> = argmax.iter().map(|x| x.to_string()).collect();
    println!("\nmax p_0 over the reachable set = {best} at [{}]", entries.join(", "));

    // The same objective over every population the source thermomajorizes,
    // ignoring which of them a protocol can actually hit.
    let (bound, _) = curve_maximize_linear(&ctx, &source, &objective)?;
    println!("max p_0 over the dominated cone = {bound}");
    println!("gap = {}", (&bound - &best).to_f64());
    Ok(())
}
