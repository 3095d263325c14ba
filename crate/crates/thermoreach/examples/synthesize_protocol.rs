//! Synthesizes a control sequence onto an interior target, replays it, and
//! shows the visited populations converging on the target.
//!
//! Run with `cargo run --example synthesize_protocol`.

use thermoreach::reach::{build_reach_set, is_reachable, ReachOptions};
use thermoreach::thermalization::apply_sequence;
use thermoreach::{ArithmeticMode, GibbsContext, Scalar, Trajectory};

fn main() -> thermoreach::Result<()> {
    let ctx = GibbsContext::from_energies(&[0.0, 1.0, 2.0], 0.8, ArithmeticMode::Rational)?;
    let source = ctx.population_from_strs(&["3/5", "1/5", "1/5"])?;
    // A strict mixture of the source and the stationary state lies inside
    // the reachable set.
    let gamma = ctx.thermal_population();
    let half = Scalar::ratio(1, 2, ctx.mode());
    let target: Vec<_> = source
        .iter()
        .zip(&gamma)
        .map(|(p, g)| &(p + g) * &half)
        .collect();

    let rs = build_reach_set(&ctx, &source, ReachOptions::default())?;
    let answer = is_reachable(&rs, &target)?;
    println!("decision: {}", answer.decision);
    let seq = answer.protocol.expect("interior targets are reachable");
    println!(
        "protocol: {} moves, replay residual {:.2e}",
        seq.len(),
        answer.residual.unwrap_or(0.0)
    );

    // Replay by hand to confirm the engine's claim, then sample the
    // trajectory it induces.
    let endpoint = apply_sequence(&ctx, &source, &seq)?;
    let worst = endpoint
        .iter()
        .zip(&target)
        .map(|(a, b)| (a - b).abs().to_f64())
        .fold(0.0f64, f64::max);
    println!("independent replay residual: {worst:.2e}");

    let traj = Trajectory::sample(&ctx, &source, &seq, 2)?;
    println!("trajectory samples: {}", traj.len());
    for (t, state) in traj.times().iter().zip(traj.states()).take(6) {
        let entries: Vec<String> = state.iter().map(|x| format!("{:.6}", x.to_f64())).collect();
        println!("  t = {:>8} : [{}]", t.to_string(), entries.join(", "));
    }
    Ok(())
}
