//! Samples a random control schedule, evaluates the standard divergence
//! families along the induced trajectory, and prints the verdicts. Every
//! family must be non-decreasing on a realizable evolution; a violation
//! would certify that a claimed trajectory is not realizable.
//!
//! Run with `cargo run --example monotone_certificates`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thermoreach::gep::{verify_monotone, DivergenceFamily};
use thermoreach::thermalization::sample_control_sequence;
use thermoreach::{ArithmeticMode, GibbsContext, Trajectory};

fn main() -> thermoreach::Result<()> {
    let mode = ArithmeticMode::Float;
    let ctx = GibbsContext::from_energies(&[0.0, 0.7, 1.1, 2.3], 1.0, mode)?;
    let source = ctx.population_from_f64(&[0.05, 0.6, 0.05, 0.3])?;

    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let seq = sample_control_sequence(&ctx, &mut rng, 15);
    let traj = Trajectory::sample(&ctx, &source, &seq, 3)?;
    println!(
        "schedule: {} moves, {} trajectory samples",
        seq.len(),
        traj.len()
    );

    for family in DivergenceFamily::standard_set(mode) {
        let check = verify_monotone(&ctx, traj.states(), &family, 1e-9)?;
        let first = check.values.first().unwrap().to_f64();
        let last = check.values.last().unwrap().to_f64();
        println!(
            "{:>12}: {}  ({first:.6} -> {last:.6}, worst dip {:.1e})",
            family.to_string(),
            if check.ok { "monotone" } else { "VIOLATED" },
            check.worst_drop
        );
    }
    Ok(())
}
