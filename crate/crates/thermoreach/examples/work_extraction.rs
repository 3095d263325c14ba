//! Charging a two-level battery from a hot qubit: the smallest admissible
//! failure probability as a function of the work stored, under arbitrary
//! thermal operations and under elementary control.
//!
//! Run with `cargo run --example work_extraction`.

use thermoreach::apps::{work_extraction_curve, WorkExtractionParams};

fn main() -> thermoreach::Result<()> {
    let params = WorkExtractionParams {
        w_grid: (1..=10).map(|k| k as f64 / 10.0).collect(),
        ..WorkExtractionParams::default()
    };
    let sweep = work_extraction_curve(&params)?;

    println!("{:>12} {:>12} {:>12}", "W/Delta", "eps_full", "eps_elem");
    for pt in &sweep.points {
        println!("{:>12.2} {:>12.6} {:>12.6}", pt.axis, pt.values[0], pt.values[1]);
    }
    println!();
    for (k, v) in &sweep.notes {
        println!("{k}: {v}");
    }
    let last = sweep.points.last().unwrap();
    if let Some((label, seq)) = last.protocols.first() {
        println!(
            "witness at W/Delta = {}: '{label}' with {} moves",
            last.axis,
            seq.len()
        );
    }
    Ok(())
}
