//! One round of inversion cooling on a four-level ladder: starting from
//! the population-inverted thermal state, how much extra ground weight a
//! single relaxation round can deposit, with and without the elementary
//! control restriction.
//!
//! Run with `cargo run --example cooling_round`.

use thermoreach::apps::{cooling_curve, CoolingParams};

fn main() -> thermoreach::Result<()> {
    let params = CoolingParams {
        beta_grid: vec![0.2, 0.4, std::f64::consts::LN_2, 1.0, 1.5, 2.0, 3.0],
        ..CoolingParams::default()
    };
    let sweep = cooling_curve(&params)?;

    println!(
        "{:>10} {:>14} {:>14} {:>18}",
        "beta*Delta", "gain_full", "gain_elem", "gain_full (exact)"
    );
    for pt in &sweep.points {
        let exact = pt.exact[0]
            .as_ref()
            .map_or(String::from("-"), |s| s.to_string());
        println!(
            "{:>10.4} {:>14.8} {:>14.8} {:>18}",
            pt.axis, pt.values[0], pt.values[1], exact
        );
    }
    println!();
    println!("At beta*Delta = ln 2 the stationary weights are the dyadic");
    println!("vector (8,4,2,1)/15 and the unrestricted gain is exactly 49/120.");
    Ok(())
}
