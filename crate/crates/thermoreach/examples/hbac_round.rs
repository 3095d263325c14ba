//! One round of heat-bath cooling on a target qubit with a resettable
//! ancilla: relabel the four joint levels, relax, and read out the ground
//! weight. All 24 relabelings are scored exactly; several tie for the
//! optimum and the ancilla bit-flip is one of them.
//!
//! Run with `cargo run --example hbac_round`.

use thermoreach::apps::{hbac_branches, HbacParams, ANCILLA_FLIP};

fn main() -> thermoreach::Result<()> {
    let params = HbacParams::default();
    let branches = hbac_branches(&params)?;

    let best = branches
        .iter()
        .map(|b| b.best_ground.clone())
        .max_by(|a, b| a.cmp_total(b))
        .unwrap();

    println!("{:>16} {:>22} {:>8}", "permutation", "ground weight", "best?");
    for b in &branches {
        let mark = if b.best_ground == best { "  *" } else { "" };
        println!(
            "{:>16} {:>22} {mark}",
            format!("{:?}", b.permutation),
            b.best_ground.to_string()
        );
    }

    let optimal: Vec<_> = branches.iter().filter(|b| b.best_ground == best).collect();
    println!("\noptimal relabelings: {}", optimal.len());

    let flip = branches
        .iter()
        .find(|b| b.permutation == ANCILLA_FLIP)
        .unwrap();
    println!(
        "ancilla flip {:?} is optimal: {}",
        ANCILLA_FLIP,
        flip.best_ground == best
    );
    if let Some(seq) = &flip.protocol {
        println!("its protocol:");
        for step in &seq.steps {
            let (i, j) = step.levels();
            println!("  thermalize ({i}, {j}) with weight {}", step.lambda());
        }
    }
    Ok(())
}
