//! Prints the fusion schedule and GHZ3 consumption for a few GHZ sizes.
//!
//! `cargo run --example ghz_plan -- 9 18`

use mtqc::resources::{ghz_cost, ghz_cost_closed_form, plan_ghz, Constants};

fn main() -> mtqc::Result<()> {
    let sizes: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let sizes = if sizes.is_empty() { vec![4, 5, 6, 7, 8, 9, 10, 11, 18] } else { sizes };
    for m in sizes {
        let plan = plan_ghz(m)?;
        println!("GHZ_{m}: depth {}, {} GHZ3 leaves", plan.depth(), plan.leaves());
        for (k, round) in plan.steps.iter().enumerate() {
            let fusions: Vec<String> = round.iter().map(|f| format!("{}+{}->{}", f.left, f.right, f.result())).collect();
            println!("  round {}: {}", k + 1, fusions.join("  "));
        }
        println!(
            "  GHZ3 consumed: {} lossless, {:.2} at eta=0.01, {:.2} with the linearised success rate",
            ghz_cost_closed_form(m)?,
            ghz_cost(m, 0.01, Constants::Exact)?,
            ghz_cost(m, 0.01, Constants::Rounded)?
        );
    }
    Ok(())
}
