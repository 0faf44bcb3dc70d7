//! Splits an overall loss threshold over source, delay line, switches and
//! detectors for both protocol variants.
//!
//! `cargo run --example loss_budget`

use mtqc::noise::{balanced_budget, compose_loss, Fiber};

fn main() -> mtqc::Result<()> {
    let fiber = Fiber::default();
    println!("{:>8} {:>5} {:>10} {:>10} {:>10} {:>10}", "eta", "kappa", "eta_dly", "each", "eta_s", "check");
    for (eta, kappa) in [(0.029, 3), (0.032, 4), (0.107, 6), (0.111, 7)] {
        let b = balanced_budget(eta, kappa, fiber)?;
        println!(
            "{eta:>8.3} {kappa:>5} {:>10.3e} {:>10.3e} {:>10.3e} {:>10.6}",
            b.eta_dly,
            b.eta_soc,
            b.eta_s,
            compose_loss(&b)
        );
    }
    Ok(())
}
