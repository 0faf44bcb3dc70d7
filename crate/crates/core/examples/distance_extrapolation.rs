//! Estimates the code distance needed for a target logical error rate from
//! simulated rates at two distances below threshold.
//!
//! `cargo run --release --example distance_extrapolation -- 20000`

use mtqc::lattice::LatticeConfig;
use mtqc::montecarlo::{extrapolate_distance, run_job, NoisePoint, SimJob};
use mtqc::noise::{dephasing_rate, nbsm_failure_rate, Variant};

fn main() -> mtqc::Result<()> {
    let trials = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(20_000);
    let eta = 0.01;
    let noise = NoisePoint::new(Variant::Mtqc2, nbsm_failure_rate(eta, 8), dephasing_rate(eta, 2));
    let mut rates = Vec::new();
    for d in [3, 5] {
        let r = run_job(&SimJob { lattice: LatticeConfig::new(d)?, noise, trials, seed: 1 }, 0)?;
        println!("d={d}: p_L = {:.3e} ({} erroneous times)", r.p_l, r.erroneous_times);
        rates.push(r.p_l);
    }
    for target in [1e-6, 1e-15] {
        match extrapolate_distance(rates[0], rates[1], 5, target) {
            Ok(d) => println!("p_L target {target:e}: d = {d}"),
            Err(e) => println!("p_L target {target:e}: {e}"),
        }
    }
    Ok(())
}
