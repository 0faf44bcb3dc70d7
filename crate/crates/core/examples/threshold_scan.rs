//! Small threshold scan for MTQC-2 with n = 8 photons per surrounding
//! qubit at eta = 0.01, and the loss thresholds it implies.
//!
//! `cargo run --release --example threshold_scan -- 2000`

use mtqc::lattice::LatticeConfig;
use mtqc::montecarlo::{find_threshold, run_job, threshold_to_loss, CurvePoint, NoisePoint, SimJob};
use mtqc::noise::{nbsm_failure_rate, Variant};

fn main() -> mtqc::Result<()> {
    let trials = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(2000);
    let p_f = nbsm_failure_rate(0.01, 8);
    let mut points = Vec::new();
    for d in [3, 5, 7] {
        for p_z in [0.03, 0.04, 0.05] {
            let job = SimJob { lattice: LatticeConfig::new(d)?, noise: NoisePoint::new(Variant::Mtqc2, p_f, p_z), trials, seed: 1 };
            let r = run_job(&job, 0)?;
            println!("d={d} p_Z={p_z:.3} p_L={:.5} +- {:.5} (trial failure {:.3})", r.p_l, r.ci99, r.p_trial);
            points.push(CurvePoint { d, p_z, p_l: r.p_l });
        }
    }
    let th = find_threshold(&points)?;
    println!(
        "p_Z_th = {:.4} +- {:.4}; eta_th = {:.4}; with N=3 encoding {:.4}",
        th.p_th,
        th.uncertainty,
        threshold_to_loss(th.p_th, 2, 1)?,
        threshold_to_loss(th.p_th, 2, 3)?
    );
    Ok(())
}
