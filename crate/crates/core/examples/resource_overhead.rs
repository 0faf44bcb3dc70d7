//! Star-cluster and per-gate GHZ3 overheads at eta = 0.01, with and
//! without a three-qubit repetition code on the lattice qubits.
//!
//! `cargo run --example resource_overhead`

use mtqc::noise::Variant;
use mtqc::resources::{estimate, Constants};

fn main() -> mtqc::Result<()> {
    let c = Constants::Rounded;
    for variant in [Variant::Mtqc1, Variant::Mtqc2] {
        for (n_rep, d) in [(1, 15), (3, 5)] {
            let e = estimate(8, 2, 0.01, variant, n_rep, Some(d), c)?;
            println!(
                "{variant} n=8 m=2 N={n_rep} d={d}: N_star={:.1}{} N_gate={:.3e}",
                e.n_star,
                e.n_enc.map(|x| format!(" N_enc={x:.2}")).unwrap_or_default(),
                e.n_gate.unwrap_or(0.0)
            );
        }
    }
    Ok(())
}
