//! Traces one decoding trial: removed and dephased faces, detection
//! events, the matching and any erroneous simulating times.
//!
//! `cargo run --example single_trial_trace -- 5 0.04 0.01 7`

use mtqc::decoder::{run_trial, TrialNoise, Workspace};
use mtqc::lattice::{build_lattice, LatticeConfig};
use mtqc::noise::{removal_mechanisms, Mtqc2Removal, Variant};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> mtqc::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let arg = |i: usize, default: &str| args.get(i).cloned().unwrap_or_else(|| default.to_string());
    let d: u32 = arg(0, "3").parse().map_err(|_| mtqc::Error::Config("bad d".into()))?;
    let p_z: f64 = arg(1, "0.04").parse().map_err(|_| mtqc::Error::Config("bad p_Z".into()))?;
    let p_f: f64 = arg(2, "0.01").parse().map_err(|_| mtqc::Error::Config("bad p_f".into()))?;
    let seed: u64 = arg(3, "7").parse().map_err(|_| mtqc::Error::Config("bad seed".into()))?;

    let lattice = build_lattice(LatticeConfig::new(d)?)?;
    let noise = TrialNoise { mechanisms: removal_mechanisms(p_f, Variant::Mtqc2, Mtqc2Removal::WholeQubit), p_z };
    let mut ws = Workspace::new(&lattice);
    let mut trace = String::new();
    let out = run_trial(&lattice, &noise, &mut ChaCha8Rng::seed_from_u64(seed), &mut ws, Some(&mut trace));
    print!("{trace}");
    println!("logical loss: {}, erroneous times: {:?}", out.logical_loss, out.erroneous_times);
    Ok(())
}
