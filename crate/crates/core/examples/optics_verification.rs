//! Runs the collective Bell measurement checks: exact enumeration of the
//! lossless success rate and sampled failure under loss.
//!
//! `cargo run --release --example optics_verification`

use mtqc::optics::{simulate_nbsm, verify_all};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> mtqc::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for check in verify_all(8, 200_000, &mut rng)? {
        println!("{} {}: {}", if check.pass { "ok  " } else { "FAIL" }, check.name, check.detail);
    }
    let st = simulate_nbsm(4, 0.1, 200_000, &mut rng)?;
    println!(
        "n=4 eta=0.1: failure {:.4}, hidden sign flips {:.4} of successes",
        st.failure_rate(),
        st.sign_flips as f64 / st.successes as f64
    );
    Ok(())
}
