use mtqc::cli;
use mtqc::lattice::LatticeConfig;
use mtqc::montecarlo::{extrapolate_distance, find_threshold, run_job, wilson, CurvePoint, NoisePoint, SimJob, Z99};
use mtqc::noise::Variant;
use mtqc::Error;
use proptest::prelude::*;

fn job(d: u32, p_f: f64, p_z: f64, trials: u64, seed: u64) -> SimJob {
    SimJob { lattice: LatticeConfig::new(d).unwrap(), noise: NoisePoint::new(Variant::Mtqc2, p_f, p_z), trials, seed }
}

#[test]
fn results_do_not_depend_on_worker_count() {
    let j = job(3, 0.005, 0.04, 300, 42);
    let a = run_job(&j, 1).unwrap();
    for w in [2, 3, 8] {
        assert_eq!(run_job(&j, w).unwrap(), a);
    }
    assert!(a.erroneous_times > 0);
    let other = run_job(&SimJob { seed: 43, ..j }, 1).unwrap();
    assert_ne!(other, a);
}

#[test]
fn noiseless_job_has_no_errors() {
    let r = run_job(&job(5, 0.0, 0.0, 50, 1), 1).unwrap();
    assert_eq!((r.lost, r.erroneous_times, r.failed), (0, 0, 0));
    assert_eq!(r.total_times, 50 * 21);
    assert_eq!(r.p_l, 0.0);
    assert!(r.ci_high > 0.0);
}

#[test]
fn heavy_removal_loses_every_trial() {
    let r = run_job(&job(3, 0.9, 0.0, 40, 1), 1).unwrap();
    assert_eq!(r.lost, 40);
    assert_eq!(r.logical_loss_rate, 1.0);
}

#[test]
fn cli_output_is_byte_identical_across_workers() {
    let dir = tempfile::tempdir().unwrap();
    let mut outs = Vec::new();
    for w in ["1", "2", "4"] {
        let path = dir.path().join(format!("sim{w}.csv"));
        let code = cli::run(
            ["mtqc", "simulate", "--d", "3,5", "--pz", "0.03:0.04:0.01", "--trials", "150", "--workers", w, "--seed", "9"]
                .iter()
                .map(|s| s.to_string())
                .chain(["--out".into(), path.display().to_string()])
                .collect(),
        );
        assert_eq!(code, 0);
        outs.push(std::fs::read(&path).unwrap());
    }
    assert!(outs.windows(2).all(|w| w[0] == w[1]));
    let text = String::from_utf8(outs.remove(0)).unwrap();
    assert_eq!(text.lines().count(), 5);
    assert!(text.starts_with("variant,d,T,"));
}

#[test]
fn threshold_from_synthetic_curves() {
    // p_L = A (p / p_th)^{(d+1)/2} crosses exactly at p_th
    let p_th = 0.031;
    let mut pts = Vec::new();
    for d in [3, 5, 7] {
        for i in 0..9 {
            let p = 0.02 + 0.0025 * i as f64;
            pts.push(CurvePoint { d, p_z: p, p_l: 0.1 * (p / p_th).powf((d + 1) as f64 / 2.0) });
        }
    }
    let th = find_threshold(&pts).unwrap();
    // the log gap is linear in ln p, so interpolating in p is off by O(dp^2)
    assert!((th.p_th - p_th).abs() < 5e-5, "{}", th.p_th);
    assert!(th.uncertainty < 1e-12);
    assert_eq!(th.crossings.len(), 2);

    let below: Vec<_> = pts.iter().filter(|p| p.p_z < 0.03).copied().collect();
    assert!(matches!(find_threshold(&below), Err(Error::NoCrossing { gap_sign: -1 })));
}

#[test]
fn distance_extrapolation_examples() {
    // each +2 in d divides p_L by 10
    assert_eq!(extrapolate_distance(1e-3, 1e-4, 7, 1e-6).unwrap(), 11);
    assert_eq!(extrapolate_distance(1e-3, 1e-4, 7, 1.1e-6).unwrap(), 11);
    assert_eq!(extrapolate_distance(1e-3, 1e-4, 7, 0.9e-6).unwrap(), 13);
    assert!(matches!(extrapolate_distance(1e-4, 1e-3, 7, 1e-6), Err(Error::Extrapolation(_))));
}

proptest! {
    #[test]
    fn wilson_interval_brackets_the_estimate(n in 1u64..100_000, frac in 0.0f64..=1.0) {
        let k = ((n as f64) * frac).floor() as u64;
        let (p, lo, hi) = wilson(k, n, Z99);
        prop_assert!(lo <= p + 1e-12 && p <= hi + 1e-12);
        prop_assert!((0.0..=1.0).contains(&lo) && (0.0..=1.0).contains(&hi));
        // symmetric under k -> n - k
        let (_, lo2, hi2) = wilson(n - k, n, Z99);
        prop_assert!((lo - (1.0 - hi2)).abs() < 1e-9 && (hi - (1.0 - lo2)).abs() < 1e-9);
    }
}
