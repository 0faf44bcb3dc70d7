use std::collections::BTreeMap;

use mtqc::noise::nbsm_failure_rate;
use mtqc::optics::{
    enumerate_decomposition, enumerate_nbsm_success, infer_logical, resource_state_steps,
    resource_state_steps_from_plan, simulate_bs, simulate_nbsm, BsOutcome, LogicalBellLabel, ModeBellLabel,
    ResourceKind,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const R2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Logical Bell state of two `n`-photon qubits with `|0> = H^n`,
/// `|1> = V^n`, as `(amplitude, A bits, B bits)` components.
fn logical_state(state: ModeBellLabel) -> [(f64, bool, bool); 2] {
    let s = if state.is_minus() { -R2 } else { R2 };
    if state.is_phi() {
        [(R2, false, false), (s, true, true)]
    } else {
        [(R2, false, true), (s, true, false)]
    }
}

/// `<bell|ab>` for one photon pair.
fn bell_overlap(bell: ModeBellLabel, a: bool, b: bool) -> f64 {
    let sign = if bell.is_minus() && a { -1.0 } else { 1.0 };
    if bell.is_phi() == (a == b) {
        sign * R2
    } else {
        0.0
    }
}

/// Amplitudes of the per-mode Bell tuples in the polarization state vector.
fn bell_amplitudes(n: usize, state: ModeBellLabel) -> BTreeMap<Vec<ModeBellLabel>, f64> {
    let comps = logical_state(state);
    let mut out = BTreeMap::new();
    for idx in 0..4usize.pow(n as u32) {
        let tuple: Vec<ModeBellLabel> = (0..n).map(|i| ModeBellLabel::ALL[idx / 4usize.pow(i as u32) % 4]).collect();
        let amp: f64 = comps.iter().map(|&(c, a, b)| c * tuple.iter().map(|&m| bell_overlap(m, a, b)).product::<f64>()).sum();
        if amp.abs() > 1e-12 {
            out.insert(tuple, amp);
        }
    }
    out
}

#[test]
fn decomposition_matches_state_vector() {
    for n in 1..=5usize {
        let dec = enumerate_decomposition(n as u32).unwrap();
        for (label, tuples) in dec {
            let amps = bell_amplitudes(n, label.state);
            let want = 0.5f64.powf((n as f64 - 1.0) / 2.0);
            assert_eq!(amps.len(), tuples.len(), "{label}");
            for t in &tuples {
                assert!((amps[t].abs() - want).abs() < 1e-12, "{label} {t:?}");
            }
            let norm: f64 = amps.values().map(|a| a * a).sum();
            assert!((norm - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn lossless_outcomes_identify_the_logical_state() {
    for n in 1..=5usize {
        // probability of each outcome pattern under each logical state
        let mut by_pattern: BTreeMap<Vec<Option<ModeBellLabel>>, Vec<(ModeBellLabel, f64)>> = BTreeMap::new();
        let mut fail = 0.0;
        for state in ModeBellLabel::ALL {
            for (t, a) in bell_amplitudes(n, state) {
                let outcomes: Vec<BsOutcome> = t.iter().map(|&m| simulate_bs(m, [false, false])).collect();
                let pattern: Vec<Option<ModeBellLabel>> = outcomes
                    .iter()
                    .map(|o| match o {
                        BsOutcome::Identified(l) => Some(*l),
                        BsOutcome::Failure => None,
                    })
                    .collect();
                if pattern.iter().all(Option::is_none) {
                    fail += a * a / 4.0;
                    assert!(infer_logical(&outcomes).is_none());
                    continue;
                }
                assert_eq!(infer_logical(&outcomes), Some(LogicalBellLabel { n: n as u32, state }));
                by_pattern.entry(pattern).or_default().push((state, a * a));
            }
        }
        // every successful pattern is produced by exactly one logical state
        for (p, states) in &by_pattern {
            let first = states[0].0;
            assert!(states.iter().all(|s| s.0 == first), "{p:?}");
        }
        assert!((fail - 0.5f64.powi(n as i32)).abs() < 1e-12);
        let (ok, total) = enumerate_nbsm_success(n as u32).unwrap();
        assert_eq!(ok as f64 / total as f64, 1.0 - 0.5f64.powi(n as i32));
    }
}

#[test]
fn lossy_failure_matches_closed_form() {
    for n in 1..=5usize {
        for eta in [0.0, 0.01, 0.1, 0.3] {
            let both = (1.0 - eta) * (1.0 - eta);
            let mut fail = 0.0;
            for state in ModeBellLabel::ALL {
                for (t, a) in bell_amplitudes(n, state) {
                    let p: f64 = t.iter().map(|m| if m.is_minus() { 1.0 - both } else { 1.0 }).product();
                    fail += a * a * p / 4.0;
                }
            }
            assert!((fail - nbsm_failure_rate(eta, n as u32)).abs() < 1e-12, "n={n} eta={eta}");
        }
    }
}

#[test]
fn sampled_failure_within_three_sigma() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (n, eta) in [(2, 0.05), (3, 0.2), (8, 0.01)] {
        let trials = 200_000;
        let st = simulate_nbsm(n, eta, trials, &mut rng).unwrap();
        let p = nbsm_failure_rate(eta, n);
        let sigma = (p * (1.0 - p) / trials as f64).sqrt();
        assert!((st.failure_rate() - p).abs() < 3.0 * sigma, "n={n}: {} vs {p}", st.failure_rate());
        assert_eq!(st.mislabels, 0);
    }
    let st = simulate_nbsm(4, 0.0, 10_000, &mut rng).unwrap();
    assert_eq!(st.sign_flips, 0);
}

#[test]
fn resource_steps_agree_with_plans() {
    for n in 2..200 {
        for kind in [ResourceKind::C3, ResourceKind::C3Prime] {
            assert_eq!(resource_state_steps(n, kind).unwrap(), resource_state_steps_from_plan(n, kind).unwrap(), "{n} {kind:?}");
        }
    }
}
