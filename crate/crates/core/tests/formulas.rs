use mtqc::noise::{
    balanced_budget, compose_loss, dephasing_rate, encoded_dephasing, invert_dephasing, invert_encoded_dephasing,
    lambert_w0, nbsm_failure_rate, nbsm_failure_rate_approx, removal_probability, Fiber, Mtqc2Removal, Variant,
};
use mtqc::resources::{enc_cost, ghz_cost, ghz_cost_closed_form, ghz_cost_lossless, plan_ghz, star_cost, Constants};
use proptest::prelude::*;

/// Binomial upper tail by direct summation.
fn majority_fail(p: f64, n: u32) -> f64 {
    let mut total = 0.0;
    for k in 0..=n {
        if 2 * k > n {
            let c = (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64);
            total += c * p.powi(k as i32) * (1.0 - p).powi((n - k) as i32);
        }
    }
    total
}

#[test]
fn closed_form_equals_recursion() {
    for m in 3..=1026 {
        assert_eq!(ghz_cost_closed_form(m).unwrap(), ghz_cost_lossless(m).unwrap(), "m={m}");
    }
}

#[test]
fn lossless_exact_cost_is_an_integer_count() {
    for m in 3..=300 {
        assert_eq!(ghz_cost(m, 0.0, Constants::Exact).unwrap(), ghz_cost_lossless(m).unwrap() as f64);
    }
}

proptest! {
    #[test]
    fn plans_build_the_requested_size(m in 3u32..2000) {
        let plan = plan_ghz(m).unwrap();
        prop_assert_eq!(plan.fold(3u32, |a, b| a + b - 2), m);
        prop_assert_eq!(plan.leaves(), (m - 2) as usize);
        let depth = if m == 3 { 0 } else { 32 - (m - 3).leading_zeros() as usize };
        prop_assert_eq!(plan.depth(), depth);
        for round in &plan.steps {
            for f in round {
                prop_assert!(f.left >= 3 && f.right >= 3);
            }
        }
    }

    #[test]
    fn ghz_cost_grows_with_loss(m in 3u32..200, a in 0.0f64..0.2, b in 0.0f64..0.2) {
        let (lo, hi) = (a.min(b), a.max(b));
        prop_assert!(ghz_cost(m, lo, Constants::Exact).unwrap() <= ghz_cost(m, hi, Constants::Exact).unwrap());
        prop_assert!(ghz_cost(m, lo, Constants::Exact).unwrap() <= ghz_cost(m + 1, lo, Constants::Exact).unwrap());
    }

    #[test]
    fn costs_are_ordered(n in 3u32..30, m in 2u32..10, eta in 0.0f64..0.05) {
        let c = Constants::Exact;
        let s1 = star_cost(n, m, eta, Variant::Mtqc1, false, c).unwrap();
        let s2 = star_cost(n, m, eta, Variant::Mtqc2, false, c).unwrap();
        prop_assert!(s2 >= s1);
        // the encoded central qubit uses three GHZ_{m+1} and a GHZ_5
        prop_assert!(enc_cost(m, eta, c).unwrap() > ghz_cost(m + 2, eta, c).unwrap());
    }

    #[test]
    fn encoded_dephasing_matches_direct_sum(p in 0.0f64..=0.5, k in 0u32..8) {
        let n = 2 * k + 1;
        let got = encoded_dephasing(p, n);
        let want = majority_fail(p, n);
        prop_assert!((got - want).abs() <= 1e-13 * want.max(1e-300) + 1e-300, "{} vs {}", got, want);
        let back = invert_encoded_dephasing(got, n).unwrap();
        prop_assert!((back - p).abs() < 1e-9);
    }

    #[test]
    fn dephasing_inverts(eta in 0.0f64..0.5, l in 1u32..20) {
        let p = dephasing_rate(eta, l);
        prop_assert!((0.0..=0.5).contains(&p));
        prop_assert!((invert_dephasing(p, l).unwrap() - eta).abs() < 1e-9);
    }

    #[test]
    fn nbsm_failure_is_monotone(eta in 0.0f64..0.5, n in 1u32..40) {
        prop_assert!(nbsm_failure_rate(eta, n + 1) < nbsm_failure_rate(eta, n));
        prop_assert!(nbsm_failure_rate(eta, n) <= nbsm_failure_rate((eta + 0.01).min(1.0), n));
        // the approximation drops eta^2 terms, so it never undercounts
        prop_assert!(nbsm_failure_rate_approx(eta, n) >= nbsm_failure_rate(eta, n));
    }

    #[test]
    fn balanced_budget_is_consistent(eta in 0.006f64..0.3, kappa in 1u32..8) {
        let f = Fiber::default();
        prop_assume!(f.delay_loss(kappa) < eta);
        let b = balanced_budget(eta, kappa, f).unwrap();
        prop_assert!((compose_loss(&b) - eta).abs() < 1e-14);
        prop_assert!((b.eta_soc - b.eta_det).abs() < 1e-15 && (b.eta_soc - b.eta_swc).abs() < 1e-15);
        prop_assert!(b.eta_s <= b.eta_swc);
    }

    #[test]
    fn lambert_w0_inverts(x in -0.3678f64..1e6) {
        let w = lambert_w0(x);
        prop_assert!((w * w.exp() - x).abs() <= 1e-10 * x.abs().max(1.0));
    }

    #[test]
    fn removal_probability_orders_variants(p_f in 0.0f64..0.5) {
        let r1 = removal_probability(p_f, Variant::Mtqc1, Mtqc2Removal::WholeQubit);
        let r2 = removal_probability(p_f, Variant::Mtqc2, Mtqc2Removal::WholeQubit);
        let r2e = removal_probability(p_f, Variant::Mtqc2, Mtqc2Removal::MissingEdge);
        prop_assert!(r1 >= r2 && r2 >= r2e);
        prop_assert!((r1 - (1.0 - (1.0 - p_f).powi(4) * (1.0 - p_f / 2.0).powi(4))).abs() < 1e-14);
    }
}
