//! Closed-form noise model.
//!
//! Photon loss at rate `eta` per photon turns into dephasing of an
//! `l`-photon qubit, into failure of the collective `n`-BSM, and (through
//! failed BSMs) into removal of lattice qubits. Threshold conversions map
//! a dephasing threshold back to a tolerable photon-loss rate, optionally
//! through a majority-vote repetition code.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Loss bound on the lattice-qubit removal probability for MTQC-1.
pub const MTQC1_LOSS_BOUND: f64 = 0.249;
/// Upper bound on the `n`-BSM failure rate for MTQC-2.
pub const MTQC2_PF_BOUND: f64 = 0.145;
/// Largest `n` tried by [`min_n_for_variant`].
pub const MAX_PHOTONS: u32 = 4096;

/// Protocol subvariant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Distorted star clusters are kept; failed BSMs add diagonal edges.
    Mtqc1,
    /// Intact star clusters are post-selected with switches.
    Mtqc2,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Mtqc1 => "mtqc1",
            Variant::Mtqc2 => "mtqc2",
        })
    }
}

impl FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "mtqc1" | "1" => Ok(Variant::Mtqc1),
            "mtqc2" | "2" => Ok(Variant::Mtqc2),
            _ => Err(Error::Config(format!("unknown variant '{s}' (expected mtqc1 or mtqc2)"))),
        }
    }
}

/// Removal model for MTQC-2 lattice qubits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mtqc2Removal {
    /// Survival `(1-p_f)^4`.
    #[default]
    WholeQubit,
    /// Survival `(1-p_f/2)^4`: each failed BSM removes one of two qubits.
    MissingEdge,
}

impl fmt::Display for Mtqc2Removal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mtqc2Removal::WholeQubit => "whole-qubit",
            Mtqc2Removal::MissingEdge => "missing-edge",
        })
    }
}

impl FromStr for Mtqc2Removal {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "whole-qubit" => Ok(Mtqc2Removal::WholeQubit),
            "missing-edge" => Ok(Mtqc2Removal::MissingEdge),
            _ => Err(Error::Config(format!(
                "unknown MTQC-2 removal model '{s}' (expected whole-qubit or missing-edge)"
            ))),
        }
    }
}

/// Physical noise point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    pub eta: f64,
    /// Photons per surrounding qubit.
    pub n: u32,
    /// Photons per lattice qubit.
    pub m: u32,
    /// Repetition-code size, 1 when unencoded.
    pub n_rep: u32,
    pub variant: Variant,
}

impl NoiseParams {
    pub fn new(eta: f64, n: u32, m: u32, n_rep: u32, variant: Variant) -> Result<Self> {
        let p = NoiseParams { eta, n, m, n_rep, variant };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.eta) {
            return Err(domain("eta", format!("{} not in [0, 1)", self.eta)));
        }
        if self.n < 1 {
            return Err(domain("n", "must be >= 1"));
        }
        if self.m < 1 {
            return Err(domain("m", "must be >= 1"));
        }
        if self.n_rep < 1 || self.n_rep % 2 == 0 {
            return Err(domain("N_rep", format!("{} is not an odd integer >= 1", self.n_rep)));
        }
        Ok(())
    }

    /// `n`-BSM failure rate.
    pub fn p_f(&self) -> f64 {
        nbsm_failure_rate(self.eta, self.n)
    }

    /// Dephasing rate of a lattice qubit, after repetition decoding.
    pub fn p_z(&self) -> f64 {
        encoded_dephasing(dephasing_rate(self.eta, self.m), self.n_rep)
    }
}

/// Dephasing of an `l`-photon qubit: `(1 - (1-eta)^l) / 2`.
pub fn dephasing_rate(eta: f64, l: u32) -> f64 {
    (1.0 - (1.0 - eta).powi(l as i32)) / 2.0
}

/// Loss rate giving dephasing `p_z` on an `l`-photon qubit.
pub fn invert_dephasing(p_z: f64, l: u32) -> Result<f64> {
    if !(0.0..=0.5).contains(&p_z) {
        return Err(domain("p_Z", format!("{p_z} not in [0, 1/2]")));
    }
    if l == 0 {
        return Err(domain("l", "must be >= 1"));
    }
    Ok(1.0 - (1.0 - 2.0 * p_z).powf(1.0 / l as f64))
}

/// Failure rate of the collective `n`-BSM: `[1 - (1-eta)^2/2]^n`.
pub fn nbsm_failure_rate(eta: f64, n: u32) -> f64 {
    (1.0 - (1.0 - eta) * (1.0 - eta) / 2.0).powi(n as i32)
}

/// Small-loss approximation `(1/2 + eta)^n` of [`nbsm_failure_rate`].
pub fn nbsm_failure_rate_approx(eta: f64, n: u32) -> f64 {
    (0.5 + eta).powi(n as i32)
}

/// Success probability of one `B_S` with both photons exposed to loss.
pub fn bs_success(eta: f64) -> f64 {
    (1.0 - eta) * (1.0 - eta) / 2.0
}

/// Fibre constants for the delay-line loss.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fiber {
    /// Signal speed in km/s.
    pub c: f64,
    /// BSM duration in s.
    pub tau0: f64,
    /// Attenuation length in km.
    pub l0: f64,
}

impl Default for Fiber {
    fn default() -> Self {
        Fiber { c: 2.0e5, tau0: 150.0e-9, l0: 22.0 }
    }
}

impl Fiber {
    /// Loss while waiting `kappa` BSM durations in fibre.
    pub fn delay_loss(&self, kappa: u32) -> f64 {
        1.0 - (-self.c * self.tau0 * kappa as f64 / self.l0).exp()
    }
}

/// Photon-loss budget split over source, delay line, switches and
/// detectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossBudget {
    pub eta_soc: f64,
    pub eta_dly: f64,
    pub eta_swc: f64,
    pub eta_det: f64,
    /// Loss per switch.
    pub eta_s: f64,
    pub kappa: u32,
    pub fiber: Fiber,
}

impl LossBudget {
    /// Budget with `eta_dly` and `eta_swc` derived from `kappa` and
    /// `eta_s`.
    pub fn from_components(eta_soc: f64, eta_s: f64, eta_det: f64, kappa: u32, fiber: Fiber) -> Result<Self> {
        for (name, v) in [("eta_soc", eta_soc), ("eta_s", eta_s), ("eta_det", eta_det)] {
            if !(0.0..1.0).contains(&v) {
                return Err(domain(name, format!("{v} not in [0, 1)")));
            }
        }
        Ok(LossBudget {
            eta_soc,
            eta_dly: fiber.delay_loss(kappa),
            eta_swc: 1.0 - (1.0 - eta_s).powi(kappa as i32),
            eta_det,
            eta_s,
            kappa,
            fiber,
        })
    }
}

/// Overall loss from independent components.
pub fn compose_loss(b: &LossBudget) -> f64 {
    1.0 - (1.0 - b.eta_soc) * (1.0 - b.eta_dly) * (1.0 - b.eta_swc) * (1.0 - b.eta_det)
}

/// Budget with equal source, switch and detector losses that composes to
/// `eta_total` after the delay loss fixed by `kappa`.
pub fn balanced_budget(eta_total: f64, kappa: u32, fiber: Fiber) -> Result<LossBudget> {
    if !(0.0..1.0).contains(&eta_total) {
        return Err(domain("eta_total", format!("{eta_total} not in [0, 1)")));
    }
    let eta_dly = fiber.delay_loss(kappa);
    if eta_dly > eta_total {
        return Err(Error::Infeasible(format!(
            "delay loss {eta_dly:.6e} alone exceeds eta_total {eta_total}"
        )));
    }
    let each = 1.0 - ((1.0 - eta_total) / (1.0 - eta_dly)).cbrt();
    let eta_s = if kappa == 0 { 0.0 } else { 1.0 - (1.0 - each).powf(1.0 / kappa as f64) };
    Ok(LossBudget { eta_soc: each, eta_dly, eta_swc: each, eta_det: each, eta_s, kappa, fiber })
}

fn ln_choose(n: u32, k: u32) -> f64 {
    let k = k.min(n - k);
    (0..k).map(|i| ((n - i) as f64).ln() - ((i + 1) as f64).ln()).sum()
}

/// Majority-vote failure of an `n_rep`-qubit repetition code, i.e. the
/// upper binomial tail `P[X > n_rep/2]` with `X ~ Bin(n_rep, p)`.
pub fn encoded_dephasing(p: f64, n_rep: u32) -> f64 {
    if n_rep <= 1 {
        return p;
    }
    if p <= 0.0 {
        return 0.0;
    }
    if p >= 1.0 {
        return 1.0;
    }
    let first = n_rep.div_ceil(2) + u32::from(n_rep % 2 == 0);
    if n_rep <= 64 {
        // Neumaier summation of the exact terms.
        let mut sum = 0.0f64;
        let mut comp = 0.0f64;
        let mut coeff = 1.0f64;
        for i in 0..first {
            coeff = coeff * (n_rep - i) as f64 / (i + 1) as f64;
        }
        for q in first..=n_rep {
            let term = coeff * p.powi(q as i32) * (1.0 - p).powi((n_rep - q) as i32);
            let t = sum + term;
            if sum.abs() >= term.abs() {
                comp += (sum - t) + term;
            } else {
                comp += (term - t) + sum;
            }
            sum = t;
            coeff = coeff * (n_rep - q) as f64 / (q + 1) as f64;
        }
        sum + comp
    } else {
        let (lp, lq) = (p.ln(), (1.0 - p).ln());
        let logs: Vec<f64> = (first..=n_rep)
            .map(|q| ln_choose(n_rep, q) + q as f64 * lp + (n_rep - q) as f64 * lq)
            .collect();
        let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        max.exp() * logs.iter().map(|l| (l - max).exp()).sum::<f64>()
    }
}

/// Physical dephasing whose encoded rate equals `p_target`.
pub fn invert_encoded_dephasing(p_target: f64, n_rep: u32) -> Result<f64> {
    if !(0.0..=0.5).contains(&p_target) {
        return Err(domain("p_target", format!("{p_target} not in [0, 1/2]")));
    }
    if n_rep == 0 || n_rep % 2 == 0 {
        return Err(domain("N_rep", format!("{n_rep} is not an odd integer >= 1")));
    }
    bisect(|p| encoded_dephasing(p, n_rep) - p_target, 0.0, 0.5, 1e-12)
}

/// Root of an increasing function on `[lo, hi]`.
pub(crate) fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    let (flo, fhi) = (f(lo), f(hi));
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo > 0.0 || fhi < 0.0 {
        return Err(Error::Infeasible(format!("no sign change on [{lo}, {hi}]")));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Principal branch `W0` of the Lambert function, for `x >= -1/e`.
///
/// Newton iteration started from the large-argument series for `x > e`
/// and from `ln(1+x)` otherwise.
pub fn lambert_w0(x: f64) -> f64 {
    let e = std::f64::consts::E;
    if x.is_nan() || x < -1.0 / e {
        return f64::NAN;
    }
    if x == 0.0 {
        return 0.0;
    }
    if x == f64::INFINITY {
        return f64::INFINITY;
    }
    let mut w = if x > e {
        let l1 = x.ln();
        let l2 = l1.ln();
        l1 - l2 + l2 / l1 + (l2 - 2.0) * l2 / (2.0 * l1 * l1)
    } else if x > -0.3 {
        x.ln_1p()
    } else {
        (2.0 * (1.0 + e * x)).sqrt() - 1.0
    };
    for _ in 0..100 {
        let ew = w.exp();
        let f = w * ew - x;
        let fp = ew * (w + 1.0);
        if fp == 0.0 {
            break;
        }
        let step = f / fp;
        w -= step;
        if step.abs() <= 1e-15 * w.abs().max(1e-300) {
            break;
        }
    }
    w
}

/// Large-`N` approximation of the encoded loss threshold:
/// `1 - [1 + N / W(1/(2 pi p^2))]^(-1/(2m))`.
pub fn lambert_threshold_approx(p_target: f64, n_rep: u32, m: u32) -> Result<f64> {
    if !(p_target > 0.0 && p_target < 0.5) {
        return Err(domain("p_target", format!("{p_target} not in (0, 1/2)")));
    }
    if n_rep == 0 || m == 0 {
        return Err(domain("N_rep/m", "must be >= 1"));
    }
    let w = lambert_w0(1.0 / (2.0 * std::f64::consts::PI * p_target * p_target));
    Ok(1.0 - (1.0 + n_rep as f64 / w).powf(-1.0 / (2.0 * m as f64)))
}

/// Independent removal exposures of one lattice qubit. The qubit is
/// removed when any of them fires.
pub fn removal_mechanisms(p_f: f64, variant: Variant, mtqc2: Mtqc2Removal) -> Vec<f64> {
    match (variant, mtqc2) {
        (Variant::Mtqc1, _) => vec![p_f, p_f, p_f, p_f, p_f / 2.0, p_f / 2.0, p_f / 2.0, p_f / 2.0],
        (Variant::Mtqc2, Mtqc2Removal::WholeQubit) => vec![p_f; 4],
        (Variant::Mtqc2, Mtqc2Removal::MissingEdge) => vec![p_f / 2.0; 4],
    }
}

/// Probability that a lattice qubit survives the removal step.
pub fn qubit_survival(p_f: f64, variant: Variant, mtqc2: Mtqc2Removal) -> f64 {
    removal_mechanisms(p_f, variant, mtqc2).iter().map(|p| 1.0 - p).product()
}

/// Removal probability of a lattice qubit.
pub fn removal_probability(p_f: f64, variant: Variant, mtqc2: Mtqc2Removal) -> f64 {
    1.0 - qubit_survival(p_f, variant, mtqc2)
}

/// `p_f` at which MTQC-1 removal reaches [`MTQC1_LOSS_BOUND`].
pub fn mtqc1_pf_threshold() -> f64 {
    bisect(
        |p| removal_probability(p, Variant::Mtqc1, Mtqc2Removal::WholeQubit) - MTQC1_LOSS_BOUND,
        0.0,
        1.0,
        1e-14,
    )
    .expect("removal probability is increasing on [0, 1]")
}

/// Smallest `n` for which the variant is below its bound at loss `eta`,
/// or `None` if no `n <= MAX_PHOTONS` works.
pub fn min_n_for_variant(eta: f64, variant: Variant) -> Option<u32> {
    (1..=MAX_PHOTONS).find(|&n| {
        let p_f = nbsm_failure_rate(eta, n);
        match variant {
            Variant::Mtqc1 => removal_probability(p_f, variant, Mtqc2Removal::WholeQubit) < MTQC1_LOSS_BOUND,
            Variant::Mtqc2 => p_f < MTQC2_PF_BOUND,
        }
    })
}
