//! Label-level model of the polarization Bell measurement and its
//! multiphoton cascade.
//!
//! A logical Bell state of two `n`-photon qubits is a superposition of
//! products of per-mode Bell states. All modes share the logical state's
//! type (phi or psi), and the number of minus-labelled modes is even for a
//! plus state and odd for a minus state. `B_S` identifies the two minus
//! mode states and fails on the plus ones, so one identified mode fixes the
//! type and the count of identified modes fixes the sign.
//!
//! Photon loss is a per-photon flag that forces the owning `B_S` to fail.

use std::fmt;

use rand::Rng;
use serde::Serialize;

use crate::error::{domain, Result};
use crate::resources::plan_ghz;

/// Bell state of one photon-mode pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum ModeBellLabel {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl ModeBellLabel {
    pub const ALL: [ModeBellLabel; 4] =
        [ModeBellLabel::PhiPlus, ModeBellLabel::PhiMinus, ModeBellLabel::PsiPlus, ModeBellLabel::PsiMinus];

    pub fn new(phi: bool, minus: bool) -> Self {
        match (phi, minus) {
            (true, false) => ModeBellLabel::PhiPlus,
            (true, true) => ModeBellLabel::PhiMinus,
            (false, false) => ModeBellLabel::PsiPlus,
            (false, true) => ModeBellLabel::PsiMinus,
        }
    }

    pub fn is_phi(self) -> bool {
        matches!(self, ModeBellLabel::PhiPlus | ModeBellLabel::PhiMinus)
    }

    pub fn is_minus(self) -> bool {
        matches!(self, ModeBellLabel::PhiMinus | ModeBellLabel::PsiMinus)
    }
}

impl fmt::Display for ModeBellLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModeBellLabel::PhiPlus => "phi+",
            ModeBellLabel::PhiMinus => "phi-",
            ModeBellLabel::PsiPlus => "psi+",
            ModeBellLabel::PsiMinus => "psi-",
        })
    }
}

/// Bell state of two `n`-photon qubits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct LogicalBellLabel {
    pub n: u32,
    pub state: ModeBellLabel,
}

impl LogicalBellLabel {
    /// Logical label implied by a full tuple of mode labels, if the tuple
    /// is consistent (all modes of one type).
    pub fn from_modes(modes: &[ModeBellLabel]) -> Option<Self> {
        let first = *modes.first()?;
        if modes.iter().any(|m| m.is_phi() != first.is_phi()) {
            return None;
        }
        let odd = modes.iter().filter(|m| m.is_minus()).count() % 2 == 1;
        Some(LogicalBellLabel { n: modes.len() as u32, state: ModeBellLabel::new(first.is_phi(), odd) })
    }
}

impl fmt::Display for LogicalBellLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_{}", self.state, self.n)
    }
}

pub const MAX_ENUM_N: u32 = 12;

/// Mode-label tuples in the decomposition of each logical Bell state, each
/// carrying amplitude `2^{-(n-1)/2}`.
pub fn enumerate_decomposition(n: u32) -> Result<Vec<(LogicalBellLabel, Vec<Vec<ModeBellLabel>>)>> {
    if !(1..=MAX_ENUM_N).contains(&n) {
        return Err(domain("n", format!("{n} not in 1..={MAX_ENUM_N}")));
    }
    let mut out = Vec::with_capacity(4);
    for state in ModeBellLabel::ALL {
        let mut tuples = Vec::with_capacity(1 << (n - 1));
        for mask in 0u32..(1 << n) {
            if (mask.count_ones() % 2 == 1) != state.is_minus() {
                continue;
            }
            tuples.push((0..n).map(|i| ModeBellLabel::new(state.is_phi(), mask >> i & 1 == 1)).collect());
        }
        out.push((LogicalBellLabel { n, state }, tuples));
    }
    Ok(out)
}

/// Outcome of one `B_S`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BsOutcome {
    Identified(ModeBellLabel),
    Failure,
}

/// `B_S` on one mode pair; `lost` flags the two photons.
pub fn simulate_bs(input: ModeBellLabel, lost: [bool; 2]) -> BsOutcome {
    if lost[0] || lost[1] || !input.is_minus() {
        BsOutcome::Failure
    } else {
        BsOutcome::Identified(input)
    }
}

/// Result of a collective measurement on one logical Bell state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NbsmOutcome {
    pub inferred: Option<LogicalBellLabel>,
    /// Some photon was lost in a mode pair that did not report.
    pub lossy: bool,
}

/// Infers the logical label from per-mode outcomes: the type from any
/// identified mode, the sign from the parity of identified modes.
pub fn infer_logical(outcomes: &[BsOutcome]) -> Option<LogicalBellLabel> {
    let ids: Vec<ModeBellLabel> = outcomes
        .iter()
        .filter_map(|o| match o {
            BsOutcome::Identified(l) => Some(*l),
            BsOutcome::Failure => None,
        })
        .collect();
    let first = *ids.first()?;
    debug_assert!(ids.iter().all(|l| l.is_phi() == first.is_phi()));
    Some(LogicalBellLabel { n: outcomes.len() as u32, state: ModeBellLabel::new(first.is_phi(), ids.len() % 2 == 1) })
}

/// Measures one decomposition term with the given loss flags.
pub fn measure_modes(modes: &[ModeBellLabel], lost: &[[bool; 2]]) -> NbsmOutcome {
    let outcomes: Vec<BsOutcome> = modes.iter().zip(lost).map(|(&m, &l)| simulate_bs(m, l)).collect();
    let lossy = lost.iter().any(|l| l[0] || l[1]);
    NbsmOutcome { inferred: infer_logical(&outcomes), lossy }
}

/// Sampling statistics of the collective measurement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NbsmStats {
    pub n: u32,
    pub eta: f64,
    pub trials: u64,
    pub successes: u64,
    /// Successful trials whose sign was hidden by a lost minus mode.
    pub sign_flips: u64,
    /// Successful lossless trials with a wrong label (always zero).
    pub mislabels: u64,
}

impl NbsmStats {
    pub fn failure_rate(&self) -> f64 {
        1.0 - self.successes as f64 / self.trials as f64
    }
}

/// Samples uniformly random logical Bell states and decomposition terms,
/// with independent photon loss at rate `eta`.
pub fn simulate_nbsm<R: Rng + ?Sized>(n: u32, eta: f64, trials: u64, rng: &mut R) -> Result<NbsmStats> {
    if n == 0 {
        return Err(domain("n", "must be >= 1"));
    }
    if !(0.0..=1.0).contains(&eta) {
        return Err(domain("eta", format!("{eta} not in [0, 1]")));
    }
    let mut st = NbsmStats { n, eta, trials, successes: 0, sign_flips: 0, mislabels: 0 };
    let mut modes = vec![ModeBellLabel::PhiPlus; n as usize];
    let mut lost = vec![[false; 2]; n as usize];
    for _ in 0..trials {
        let truth = ModeBellLabel::ALL[rng.gen_range(0..4)];
        // uniform term: free signs on the first n-1 modes, parity fixes the last
        let mut odd = false;
        for (i, m) in modes.iter_mut().enumerate() {
            let minus = if i + 1 < n as usize { rng.gen::<bool>() } else { odd != truth.is_minus() };
            odd ^= minus;
            *m = ModeBellLabel::new(truth.is_phi(), minus);
        }
        for l in lost.iter_mut() {
            *l = [rng.gen::<f64>() < eta, rng.gen::<f64>() < eta];
        }
        let out = measure_modes(&modes, &lost);
        if let Some(label) = out.inferred {
            st.successes += 1;
            if label.state != truth {
                if out.lossy {
                    st.sign_flips += 1;
                } else {
                    st.mislabels += 1;
                }
            }
        }
    }
    Ok(st)
}

/// Exact lossless success count over all logical states and terms:
/// `(successes, total)`.
pub fn enumerate_nbsm_success(n: u32) -> Result<(u64, u64)> {
    let mut ok = 0;
    let mut total = 0;
    let lost = vec![[false; 2]; n as usize];
    for (truth, tuples) in enumerate_decomposition(n)? {
        for t in tuples {
            total += 1;
            if let Some(l) = measure_modes(&t, &lost).inferred {
                debug_assert_eq!(l, truth);
                ok += 1;
            }
        }
    }
    Ok((ok, total))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ResourceKind {
    C3,
    C3Prime,
}

/// Number of `B_S` successes needed along the generation of a resource
/// state: the GHZ depth plus the two final fusions.
pub fn resource_state_steps(n: u32, kind: ResourceKind) -> Result<u32> {
    if n < 2 {
        return Err(domain("n", "must be >= 2"));
    }
    let base = match kind {
        ResourceKind::C3 => n,
        ResourceKind::C3Prime => n - 1,
    };
    Ok(ceil_log2(base) + 2)
}

fn ceil_log2(x: u32) -> u32 {
    32 - (x - 1).leading_zeros()
}

/// Success rate of one resource-state generation attempt, `s^k` with
/// `s = (1-eta)^2/2`. At `eta = 0` this is `2^{-k}`.
pub fn resource_state_success_rate(n: u32, m: u32, kind: ResourceKind, eta: f64) -> Result<f64> {
    if m < 1 {
        return Err(domain("m", "must be >= 1"));
    }
    if !(0.0..=1.0).contains(&eta) {
        return Err(domain("eta", format!("{eta} not in [0, 1]")));
    }
    let k = resource_state_steps(n, kind)?;
    Ok(((1.0 - eta) * (1.0 - eta) / 2.0).powi(k as i32))
}

/// Same count from the GHZ plans: the deepest `GHZ_{n+1}`/`GHZ_{n+2}`
/// constituent plus two.
pub fn resource_state_steps_from_plan(n: u32, kind: ResourceKind) -> Result<u32> {
    let sizes = match kind {
        ResourceKind::C3 => vec![n + 1, n + 2],
        ResourceKind::C3Prime => vec![n + 1],
    };
    let mut depth = 0;
    for s in sizes {
        depth = depth.max(plan_ghz(s)?.depth() as u32);
    }
    Ok(depth + 2)
}

/// One line of the verification table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OpticsCheck {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

/// Runs the enumeration and sampling checks used by `verify-optics`.
pub fn verify_all<R: Rng + ?Sized>(max_n: u32, trials: u64, rng: &mut R) -> Result<Vec<OpticsCheck>> {
    let mut out = Vec::new();
    for n in 1..=max_n.min(MAX_ENUM_N) {
        let dec = enumerate_decomposition(n)?;
        let mut all: Vec<&Vec<ModeBellLabel>> = dec.iter().flat_map(|(_, t)| t.iter()).collect();
        let total = all.len();
        all.sort();
        all.dedup();
        let consistent = dec.iter().all(|(l, ts)| ts.iter().all(|t| LogicalBellLabel::from_modes(t) == Some(*l)));
        out.push(OpticsCheck {
            name: format!("decomposition n={n}"),
            pass: total == 4 << (n - 1) && all.len() == total && consistent,
            detail: format!("{total} distinct terms"),
        });
        let (ok, tot) = enumerate_nbsm_success(n)?;
        let want = 1.0 - 0.5f64.powi(n as i32);
        out.push(OpticsCheck {
            name: format!("n-BSM lossless success n={n}"),
            pass: ok as f64 / tot as f64 == want,
            detail: format!("{ok}/{tot}"),
        });
    }
    for (n, eta) in [(1, 0.01), (4, 0.05), (8, 0.01)] {
        let st = simulate_nbsm(n, eta, trials, rng)?;
        let p = crate::noise::nbsm_failure_rate(eta, n);
        let sigma = (p * (1.0 - p) / trials as f64).sqrt();
        let got = st.failure_rate();
        out.push(OpticsCheck {
            name: format!("n-BSM failure n={n} eta={eta}"),
            pass: (got - p).abs() <= 3.0 * sigma.max(1.0 / trials as f64) && st.mislabels == 0,
            detail: format!("{got:.5} vs {p:.5}"),
        });
    }
    for (n, kind, want) in [(4, ResourceKind::C3, 1.0 / 16.0), (2, ResourceKind::C3Prime, 0.25), (8, ResourceKind::C3, 1.0 / 32.0)] {
        let got = resource_state_success_rate(n, 2, kind, 0.0)?;
        out.push(OpticsCheck {
            name: format!("{kind:?} success n={n}"),
            pass: got == want,
            detail: format!("{got}"),
        });
    }
    Ok(out)
}
