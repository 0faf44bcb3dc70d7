//! GHZ3 consumption and photon-pair operation counts.
//!
//! GHZ states are grown by fusing pairs with a `B_S`, which succeeds with
//! probability `s`; a failed fusion discards both inputs, so the mean cost
//! of a fused state is `(N_1 + N_2) / s` GHZ3 states.
//!
//! Two sets of constants are supported. [`Constants::Exact`] uses
//! `s = (1-eta)^2/2` and the exact BSM failure rate everywhere.
//! [`Constants::Rounded`] uses `s = (1-2 eta)/2` and `p_f = (1/2 + eta)^n`,
//! and rounds GHZ costs and the first encoded-state fusion to two decimals
//! where they feed later formulas, as tabulated values would be.

mod ppo;

pub use ppo::{c3_ppo_tree, c3_prime_ppo_tree, ghz_ppo_tree, ppo_cost, tm_chain, PpoTree};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::lattice::count_lattice_qubits_for_gate;
use crate::noise::{nbsm_failure_rate, nbsm_failure_rate_approx, Variant};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Constants {
    #[default]
    Exact,
    Rounded,
}

impl fmt::Display for Constants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Constants::Exact => "exact",
            Constants::Rounded => "rounded",
        })
    }
}

impl FromStr for Constants {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Constants::Exact),
            "rounded" => Ok(Constants::Rounded),
            _ => Err(Error::Config(format!("unknown constants '{s}' (expected exact or rounded)"))),
        }
    }
}

impl Constants {
    /// Fusion success probability.
    pub fn bs_success(self, eta: f64) -> f64 {
        match self {
            Constants::Exact => (1.0 - eta) * (1.0 - eta) / 2.0,
            Constants::Rounded => (1.0 - 2.0 * eta) / 2.0,
        }
    }

    pub fn p_f(self, eta: f64, n: u32) -> f64 {
        match self {
            Constants::Exact => nbsm_failure_rate(eta, n),
            Constants::Rounded => nbsm_failure_rate_approx(eta, n),
        }
    }

    fn table(self, x: f64) -> f64 {
        match self {
            Constants::Exact => x,
            Constants::Rounded => (x * 100.0).round() / 100.0,
        }
    }
}

/// One `B_S` fusion of GHZ states of the given sizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Fusion {
    pub left: u32,
    pub right: u32,
}

impl Fusion {
    pub fn result(&self) -> u32 {
        self.left + self.right - 2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Node {
    Leaf,
    Fuse(usize, usize),
}

/// Fusion tree building `GHZ_m` from `m - 2` GHZ3 states.
///
/// Each round fuses neighbouring states pairwise in list order. An odd
/// state out is carried to the front of the next round's list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GhzPlan {
    pub m: u32,
    /// Fusions per round.
    pub steps: Vec<Vec<Fusion>>,
    nodes: Vec<Node>,
    root: usize,
}

impl GhzPlan {
    pub fn depth(&self) -> usize {
        self.steps.len()
    }

    pub fn leaves(&self) -> usize {
        self.nodes.iter().filter(|n| **n == Node::Leaf).count()
    }

    /// The last fusion, larger input first.
    pub fn final_fusion(&self) -> Option<Fusion> {
        self.steps.last().and_then(|s| s.last()).map(|f| Fusion { left: f.left.max(f.right), right: f.left.min(f.right) })
    }

    /// Evaluates the tree bottom-up with `leaf` for GHZ3 and `fuse` for
    /// each fusion.
    pub fn fold<T: Copy>(&self, leaf: T, mut fuse: impl FnMut(T, T) -> T) -> T {
        let mut val: Vec<Option<T>> = vec![None; self.nodes.len()];
        for (i, n) in self.nodes.iter().enumerate() {
            val[i] = Some(match *n {
                Node::Leaf => leaf,
                Node::Fuse(a, b) => fuse(val[a].unwrap(), val[b].unwrap()),
            });
        }
        val[self.root].unwrap()
    }
}

/// Plans the generation of `GHZ_m`.
pub fn plan_ghz(m: u32) -> Result<GhzPlan> {
    if m < 3 {
        return Err(domain("m", format!("GHZ size {m} < 3")));
    }
    let mut nodes = Vec::new();
    let mut sizes = Vec::new();
    let mut current: Vec<usize> = (0..m - 2)
        .map(|_| {
            nodes.push(Node::Leaf);
            sizes.push(3);
            nodes.len() - 1
        })
        .collect();
    let mut steps = Vec::new();
    while current.len() > 1 {
        let mut round = Vec::new();
        let mut next = Vec::new();
        if current.len() % 2 == 1 {
            next.push(*current.last().unwrap());
        }
        for pair in current.chunks_exact(2) {
            let (a, b) = (pair[0], pair[1]);
            round.push(Fusion { left: sizes[a], right: sizes[b] });
            nodes.push(Node::Fuse(a, b));
            sizes.push(sizes[a] + sizes[b] - 2);
            next.push(nodes.len() - 1);
        }
        steps.push(round);
        current = next;
    }
    Ok(GhzPlan { m, steps, nodes, root: current[0] })
}

/// Closed-form lossless GHZ3 count,
/// `3(m-2) 2^k - 2 * 4^k` with `k = floor(log2(m-2))`.
pub fn ghz_cost_closed_form(m: u32) -> Result<u64> {
    if m < 3 {
        return Err(domain("m", format!("GHZ size {m} < 3")));
    }
    let k = 63 - ((m - 2) as u64).leading_zeros() as u64;
    Ok(3 * (m as u64 - 2) * (1u64 << k) - 2 * (1u64 << (2 * k)))
}

/// Lossless GHZ3 count from the plan recursion (`s = 1/2`).
pub fn ghz_cost_lossless(m: u32) -> Result<u64> {
    Ok(plan_ghz(m)?.fold(1u64, |a, b| 2 * (a + b)))
}

/// Mean GHZ3 count for `GHZ_m` at loss `eta`.
pub fn ghz_cost(m: u32, eta: f64, c: Constants) -> Result<f64> {
    check_eta(eta)?;
    let s = c.bs_success(eta);
    Ok(c.table(plan_ghz(m)?.fold(1.0f64, |a, b| (a + b) / s)))
}

fn check_eta(eta: f64) -> Result<()> {
    if !(0.0..0.5).contains(&eta) {
        return Err(domain("eta", format!("{eta} not in [0, 1/2)")));
    }
    Ok(())
}

/// Mean GHZ3 count for the encoded central qubit: `GHZ_{m+1}` fused with
/// `GHZ_5`, then two more `GHZ_{m+1}` fused at once.
pub fn enc_cost(m: u32, eta: f64, c: Constants) -> Result<f64> {
    if m < 2 {
        return Err(domain("m", "must be >= 2"));
    }
    let s = c.bs_success(eta);
    let nm = ghz_cost(m + 1, eta, c)?;
    let first = c.table((nm + ghz_cost(5, eta, c)?) / s);
    Ok((first + 2.0 * nm) / (s * s))
}

/// Mean GHZ3 count per star cluster.
pub fn star_cost(n: u32, m: u32, eta: f64, variant: Variant, encoded: bool, c: Constants) -> Result<f64> {
    if n < 3 {
        return Err(domain("n", "must be >= 3"));
    }
    if m < 2 {
        return Err(domain("m", "must be >= 2"));
    }
    let s = c.bs_success(eta);
    let x = if encoded { enc_cost(m, eta, c)? } else { ghz_cost(m + 2, eta, c)? };
    let inner = 6.0 * ghz_cost(n + 1, eta, c)? + 2.0 * ghz_cost(n + 2, eta, c)? + x;
    let mut star = inner / (s * s);
    if variant == Variant::Mtqc2 {
        let pf = c.p_f(eta, n);
        star /= (1.0 - pf) * (1.0 - pf);
    }
    Ok(star)
}

/// Mean GHZ3 count per logical gate at distance `d`.
pub fn gate_overhead(n: u32, m: u32, eta: f64, variant: Variant, encoded: bool, d: u32, c: Constants) -> Result<f64> {
    Ok(count_lattice_qubits_for_gate(d) * star_cost(n, m, eta, variant, encoded, c)?)
}

/// Inputs and results of a resource estimate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResourceEstimate {
    pub n: u32,
    pub m: u32,
    pub eta: f64,
    pub variant: Variant,
    #[serde(rename = "N_rep")]
    pub n_rep: u32,
    pub d: Option<u32>,
    pub constants: Constants,
    /// `(r, lossless, lossy)` for each GHZ size used.
    #[serde(rename = "N_table")]
    pub n_table: Vec<(u32, u64, f64)>,
    #[serde(rename = "N_enc")]
    pub n_enc: Option<f64>,
    #[serde(rename = "N_star")]
    pub n_star: f64,
    #[serde(rename = "N_gate")]
    pub n_gate: Option<f64>,
}

/// Full estimate; `n_rep > 1` selects the encoded central qubit.
pub fn estimate(
    n: u32,
    m: u32,
    eta: f64,
    variant: Variant,
    n_rep: u32,
    d: Option<u32>,
    c: Constants,
) -> Result<ResourceEstimate> {
    let encoded = n_rep > 1;
    let mut sizes = vec![n + 1, n + 2];
    if encoded {
        sizes.extend([m + 1, 5]);
    } else {
        sizes.push(m + 2);
    }
    sizes.retain(|&r| r >= 3);
    sizes.sort_unstable();
    sizes.dedup();
    let n_table = sizes
        .iter()
        .map(|&r| Ok((r, ghz_cost_lossless(r)?, ghz_cost(r, eta, c)?)))
        .collect::<Result<Vec<_>>>()?;
    let n_star = star_cost(n, m, eta, variant, encoded, c)?;
    Ok(ResourceEstimate {
        n,
        m,
        eta,
        variant,
        n_rep,
        d,
        constants: c,
        n_table,
        n_enc: if encoded { Some(enc_cost(m, eta, c)?) } else { None },
        n_star,
        n_gate: d.map(|d| count_lattice_qubits_for_gate(d) * n_star),
    })
}

/// Table of lossless and lossy GHZ costs in the layout
/// `GHZ_m | final fusion | lossless (lossy)`.
pub fn ghz_table(sizes: &[u32], eta: f64, c: Constants) -> Result<String> {
    let mut out = String::from("state     final fusion        N (lossy)\n");
    for &m in sizes {
        let plan = plan_ghz(m)?;
        let fusion = plan
            .final_fusion()
            .map(|f| format!("GHZ{} + GHZ{}", f.left, f.right))
            .unwrap_or_else(|| "-".into());
        out.push_str(&format!(
            "GHZ{:<6} {:<19} {} ({:.2})\n",
            m,
            fusion,
            ghz_cost_lossless(m)?,
            ghz_cost(m, eta, c)?
        ));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plan_examples() {
        let p = plan_ghz(3).unwrap();
        assert!(p.steps.is_empty());
        assert_eq!(p.leaves(), 1);
        let p = plan_ghz(10).unwrap();
        assert_eq!(p.depth(), 3);
        assert_eq!(p.steps[0], vec![Fusion { left: 3, right: 3 }; 4]);
        assert_eq!(p.steps[1], vec![Fusion { left: 4, right: 4 }; 2]);
        assert_eq!(p.steps[2], vec![Fusion { left: 6, right: 6 }]);
        assert_eq!(plan_ghz(9).unwrap().final_fusion(), Some(Fusion { left: 6, right: 5 }));
        assert_eq!(plan_ghz(7).unwrap().final_fusion(), Some(Fusion { left: 5, right: 4 }));
        assert_eq!(plan_ghz(11).unwrap().final_fusion(), Some(Fusion { left: 7, right: 6 }));
        assert!(plan_ghz(2).is_err());
    }

    #[test]
    fn plan_sizes_are_consistent() {
        for m in 3..200 {
            let p = plan_ghz(m).unwrap();
            assert_eq!(p.fold(3u32, |a, b| a + b - 2), m);
            assert_eq!(p.leaves(), (m - 2) as usize);
            let want = if m == 3 { 0 } else { (m as f64 - 2.0).log2().ceil() as usize };
            assert_eq!(p.depth(), want, "m={m}");
        }
    }

    #[test]
    fn lossless_values() {
        let want = [(4, 4), (5, 10), (6, 16), (7, 28), (8, 40), (9, 52), (10, 64), (11, 88), (18, 256)];
        for (m, n) in want {
            assert_eq!(ghz_cost_lossless(m).unwrap(), n);
            assert_eq!(ghz_cost_closed_form(m).unwrap(), n);
        }
    }

    #[test]
    fn lossy_values_both_constants() {
        let exact = ghz_cost(9, 0.01, Constants::Exact).unwrap();
        assert!((exact - 55.1476).abs() < 1e-4);
        assert_eq!(ghz_cost(9, 0.01, Constants::Rounded).unwrap(), 55.16);
        assert_eq!(ghz_cost(4, 0.01, Constants::Rounded).unwrap(), 4.08);
        assert_eq!(ghz_cost(18, 0.01, Constants::Rounded).unwrap(), 277.55);
    }

    #[test]
    fn enc_values() {
        assert!((enc_cost(2, 0.0, Constants::Exact).unwrap() - 96.0).abs() < 1e-12);
        assert!((enc_cost(2, 0.01, Constants::Rounded).unwrap() - 104.956).abs() < 1e-3);
        let mut prev = 0.0;
        for m in 2..12 {
            let v = enc_cost(m, 0.0, Constants::Exact).unwrap();
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn star_values() {
        let s1 = star_cost(8, 2, 0.01, Variant::Mtqc1, false, Constants::Rounded).unwrap();
        let s2 = star_cost(8, 2, 0.01, Variant::Mtqc2, false, Constants::Rounded).unwrap();
        assert_eq!(s1.round(), 1962.0);
        assert_eq!(s2.round(), 1980.0);
        assert_eq!(star_cost(8, 2, 0.0, Variant::Mtqc1, false, Constants::Exact).unwrap(), 1776.0);
    }

    #[test]
    fn gate_values() {
        let g = gate_overhead(8, 2, 0.01, Variant::Mtqc1, false, 15, Constants::Rounded).unwrap();
        assert!((g / 7.756e7 - 1.0).abs() < 1e-3);
        assert_eq!(gate_overhead(8, 2, 0.01, Variant::Mtqc1, false, 0, Constants::Rounded).unwrap(), 0.0);
        let a = gate_overhead(8, 2, 0.01, Variant::Mtqc2, true, 5, Constants::Exact).unwrap();
        let b = gate_overhead(8, 2, 0.01, Variant::Mtqc2, true, 10, Constants::Exact).unwrap();
        assert!((b / a - 8.0).abs() < 1e-12);
    }
}
