use crate::error::{domain, Result};

use super::{plan_ghz, Node};

/// Fusion tree over states with known photon-pair operation (PPO) counts.
///
/// A fusion of inputs costing `l1` and `l2` that succeeds with probability
/// `p` costs `(l1 + l2 + 1) / p` on average.
#[derive(Debug, Clone, PartialEq)]
pub enum PpoTree {
    Leaf(f64),
    Fuse { a: Box<PpoTree>, b: Box<PpoTree>, p: f64 },
}

impl PpoTree {
    pub fn fuse(a: PpoTree, b: PpoTree, p: f64) -> PpoTree {
        PpoTree::Fuse { a: Box::new(a), b: Box::new(b), p }
    }
}

pub fn ppo_cost(tree: &PpoTree) -> Result<f64> {
    match tree {
        PpoTree::Leaf(l) => {
            if !(l.is_finite() && *l >= 0.0) {
                return Err(domain("tree", format!("leaf cost {l} is not a finite non-negative number")));
            }
            Ok(*l)
        }
        PpoTree::Fuse { a, b, p } => {
            if !(*p > 0.0 && *p <= 1.0) {
                return Err(domain("tree", format!("fusion success {p} not in (0, 1]")));
            }
            Ok((ppo_cost(a)? + ppo_cost(b)? + 1.0) / p)
        }
    }
}

/// `GHZ_m` from GHZ3 leaves with fusions at `p = 1/2`.
pub fn ghz_ppo_tree(m: u32) -> Result<PpoTree> {
    let plan = plan_ghz(m)?;
    let mut built: Vec<PpoTree> = Vec::with_capacity(plan.nodes.len());
    for node in &plan.nodes {
        let t = match *node {
            Node::Leaf => PpoTree::Leaf(0.0),
            Node::Fuse(a, b) => PpoTree::fuse(built[a].clone(), built[b].clone(), 0.5),
        };
        built.push(t);
    }
    Ok(built.swap_remove(plan.root))
}

fn three_ghz(outer: u32, middle: u32) -> Result<PpoTree> {
    let left = ghz_ppo_tree(outer)?;
    let mid = ghz_ppo_tree(middle)?;
    Ok(PpoTree::fuse(PpoTree::fuse(left.clone(), mid, 0.5), left, 0.5))
}

/// `C3'_{n,m,n}` from `GHZ_{n+1}`, `GHZ_{m+2}`, `GHZ_{n+1}`.
pub fn c3_prime_ppo_tree(n: u32, m: u32) -> Result<PpoTree> {
    three_ghz(n + 1, m + 2)
}

/// `C3_{n,n,n}` from `GHZ_{n+1}`, `GHZ_{n+2}`, `GHZ_{n+1}`.
pub fn c3_ppo_tree(n: u32) -> Result<PpoTree> {
    three_ghz(n + 1, n + 2)
}

/// Chain of `stages` fusions at success `p`, each adding one fresh
/// zero-cost input.
pub fn tm_chain(stages: u32, p: f64) -> PpoTree {
    let mut t = PpoTree::Leaf(0.0);
    for _ in 0..stages {
        t = PpoTree::fuse(t, PpoTree::Leaf(0.0), p);
    }
    t
}
