//! Per-trial error processing on the primal lattice.
//!
//! A trial removes face qubits, merges cells that share a removed face into
//! superchecks (cells merged into an `x` boundary deform that boundary),
//! dephases surviving faces, extracts supercheck parities and decodes them
//! with exact minimum-weight perfect matching. Residual chains joining the
//! two `x` boundaries are logical errors, counted by the simulating time of
//! their end on the left boundary.
//!
//! Distances are counted in surviving faces crossed on the supercheck
//! graph; removed faces are free to cross since their two sides belong to
//! the same supercheck. Edge qubits take no part in primal decoding and are
//! never sampled.

pub mod blossom;

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;

use rand::Rng;

use crate::lattice::{RhgLattice, Side, NO_NODE};

/// Aborted trial: the deformed `x` boundaries touch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LogicalLoss;

/// Result of one trial.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TrialOutcome {
    pub logical_loss: bool,
    pub erroneous_times: BTreeSet<u32>,
}

/// Merged check structure. Every node (cell, left, right) maps to a root;
/// nodes sharing a root form one supercheck, and cells sharing a root with
/// a boundary node are part of that deformed boundary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Superchecks {
    root: Vec<u32>,
    left: u32,
    right: u32,
}

impl Superchecks {
    pub fn root(&self, node: u32) -> u32 {
        self.root[node as usize]
    }

    pub fn left_root(&self) -> u32 {
        self.root[self.left as usize]
    }

    pub fn right_root(&self) -> u32 {
        self.root[self.right as usize]
    }

    /// Boundary a root belongs to, if any.
    pub fn boundary_of(&self, root: u32) -> Option<Side> {
        if root == self.left_root() {
            Some(Side::Left)
        } else if root == self.right_root() {
            Some(Side::Right)
        } else {
            None
        }
    }

    /// Cells of each supercheck (boundary-merged cells excluded), keyed by
    /// root in ascending order.
    pub fn groups(&self) -> Vec<(u32, Vec<u32>)> {
        let ncell = self.left as usize;
        let mut by_root: std::collections::BTreeMap<u32, Vec<u32>> = Default::default();
        for c in 0..ncell {
            let r = self.root[c];
            if self.boundary_of(r).is_none() {
                by_root.entry(r).or_default().push(c as u32);
            }
        }
        by_root.into_iter().collect()
    }

    /// Qubit support of a supercheck: faces owned by an odd number of its
    /// cells.
    pub fn support(&self, lattice: &RhgLattice, root: u32) -> Vec<u32> {
        let mut count: std::collections::BTreeMap<u32, u32> = Default::default();
        for c in 0..lattice.num_cells() {
            if self.root[c] == root {
                for &q in lattice.incidence(c) {
                    *count.entry(q).or_default() += 1;
                }
            }
        }
        count.into_iter().filter(|&(_, k)| k % 2 == 1).map(|(q, _)| q).collect()
    }
}

/// Detection events plus their boundary and pairwise weights. Pairs whose
/// weight is not below the sum of their boundary weights are omitted: a
/// matching using them is never strictly better than sending both ends to
/// the boundary.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SyndromeGraph {
    /// Supercheck roots with odd parity, ascending.
    pub events: Vec<u32>,
    /// Distance to the nearest `x` boundary and which one.
    pub boundary: Vec<(u32, Side)>,
    /// `(i, j, w)` with `i < j` indexing `events`.
    pub edges: Vec<(usize, usize, u32)>,
}

/// Selected matching over event indices.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Matching {
    pub pairs: Vec<(usize, usize)>,
    pub to_boundary: Vec<usize>,
    pub weight: u64,
}

/// Noise applied in one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialNoise {
    /// Independent removal exposures per face.
    pub mechanisms: Vec<f64>,
    pub p_z: f64,
}

/// Per-trial masks and merged structure.
#[derive(Debug, Clone)]
pub struct ErrorState {
    pub removed: Vec<bool>,
    pub dephased: Vec<bool>,
    pub superchecks: Option<Superchecks>,
}

/// Marks each index of `items` independently with probability `p`, by
/// geometric skipping.
fn sample_bernoulli<R: Rng + ?Sized>(items: &[u32], p: f64, rng: &mut R, mut mark: impl FnMut(u32)) {
    if p <= 0.0 || items.is_empty() {
        return;
    }
    if p >= 1.0 {
        items.iter().for_each(|&q| mark(q));
        return;
    }
    let log_q = (-p).ln_1p();
    let mut i = 0usize;
    loop {
        let u: f64 = rng.gen();
        // u in [0, 1); 1-u in (0, 1]
        let skip = ((1.0 - u).ln() / log_q).floor();
        if !skip.is_finite() || skip >= (items.len() - i) as f64 {
            return;
        }
        i += skip as usize;
        mark(items[i]);
        i += 1;
        if i >= items.len() {
            return;
        }
    }
}

/// Removal mask: each noisy face is removed if any mechanism fires.
pub fn apply_removals<R: Rng + ?Sized>(lattice: &RhgLattice, mechanisms: &[f64], rng: &mut R) -> Vec<bool> {
    let mut removed = vec![false; lattice.num_qubits()];
    for &p in mechanisms {
        sample_bernoulli(lattice.noisy_faces(), p, rng, |q| removed[q as usize] = true);
    }
    removed
}

/// Dephasing mask over surviving noisy faces.
pub fn assign_dephasing<R: Rng + ?Sized>(lattice: &RhgLattice, removed: &[bool], p_z: f64, rng: &mut R) -> Vec<bool> {
    let mut dephased = vec![false; lattice.num_qubits()];
    sample_bernoulli(lattice.noisy_faces(), p_z, rng, |q| {
        if !removed[q as usize] {
            dephased[q as usize] = true;
        }
    });
    dephased
}

fn find(parent: &mut [u32], mut x: u32) -> u32 {
    while parent[x as usize] != x {
        let p = parent[x as usize];
        parent[x as usize] = parent[p as usize];
        x = p;
    }
    x
}

fn union(parent: &mut [u32], a: u32, b: u32) {
    let (ra, rb) = (find(parent, a), find(parent, b));
    if ra != rb {
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        parent[hi as usize] = lo;
    }
}

/// Merges cells across removed faces. Fails with [`LogicalLoss`] when the
/// two `x` boundaries end up in one component.
pub fn merge_superchecks(lattice: &RhgLattice, removed: &[bool]) -> Result<Superchecks, LogicalLoss> {
    let n = lattice.num_nodes();
    let mut parent: Vec<u32> = (0..n as u32).collect();
    for &q in lattice.noisy_faces() {
        if removed[q as usize] {
            let [a, b] = lattice.ends(q as usize);
            if a != NO_NODE && b != NO_NODE {
                union(&mut parent, a, b);
            }
        }
    }
    let root: Vec<u32> = (0..n as u32).map(|x| find(&mut parent, x)).collect();
    let (left, right) = (lattice.left(), lattice.right());
    if root[left as usize] == root[right as usize] {
        return Err(LogicalLoss);
    }
    Ok(Superchecks { root, left, right })
}

/// Scratch space for the 0-1 breadth-first searches.
#[derive(Debug, Clone)]
pub struct Workspace {
    dist: Vec<u32>,
    via: Vec<u32>,
    stamp: Vec<u32>,
    epoch: u32,
    deque: VecDeque<u32>,
}

impl Workspace {
    pub fn new(lattice: &RhgLattice) -> Self {
        let n = lattice.num_nodes();
        Workspace { dist: vec![0; n], via: vec![NO_NODE; n], stamp: vec![0; n], epoch: 0, deque: VecDeque::new() }
    }

    fn reset(&mut self) {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.epoch = 1;
        }
        self.deque.clear();
    }

    fn seen(&self, v: u32) -> bool {
        self.stamp[v as usize] == self.epoch
    }

    fn dist_of(&self, v: u32) -> u32 {
        if self.seen(v) {
            self.dist[v as usize]
        } else {
            u32::MAX
        }
    }
}

/// Visits the `(face, neighbour)` pairs of a node.
fn for_each_link(lattice: &RhgLattice, v: u32, mut f: impl FnMut(u32, u32)) {
    let ncell = lattice.num_cells() as u32;
    if v < ncell {
        for &(q, w) in lattice.neighbors(v as usize) {
            if q != NO_NODE && w != NO_NODE {
                f(q, w);
            }
        }
    } else {
        let side = if v == lattice.left() { Side::Left } else { Side::Right };
        for &q in lattice.boundary_faces(side) {
            let [a, b] = lattice.ends(q as usize);
            f(q, if a == v { b } else { a });
        }
    }
}

/// 0-1 BFS from `src` over the node graph. Stops when `stop` accepts a
/// popped node (returned) or when the frontier exceeds `radius`. Nodes
/// accepted by `barrier` are reached but not expanded.
fn bfs(
    lattice: &RhgLattice,
    removed: &[bool],
    ws: &mut Workspace,
    src: u32,
    radius: u32,
    barrier: impl Fn(u32) -> bool,
    mut stop: impl FnMut(u32, u32) -> bool,
) -> Option<u32> {
    ws.reset();
    let e = ws.epoch;
    ws.stamp[src as usize] = e;
    ws.dist[src as usize] = 0;
    ws.via[src as usize] = NO_NODE;
    ws.deque.push_back(src);
    while let Some(v) = ws.deque.pop_front() {
        let dv = ws.dist[v as usize];
        if dv > radius {
            break;
        }
        if stop(v, dv) {
            return Some(v);
        }
        if v != src && barrier(v) {
            continue;
        }
        for_each_link(lattice, v, |q, w| {
            let cost = u32::from(!removed[q as usize]);
            let nd = dv + cost;
            let wi = w as usize;
            if ws.stamp[wi] != e || nd < ws.dist[wi] {
                ws.stamp[wi] = e;
                ws.dist[wi] = nd;
                ws.via[wi] = q;
                if cost == 0 {
                    ws.deque.push_front(w);
                } else {
                    ws.deque.push_back(w);
                }
            }
        });
    }
    None
}

/// Faces of the shortest path ending at `end`, read from the last search,
/// skipping removed faces.
fn trace_path(lattice: &RhgLattice, removed: &[bool], ws: &Workspace, src: u32, end: u32, out: &mut Vec<u32>) {
    let mut v = end;
    while v != src {
        let q = ws.via[v as usize];
        debug_assert!(q != NO_NODE);
        if !removed[q as usize] {
            out.push(q);
        }
        let [a, b] = lattice.ends(q as usize);
        v = if a == v { b } else { a };
    }
}

/// Parity of each supercheck under `flips`; returns odd non-boundary roots.
pub fn odd_superchecks(lattice: &RhgLattice, sc: &Superchecks, flips: &[bool]) -> Vec<u32> {
    let mut parity = vec![false; lattice.num_nodes()];
    for &q in lattice.noisy_faces() {
        if flips[q as usize] {
            let [a, b] = lattice.ends(q as usize);
            let (ra, rb) = (sc.root(a), sc.root(b));
            if ra != rb {
                parity[ra as usize] ^= true;
                parity[rb as usize] ^= true;
            }
        }
    }
    (0..lattice.num_nodes() as u32)
        .filter(|&r| parity[r as usize] && sc.boundary_of(r).is_none())
        .collect()
}

/// Detection events with boundary and (pruned) pairwise weights.
pub fn extract_syndrome(
    lattice: &RhgLattice,
    sc: &Superchecks,
    removed: &[bool],
    dephased: &[bool],
    ws: &mut Workspace,
) -> SyndromeGraph {
    let events = odd_superchecks(lattice, sc, dephased);
    if events.is_empty() {
        return SyndromeGraph::default();
    }
    let n = lattice.num_nodes();
    let mut to_left = vec![u32::MAX; n];
    let mut to_right = vec![u32::MAX; n];
    for (src, out) in [(lattice.left(), &mut to_left), (lattice.right(), &mut to_right)] {
        bfs(lattice, removed, ws, src, u32::MAX, |_| false, |_, _| false);
        for v in 0..n as u32 {
            out[v as usize] = ws.dist_of(v);
        }
    }
    let boundary: Vec<(u32, Side)> = events
        .iter()
        .map(|&r| {
            let (l, rr) = (to_left[r as usize], to_right[r as usize]);
            if l <= rr {
                (l, Side::Left)
            } else {
                (rr, Side::Right)
            }
        })
        .collect();
    let mut slot = vec![usize::MAX; n];
    for (i, &r) in events.iter().enumerate() {
        slot[r as usize] = i;
    }
    // A kept pair has w < b(u) + b(v) <= 2 max(b(u), b(v)), so it is found
    // from the endpoint with the larger (b, index) within radius 2b - 1.
    let key = |i: usize| (boundary[i].0, i);
    // a path through a boundary is never shorter than both boundary legs
    let on_boundary = |v: u32| sc.boundary_of(sc.root(v)).is_some();
    let mut edges = Vec::new();
    let mut found = Vec::new();
    for (i, &r) in events.iter().enumerate() {
        let bi = boundary[i].0;
        found.clear();
        bfs(lattice, removed, ws, r, (2 * bi).saturating_sub(1), on_boundary, |v, dv| {
            let j = slot[sc.root(v) as usize];
            if j != usize::MAX && j != i && key(j) < key(i) {
                found.push((j, dv));
            }
            false
        });
        found.sort_unstable();
        found.dedup_by_key(|f| f.0);
        for &(j, w) in &found {
            if w < bi + boundary[j].0 {
                edges.push((i.min(j), i.max(j), w));
            }
        }
    }
    edges.sort_unstable();
    SyndromeGraph { events, boundary, edges }
}

/// Exact minimum-weight matching where each event pairs with another event
/// or with its nearest boundary.
///
/// Sending every event to the boundary costs `sum b`; pairing `u, v`
/// instead saves `b(u) + b(v) - w(u, v)`. The optimum is therefore a
/// maximum-weight matching on the kept pair edges with those savings as
/// weights, solved per connected component.
pub fn mwpm_decode(graph: &SyndromeGraph) -> Matching {
    let k = graph.events.len();
    let mut out = Matching::default();
    if k == 0 {
        return out;
    }
    let mut parent: Vec<u32> = (0..k as u32).collect();
    for &(i, j, _) in &graph.edges {
        union(&mut parent, i as u32, j as u32);
    }
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); k];
    for i in 0..k {
        let r = find(&mut parent, i as u32) as usize;
        members[r].push(i);
    }
    let mut comp_edges: Vec<Vec<(usize, usize, u32)>> = vec![Vec::new(); k];
    for &(i, j, w) in &graph.edges {
        let r = find(&mut parent, i as u32) as usize;
        comp_edges[r].push((i, j, w));
    }
    let mut paired = vec![false; k];
    let mut local = vec![usize::MAX; k];
    for r in 0..k {
        let nodes = &members[r];
        if nodes.len() < 2 {
            continue;
        }
        for (li, &g) in nodes.iter().enumerate() {
            local[g] = li;
        }
        let edges: Vec<(usize, usize, i64)> = comp_edges[r]
            .iter()
            .map(|&(i, j, w)| {
                let gain = graph.boundary[i].0 as i64 + graph.boundary[j].0 as i64 - w as i64;
                (local[i], local[j], gain)
            })
            .collect();
        let mate = blossom::max_weight_matching(nodes.len(), &edges, false);
        for (e, &(i, j, w)) in comp_edges[r].iter().enumerate() {
            let (a, b) = (edges[e].0, edges[e].1);
            if mate[a] == Some(b) && !paired[i] {
                paired[i] = true;
                paired[j] = true;
                out.pairs.push((i, j));
                out.weight += w as u64;
            }
        }
    }
    for i in 0..k {
        if !paired[i] {
            out.to_boundary.push(i);
            out.weight += graph.boundary[i].0 as u64;
        }
    }
    out.pairs.sort_unstable();
    out
}

/// Correction mask: surviving faces along a shortest path for each matched
/// pair and from each boundary-matched event to its nearest boundary.
pub fn correction(
    lattice: &RhgLattice,
    sc: &Superchecks,
    removed: &[bool],
    graph: &SyndromeGraph,
    matching: &Matching,
    ws: &mut Workspace,
) -> Vec<bool> {
    let on_boundary = |v: u32| sc.boundary_of(sc.root(v)).is_some();
    let mut corr = vec![false; lattice.num_qubits()];
    let mut path = Vec::new();
    for &(i, j) in &matching.pairs {
        let (src, dst) = (graph.events[i], graph.events[j]);
        let end = bfs(lattice, removed, ws, src, u32::MAX, on_boundary, |v, _| sc.root(v) == dst).expect("pair is connected");
        path.clear();
        trace_path(lattice, removed, ws, src, end, &mut path);
        path.iter().for_each(|&q| corr[q as usize] ^= true);
    }
    for &i in &matching.to_boundary {
        let src = graph.events[i];
        let end =
            bfs(lattice, removed, ws, src, u32::MAX, |_| false, |v, _| sc.boundary_of(sc.root(v)).is_some()).expect("boundary reachable");
        path.clear();
        trace_path(lattice, removed, ws, src, end, &mut path);
        path.iter().for_each(|&q| corr[q as usize] ^= true);
    }
    corr
}

/// Finds residual chains joining the two boundaries. `residual` must have
/// trivial syndrome on every supercheck.
///
/// The residual is split into chains by walking from each boundary
/// terminal along unused faces until another terminal is reached, taking
/// the lowest-indexed unused face at every supercheck and stopping at the
/// first terminal available. Each chain from the left to the right boundary
/// records the time of its left end.
pub fn classify_logical_error(lattice: &RhgLattice, sc: &Superchecks, residual: &[bool]) -> TrialOutcome {
    let mut out = TrialOutcome::default();
    // (root, face, side) of each boundary terminal, in face order
    let mut terms: Vec<(u32, u32, Side)> = Vec::new();
    // (root a, root b, face) of each interior residual face
    let mut inner: Vec<(u32, u32, u32)> = Vec::new();
    for &q in lattice.noisy_faces() {
        if !residual[q as usize] {
            continue;
        }
        let [a, b] = lattice.ends(q as usize);
        let (ra, rb) = (sc.root(a), sc.root(b));
        if ra == rb {
            continue;
        }
        match (sc.boundary_of(ra), sc.boundary_of(rb)) {
            (None, None) => inner.push((ra, rb, q)),
            (Some(side), None) => terms.push((rb, q, side)),
            (None, Some(side)) => terms.push((ra, q, side)),
            (Some(_), Some(_)) => {
                // a single face joining the two deformed boundaries
                out.erroneous_times.insert(lattice.time_index(q as usize));
            }
        }
    }
    if terms.is_empty() {
        return out;
    }
    // incident items per root: terminals first, then interior faces
    let mut nodes: Vec<u32> = terms.iter().map(|t| t.0).chain(inner.iter().flat_map(|e| [e.0, e.1])).collect();
    nodes.sort_unstable();
    nodes.dedup();
    let slot = |r: u32| nodes.binary_search(&r).unwrap();
    let mut incident: Vec<Vec<(bool, usize)>> = vec![Vec::new(); nodes.len()];
    for (i, t) in terms.iter().enumerate() {
        incident[slot(t.0)].push((true, i));
    }
    for (i, e) in inner.iter().enumerate() {
        incident[slot(e.0)].push((false, i));
        incident[slot(e.1)].push((false, i));
    }
    let mut term_used = vec![false; terms.len()];
    let mut inner_used = vec![false; inner.len()];
    let mut cursor = vec![0usize; nodes.len()];
    for start in 0..terms.len() {
        if term_used[start] {
            continue;
        }
        term_used[start] = true;
        let mut v = terms[start].0;
        let end = loop {
            let s = slot(v);
            let inc = &incident[s];
            if let Some(&(_, t)) = inc.iter().find(|&&(is_t, i)| is_t && !term_used[i]) {
                term_used[t] = true;
                break t;
            }
            while cursor[s] < inc.len() && (inc[cursor[s]].0 || inner_used[inc[cursor[s]].1]) {
                cursor[s] += 1;
            }
            let (_, e) = inc[cursor[s]];
            inner_used[e] = true;
            let (a, b, _) = inner[e];
            v = if a == v { b } else { a };
        };
        let (sa, sb) = (terms[start].2, terms[end].2);
        if sa != sb {
            let left = if sa == Side::Left { start } else { end };
            out.erroneous_times.insert(lattice.time_index(terms[left].1 as usize));
        }
    }
    out
}

/// Runs one full trial. When `trace` is given, a line-oriented record of
/// the trial is appended to it.
pub fn run_trial<R: Rng + ?Sized>(
    lattice: &RhgLattice,
    noise: &TrialNoise,
    rng: &mut R,
    ws: &mut Workspace,
    mut trace: Option<&mut String>,
) -> TrialOutcome {
    let removed = apply_removals(lattice, &noise.mechanisms, rng);
    let sc = match merge_superchecks(lattice, &removed) {
        Ok(sc) => sc,
        Err(LogicalLoss) => {
            if let Some(t) = trace.as_deref_mut() {
                trace_mask(t, "removed", &removed);
                let _ = writeln!(t, "logical-loss");
            }
            return TrialOutcome { logical_loss: true, erroneous_times: BTreeSet::new() };
        }
    };
    let dephased = assign_dephasing(lattice, &removed, noise.p_z, rng);
    let graph = extract_syndrome(lattice, &sc, &removed, &dephased, ws);
    let matching = mwpm_decode(&graph);
    let corr = correction(lattice, &sc, &removed, &graph, &matching, ws);
    let residual: Vec<bool> = dephased.iter().zip(&corr).map(|(a, b)| a ^ b).collect();
    debug_assert!(odd_superchecks(lattice, &sc, &residual).is_empty());
    let outcome = classify_logical_error(lattice, &sc, &residual);
    if let Some(t) = trace {
        trace_mask(t, "removed", &removed);
        trace_mask(t, "dephased", &dephased);
        for (i, e) in graph.events.iter().enumerate() {
            let (b, side) = graph.boundary[i];
            let _ = writeln!(t, "event {i} root={e} boundary={side:?}:{b}");
        }
        for &(i, j) in &matching.pairs {
            let _ = writeln!(t, "pair {i} {j}");
        }
        for &i in &matching.to_boundary {
            let _ = writeln!(t, "boundary {i}");
        }
        let _ = writeln!(t, "weight {}", matching.weight);
        trace_mask(t, "correction", &corr);
        for tm in &outcome.erroneous_times {
            let _ = writeln!(t, "erroneous {tm}");
        }
    }
    outcome
}

fn trace_mask(out: &mut String, name: &str, mask: &[bool]) {
    let idx: Vec<String> = mask.iter().enumerate().filter(|(_, &m)| m).map(|(i, _)| i.to_string()).collect();
    let _ = writeln!(out, "{name} {}", idx.join(" "));
}

impl ErrorState {
    /// Samples removals and dephasing and merges superchecks.
    pub fn sample<R: Rng + ?Sized>(lattice: &RhgLattice, noise: &TrialNoise, rng: &mut R) -> Self {
        let removed = apply_removals(lattice, &noise.mechanisms, rng);
        let superchecks = merge_superchecks(lattice, &removed).ok();
        let dephased = match superchecks {
            Some(_) => assign_dephasing(lattice, &removed, noise.p_z, rng),
            None => vec![false; lattice.num_qubits()],
        };
        ErrorState { removed, dephased, superchecks }
    }
}
