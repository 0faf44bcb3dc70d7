//! Oracles shared by the decoder tests and the acceptance run.
#![allow(dead_code)]

use std::collections::{BTreeMap, VecDeque};

use mtqc::decoder::{
    apply_removals, classify_logical_error, correction, extract_syndrome, merge_superchecks, mwpm_decode,
    odd_superchecks, Superchecks, TrialOutcome, Workspace,
};
use mtqc::lattice::{build_lattice, LatticeConfig, RhgLattice, NO_NODE};
use mtqc::noise::{removal_mechanisms, Mtqc2Removal, Variant};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn lattice(d: u32, t: u32) -> RhgLattice {
    build_lattice(LatticeConfig::with_t(d, t).unwrap()).unwrap()
}

pub fn face(lat: &RhgLattice, c: [i32; 3]) -> usize {
    let q = lat.qubit_at(c).unwrap();
    assert!(lat.qubits()[q].is_face());
    q
}

pub fn mask(lat: &RhgLattice, faces: &[[i32; 3]]) -> Vec<bool> {
    let mut m = vec![false; lat.num_qubits()];
    for &c in faces {
        m[face(lat, c)] ^= true;
    }
    m
}

/// Unit-weight distances between supercheck roots, built straight from
/// face endpoints.
pub fn root_distances(lat: &RhgLattice, sc: &Superchecks, removed: &[bool], src: u32) -> BTreeMap<u32, u32> {
    let mut adj: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    for (q, info) in lat.qubits().iter().enumerate() {
        if !info.is_face() || removed[q] {
            continue;
        }
        let [a, b] = lat.ends(q);
        if a == NO_NODE || b == NO_NODE {
            continue;
        }
        let (ra, rb) = (sc.root(a), sc.root(b));
        if ra != rb {
            adj.entry(ra).or_default().push(rb);
            adj.entry(rb).or_default().push(ra);
        }
    }
    let mut dist = BTreeMap::from([(src, 0u32)]);
    let mut queue = VecDeque::from([src]);
    while let Some(v) = queue.pop_front() {
        let dv = dist[&v];
        for &w in adj.get(&v).map(Vec::as_slice).unwrap_or(&[]) {
            dist.entry(w).or_insert_with(|| {
                queue.push_back(w);
                dv + 1
            });
        }
    }
    dist
}

/// Minimum total weight where every event either pairs with another or
/// goes to the boundary, by subset recursion.
pub fn brute_force_weight(pair: &[Vec<u32>], bnd: &[u32]) -> u64 {
    let k = bnd.len();
    let mut best = vec![u64::MAX; 1 << k];
    best[0] = 0;
    for s in 1usize..1 << k {
        let i = s.trailing_zeros() as usize;
        let rest = s & !(1 << i);
        let mut b = best[rest] + bnd[i] as u64;
        for j in i + 1..k {
            if rest & (1 << j) != 0 && pair[i][j] != u32::MAX {
                b = b.min(best[rest & !(1 << j)] + pair[i][j] as u64);
            }
        }
        best[s] = b;
    }
    best[(1 << k) - 1]
}

/// Decodes a fixed dephasing pattern on a lattice without removals.
pub fn decode(lat: &RhgLattice, errors: &[[i32; 3]]) -> (Vec<u32>, u64, Vec<bool>, TrialOutcome) {
    let removed = vec![false; lat.num_qubits()];
    let sc = merge_superchecks(lat, &removed).unwrap();
    let dephased = mask(lat, errors);
    let mut ws = Workspace::new(lat);
    let graph = extract_syndrome(lat, &sc, &removed, &dephased, &mut ws);
    let m = mwpm_decode(&graph);
    let corr = correction(lat, &sc, &removed, &graph, &m, &mut ws);
    let residual: Vec<bool> = dephased.iter().zip(&corr).map(|(a, b)| a ^ b).collect();
    let out = classify_logical_error(lat, &sc, &residual);
    (graph.events, m.weight, corr, out)
}

/// Compares the decoder against the oracles on `count` random instances
/// with 1 to 10 detection events. Returns how many had removals.
pub fn check_random_matchings(count: usize, seed: u64) -> Result<usize, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut done = 0;
    let mut with_removals = 0;
    while done < count {
        let d = [3, 5][done % 2];
        let t = rng.gen_range(1..=4);
        let lat = lattice(d, t);
        let p_f = [0.0, 0.02, 0.05][done % 3];
        let removed = apply_removals(&lat, &removal_mechanisms(p_f, Variant::Mtqc2, Mtqc2Removal::WholeQubit), &mut rng);
        let Ok(sc) = merge_superchecks(&lat, &removed) else { continue };
        let p_z = rng.gen_range(0.01..0.06);
        let mut dephased = vec![false; lat.num_qubits()];
        for &q in lat.noisy_faces() {
            if !removed[q as usize] && rng.gen_bool(p_z) {
                dephased[q as usize] = true;
            }
        }
        let events = odd_superchecks(&lat, &sc, &dephased);
        if events.is_empty() || events.len() > 10 {
            continue;
        }
        let mut ws = Workspace::new(&lat);
        let graph = extract_syndrome(&lat, &sc, &removed, &dephased, &mut ws);
        if graph.events != events {
            return Err(format!("instance {done}: event lists differ"));
        }
        let dists: Vec<_> = events.iter().map(|&e| root_distances(&lat, &sc, &removed, e)).collect();
        let (lr, rr) = (sc.left_root(), sc.right_root());
        let bnd: Vec<u32> = dists
            .iter()
            .map(|m| m.get(&lr).copied().unwrap_or(u32::MAX).min(m.get(&rr).copied().unwrap_or(u32::MAX)))
            .collect();
        let boundary_weights: Vec<u32> = graph.boundary.iter().map(|b| b.0).collect();
        if boundary_weights != bnd {
            return Err(format!("instance {done}: boundary weights {boundary_weights:?} vs {bnd:?}"));
        }
        let pair: Vec<Vec<u32>> =
            dists.iter().map(|m| events.iter().map(|e| m.get(e).copied().unwrap_or(u32::MAX)).collect()).collect();
        let m = mwpm_decode(&graph);
        let want = brute_force_weight(&pair, &bnd);
        if m.weight != want {
            return Err(format!("instance {done}: weight {} vs {want}", m.weight));
        }
        let mut seen = vec![0; events.len()];
        m.pairs.iter().flat_map(|&(a, b)| [a, b]).chain(m.to_boundary.iter().copied()).for_each(|i| seen[i] += 1);
        if seen.iter().any(|&s| s != 1) {
            return Err(format!("instance {done}: events not covered once"));
        }
        let corr = correction(&lat, &sc, &removed, &graph, &m, &mut ws);
        let residual: Vec<bool> = dephased.iter().zip(&corr).map(|(a, b)| a ^ b).collect();
        if !odd_superchecks(&lat, &sc, &residual).is_empty() {
            return Err(format!("instance {done}: correction leaves a syndrome"));
        }
        with_removals += usize::from(removed.iter().any(|&r| r));
        done += 1;
    }
    Ok(with_removals)
}

fn sorted(mut v: Vec<u32>) -> Vec<u32> {
    v.sort_unstable();
    v
}

fn cell(lat: &RhgLattice, c: [i32; 3]) -> u32 {
    lat.cell_at(c).unwrap() as u32
}

fn times(out: &TrialOutcome) -> Vec<u32> {
    out.erroneous_times.iter().copied().collect()
}

/// Named checks of detection events for fixed error patterns at d = 5.
pub fn syndrome_pattern_checks() -> Vec<(&'static str, bool)> {
    let lat = lattice(5, 3);
    let mut out = Vec::new();

    let (events, weight, corr, res) = decode(&lat, &[[3, 4, 2]]);
    out.push((
        "interior error lights its two cells",
        events == sorted(vec![cell(&lat, [2, 4, 2]), cell(&lat, [4, 4, 2])])
            && weight == 1
            && corr.iter().filter(|&&c| c).count() == 1
            && corr[face(&lat, [3, 4, 2])]
            && res.erroneous_times.is_empty(),
    ));

    let (events, weight, _, res) = decode(&lat, &[[-1, 2, 2]]);
    out.push((
        "boundary error lights one cell",
        events == vec![cell(&lat, [0, 2, 2])] && weight == 1 && res.erroneous_times.is_empty(),
    ));

    let (events, weight, _, res) = decode(&lat, &[[1, 4, 2], [2, 5, 2]]);
    out.push((
        "two errors on one cell cancel there",
        events == sorted(vec![cell(&lat, [0, 4, 2]), cell(&lat, [2, 6, 2])])
            && weight == 2
            && res.erroneous_times.is_empty(),
    ));

    let (events, ..) = decode(&lat, &[[2, 4, 1], [2, 4, 3]]);
    out.push((
        "time-like pair cancels on the shared cell",
        events == sorted(vec![cell(&lat, [2, 4, 0]), cell(&lat, [2, 4, 4])]),
    ));

    let c = [2, 4, 2];
    let six: Vec<[i32; 3]> = (0..3)
        .flat_map(|a| {
            [-1, 1].map(|s| {
                let mut f = c;
                f[a] += s;
                f
            })
        })
        .collect();
    let (events, weight, ..) = decode(&lat, &six);
    out.push((
        "all six faces of a cell light its six neighbours",
        !events.contains(&cell(&lat, c)) && events.len() == 6 && weight <= 6,
    ));

    let (events, ..) = decode(&lat, &[[1, 4, 2], [1, 4, 2]]);
    out.push(("a doubled error is no error", events.is_empty()));
    out
}

/// Named residual-chain classifications on a d = 3, T = 2 lattice.
pub fn homology_checks() -> Vec<(&'static str, bool)> {
    let lat = lattice(3, 2);
    let removed = vec![false; lat.num_qubits()];
    let sc = merge_superchecks(&lat, &removed).unwrap();
    let row = |t: i32| [[-1, 2, t], [1, 2, t], [3, 2, t]];
    let classify = |faces: &[[i32; 3]]| classify_logical_error(&lat, &sc, &mask(&lat, faces));
    let mut out = Vec::new();

    out.push(("straight crossing at time 1", times(&classify(&row(2))) == vec![1]));
    out.push((
        "chain returning to the left boundary",
        classify(&[[-1, 2, 0], [0, 3, 0], [-1, 4, 0]]).erroneous_times.is_empty(),
    ));
    out.push((
        "time-stepping crossing keeps its left time",
        times(&classify(&[[-1, 0, 0], [0, 0, 1], [1, 0, 2], [3, 0, 2]])) == vec![0],
    ));
    let mut both = row(0).to_vec();
    both.extend(row(2));
    out.push(("two crossings at two times", times(&classify(&both)) == vec![0, 1]));

    let (events, weight, corr, res) = decode(&lat, &row(0)[..2]);
    out.push((
        "two of three errors complete a crossing",
        events == vec![cell(&lat, [2, 2, 0])] && weight == 1 && corr[face(&lat, [3, 2, 0])] && times(&res) == vec![0],
    ));
    let (_, weight, _, res) = decode(&lat, &row(0)[1..2]);
    out.push(("one middle error is corrected", weight == 1 && res.erroneous_times.is_empty()));
    out
}
