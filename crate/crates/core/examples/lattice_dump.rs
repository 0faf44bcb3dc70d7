//! Builds a lattice and prints its size summary, or the full dump with
//! `--full`.
//!
//! `cargo run --example lattice_dump -- 3 2 --full`

use mtqc::lattice::{build_lattice, Axis, LatticeConfig, QubitKind, Side};

fn main() -> mtqc::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let nums: Vec<u32> = args.iter().filter_map(|a| a.parse().ok()).collect();
    let d = nums.first().copied().unwrap_or(3);
    let cfg = match nums.get(1) {
        Some(&t) => LatticeConfig::with_t(d, t)?,
        None => LatticeConfig::new(d)?,
    };
    let lat = build_lattice(cfg)?;
    if args.iter().any(|a| a == "--full") {
        print!("{}", lat.dump());
        return Ok(());
    }
    println!("d={} T={} cells={:?}", cfg.d, cfg.t, cfg.cell_counts());
    for axis in Axis::ALL {
        let faces = lat.qubits().iter().filter(|q| q.kind == QubitKind::Face(axis)).count();
        let edges = lat.qubits().iter().filter(|q| q.kind == QubitKind::Edge(axis)).count();
        println!("  {axis:?}: {faces} faces, {edges} edges, boundary {:?}", lat.boundary_class(axis));
    }
    println!(
        "  noisy faces {}, left wall {}, right wall {}, cells {}",
        lat.noisy_faces().len(),
        lat.boundary_faces(Side::Left).len(),
        lat.boundary_faces(Side::Right).len(),
        lat.num_cells()
    );
    Ok(())
}
