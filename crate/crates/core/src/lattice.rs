//! RHG cuboid geometry.
//!
//! Coordinates are doubled so that every site is integral. Primal cells
//! sit at all-even `(x, y, t)`, faces have exactly one odd coordinate (the
//! normal axis) and edges have exactly two odd coordinates (the even one is
//! the edge direction). Vertices (all odd) carry no qubit.
//!
//! The box spans `d-1` cell widths in `x` and `y` and `T` in `t`. Cells
//! cover `x in {0, 2, .., 2d-4}`, `y in {0, 2, .., 2d-2}` and
//! `t in {0, 2, .., 2T-2}`, and a qubit exists when its centre lies in the
//! closed box `x in [-1, 2d-3]`, `y in [0, 2d-2]`, `t in [-1, 2T-1]`:
//!
//! * `x = -1` and `x = 2d-3` are primal (smooth) boundaries. Their faces
//!   touch one cell and the left or right boundary node.
//! * `t = -1` and `t = 2T-1` are primal boundaries whose qubits are tagged
//!   perfect.
//! * The `y` boundaries are dual: the box cuts the outermost cells through
//!   their centres, so those cells keep five faces. There are `d` rows of
//!   checks along `y`, two of them halved.
//!
//! Qubits and cells are indexed in `t`-major, then `y`, then `x` order.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Placeholder for a missing neighbour or endpoint.
pub const NO_NODE: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Axis {
    X,
    Y,
    T,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::T];

    fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum QubitKind {
    /// Face with the given normal.
    Face(Axis),
    /// Edge along the given direction.
    Edge(Axis),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BoundaryClass {
    Primal,
    Dual,
}

/// Which `x` boundary a node or face belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeConfig {
    pub d: u32,
    pub t: u32,
}

impl LatticeConfig {
    /// Distance `d` with the default time extent `4d + 1`.
    pub fn new(d: u32) -> Result<Self> {
        Self::with_t(d, 4 * d + 1)
    }

    pub fn with_t(d: u32, t: u32) -> Result<Self> {
        let cfg = LatticeConfig { d, t };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d < 3 {
            return Err(Error::Config(format!("code distance must be >= 3, got {}", self.d)));
        }
        if self.d % 2 == 0 {
            return Err(Error::Config(format!("code distance must be odd, got {}", self.d)));
        }
        if self.t < 1 {
            return Err(Error::Config("time extent T must be >= 1".into()));
        }
        Ok(())
    }

    /// Size of the cuboid in cell widths, `(d-1, d-1, T)`.
    pub fn cell_extents(&self) -> (u32, u32, u32) {
        (self.d - 1, self.d - 1, self.t)
    }

    /// Number of checks along each axis, `(d-1, d, T)`; the first and last
    /// `y` rows are half cells.
    pub fn cell_counts(&self) -> (u32, u32, u32) {
        (self.d - 1, self.d, self.t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Qubit {
    pub coord: [i32; 3],
    pub kind: QubitKind,
    /// On a `t` boundary: never removed, never dephased.
    pub perfect: bool,
}

impl Qubit {
    pub fn is_face(&self) -> bool {
        matches!(self.kind, QubitKind::Face(_))
    }
}

/// Immutable lattice. Node ids used by the decoder are cell indices plus
/// [`RhgLattice::left`] and [`RhgLattice::right`].
#[derive(Debug, Clone)]
pub struct RhgLattice {
    cfg: LatticeConfig,
    qubits: Vec<Qubit>,
    cells: Vec<[i32; 3]>,
    incidence: Vec<Vec<u32>>,
    ends: Vec<[u32; 2]>,
    neighbors: Vec<[(u32, u32); 6]>,
    boundary_faces: [Vec<u32>; 2],
    noisy: Vec<u32>,
    site: Vec<u32>,
    lo: [i32; 3],
    dims: [usize; 3],
}

impl RhgLattice {
    pub fn new(cfg: LatticeConfig) -> Result<Self> {
        build_lattice(cfg)
    }

    pub fn config(&self) -> LatticeConfig {
        self.cfg
    }

    pub fn qubits(&self) -> &[Qubit] {
        &self.qubits
    }

    pub fn num_qubits(&self) -> usize {
        self.qubits.len()
    }

    pub fn cell_coords(&self) -> &[[i32; 3]] {
        &self.cells
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    /// Face qubits of a cell.
    pub fn incidence(&self, cell: usize) -> &[u32] {
        &self.incidence[cell]
    }

    /// Cells containing a qubit (empty for edges).
    pub fn cells_of(&self, q: usize) -> impl Iterator<Item = u32> + '_ {
        let n = self.cells.len() as u32;
        self.ends[q].into_iter().filter(move |&c| c < n)
    }

    /// Both endpoints of a face in the node graph: cells, `left`, `right`
    /// or [`NO_NODE`].
    pub fn ends(&self, q: usize) -> [u32; 2] {
        self.ends[q]
    }

    pub fn left(&self) -> u32 {
        self.cells.len() as u32
    }

    pub fn right(&self) -> u32 {
        self.cells.len() as u32 + 1
    }

    /// Cells plus the two boundary nodes.
    pub fn num_nodes(&self) -> usize {
        self.cells.len() + 2
    }

    /// `(face, neighbour node)` across each of the six faces of a cell, in
    /// `-x, +x, -y, +y, -t, +t` order. Missing or inert faces give
    /// `(NO_NODE, NO_NODE)` or a face with `NO_NODE` neighbour.
    pub fn neighbors(&self, cell: usize) -> &[(u32, u32); 6] {
        &self.neighbors[cell]
    }

    /// Faces on one `x` boundary.
    pub fn boundary_faces(&self, side: Side) -> &[u32] {
        &self.boundary_faces[side as usize]
    }

    /// Face qubits that can be removed or dephased (every face off the `t`
    /// walls), in index order.
    pub fn noisy_faces(&self) -> &[u32] {
        &self.noisy
    }

    pub fn boundary_class(&self, axis: Axis) -> BoundaryClass {
        match axis {
            Axis::X | Axis::T => BoundaryClass::Primal,
            Axis::Y => BoundaryClass::Dual,
        }
    }

    /// Index of the qubit at a doubled coordinate.
    pub fn qubit_at(&self, coord: [i32; 3]) -> Option<usize> {
        self.site_slot(coord).map(|s| self.site[s]).filter(|&v| v != NO_NODE).map(|v| v as usize)
    }

    /// Index of the cell at a doubled coordinate.
    pub fn cell_at(&self, coord: [i32; 3]) -> Option<usize> {
        let [x, y, t] = coord;
        let (nx, ny, nt) = self.cfg.cell_counts();
        if x < 0 || y < 0 || t < 0 || x % 2 != 0 || y % 2 != 0 || t % 2 != 0 {
            return None;
        }
        let (i, j, k) = ((x / 2) as u32, (y / 2) as u32, (t / 2) as u32);
        (i < nx && j < ny && k < nt).then(|| (i + nx * (j + ny * k)) as usize)
    }

    /// Simulating-time index of a face off the `t` walls.
    pub fn time_index(&self, q: usize) -> u32 {
        (self.qubits[q].coord[2].max(0) / 2) as u32
    }

    fn site_slot(&self, c: [i32; 3]) -> Option<usize> {
        let mut idx = 0usize;
        for a in (0..3).rev() {
            let off = c[a] - self.lo[a];
            if off < 0 || off as usize >= self.dims[a] {
                return None;
            }
            idx = idx * self.dims[a] + off as usize;
        }
        Some(idx)
    }

    /// Line-oriented text dump in index order.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# rhg d={} T={} qubits={} cells={}", self.cfg.d, self.cfg.t, self.qubits.len(), self.cells.len());
        for (i, q) in self.qubits.iter().enumerate() {
            let kind = match q.kind {
                QubitKind::Face(a) => format!("face-{a:?}"),
                QubitKind::Edge(a) => format!("edge-{a:?}"),
            };
            let cells: Vec<String> = self.ends[i]
                .iter()
                .filter(|&&e| e != NO_NODE)
                .map(|&e| match e {
                    e if e == self.left() => "L".to_string(),
                    e if e == self.right() => "R".to_string(),
                    e => e.to_string(),
                })
                .collect();
            let _ = writeln!(
                out,
                "qubit {i} {kind} {} {} {} cells={}{}",
                q.coord[0],
                q.coord[1],
                q.coord[2],
                cells.join(","),
                if q.perfect { " perfect" } else { "" }
            );
        }
        for (i, c) in self.cells.iter().enumerate() {
            let faces: Vec<String> = self.incidence[i].iter().map(u32::to_string).collect();
            let _ = writeln!(out, "cell {i} {} {} {} faces={}", c[0], c[1], c[2], faces.join(","));
        }
        out
    }
}

/// Builds the lattice for a validated configuration.
pub fn build_lattice(cfg: LatticeConfig) -> Result<RhgLattice> {
    cfg.validate()?;
    let d = cfg.d as i32;
    let tt = cfg.t as i32;
    let lo = [-1, 0, -1];
    let hi = [2 * d - 3, 2 * d - 2, 2 * tt - 1];
    let dims = [0, 1, 2].map(|a| (hi[a] - lo[a] + 1) as usize);
    let mut site = vec![NO_NODE; dims[0] * dims[1] * dims[2]];

    let (nx, ny, nt) = cfg.cell_counts();
    let ncell = (nx * ny * nt) as usize;
    let mut cells = Vec::with_capacity(ncell);
    let mut qubits = Vec::new();

    for t in lo[2]..=hi[2] {
        for y in lo[1]..=hi[1] {
            for x in lo[0]..=hi[0] {
                let c = [x, y, t];
                let odd: Vec<usize> = (0..3).filter(|&a| c[a].rem_euclid(2) == 1).collect();
                let kind = match odd.as_slice() {
                    [] => {
                        cells.push(c);
                        continue;
                    }
                    [a] => QubitKind::Face(Axis::ALL[*a]),
                    [a, b] => QubitKind::Edge(Axis::ALL[3 - a - b]),
                    _ => continue,
                };
                let slot = (((t - lo[2]) as usize * dims[1]) + (y - lo[1]) as usize) * dims[0] + (x - lo[0]) as usize;
                site[slot] = qubits.len() as u32;
                qubits.push(Qubit { coord: c, kind, perfect: t == lo[2] || t == hi[2] });
            }
        }
    }
    debug_assert_eq!(cells.len(), ncell);

    let mut lat = RhgLattice {
        cfg,
        qubits,
        cells,
        incidence: vec![Vec::with_capacity(6); ncell],
        ends: Vec::new(),
        neighbors: vec![[(NO_NODE, NO_NODE); 6]; ncell],
        boundary_faces: [Vec::new(), Vec::new()],
        noisy: Vec::new(),
        site,
        lo,
        dims,
    };
    let (left, right) = (lat.left(), lat.right());
    let mut ends = vec![[NO_NODE; 2]; lat.qubits.len()];
    for (qi, q) in lat.qubits.iter().enumerate() {
        let QubitKind::Face(axis) = q.kind else { continue };
        let a = axis.index();
        let mut e = [NO_NODE; 2];
        for (k, delta) in [-1, 1].into_iter().enumerate() {
            let mut c = q.coord;
            c[a] += delta;
            e[k] = match lat.cell_at(c) {
                Some(cell) => cell as u32,
                None if axis == Axis::X && c[0] < 0 => left,
                None if axis == Axis::X => right,
                None => NO_NODE,
            };
        }
        ends[qi] = e;
        if !q.perfect {
            lat.noisy.push(qi as u32);
        }
        if e.contains(&left) {
            lat.boundary_faces[Side::Left as usize].push(qi as u32);
        }
        if e.contains(&right) {
            lat.boundary_faces[Side::Right as usize].push(qi as u32);
        }
    }
    for ci in 0..ncell {
        let c = lat.cells[ci];
        for (slot, (a, delta)) in [(0, -1), (0, 1), (1, -1), (1, 1), (2, -1), (2, 1)].into_iter().enumerate() {
            let mut f = c;
            f[a] += delta;
            let Some(q) = lat.qubit_at(f) else { continue };
            lat.incidence[ci].push(q as u32);
            let [e0, e1] = ends[q];
            let other = if e0 == ci as u32 { e1 } else { e0 };
            lat.neighbors[ci][slot] = (q as u32, other);
        }
    }
    lat.ends = ends;
    Ok(lat)
}

/// Qubits in a lattice of `6 l^3` sites with `l = 5d/4`, i.e. `375 d^3 / 32`.
pub fn count_lattice_qubits_for_gate(d: u32) -> f64 {
    let num = 375u128 * (d as u128).pow(3);
    num as f64 / 32.0
}
