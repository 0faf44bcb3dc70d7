//! Simulation and resource accounting for topological photonic quantum
//! computing with multiphoton qubits.
//!
//! The crate is organised by concern:
//!
//! * [`lattice`]: RHG cuboid geometry, cells, qubits and incidence.
//! * [`noise`]: loss, dephasing, BSM failure and threshold conversions.
//! * [`decoder`]: per-trial removal, supercheck merging, syndrome
//!   extraction, exact minimum-weight perfect matching and logical
//!   error classification.
//! * [`montecarlo`]: reproducible parallel sampling, threshold crossings and
//!   distance extrapolation.
//! * [`optics`]: label-level verification of the multiphoton Bell
//!   measurement.
//! * [`resources`]: GHZ fusion plans, GHZ3 consumption, star cluster and
//!   per-gate overheads, photon-pair operation counts.
//! * [`cli`]: the `mtqc` command line front end.

pub mod cli;
pub mod decoder;
pub mod error;
pub mod lattice;
pub mod montecarlo;
pub mod noise;
pub mod optics;
pub mod resources;

pub use error::{Error, Result};
