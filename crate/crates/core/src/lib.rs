//! Simulation of a single Cooper-pair box (charge qubit) coupled to a
//! single-mode cavity whose field undergoes pure phase damping.
//!
//! The crate carries two independent routes to the joint qubit–field state:
//!
//! * [`closed_form`] evaluates the analytical dressed-state solution, both
//!   literally as published and in a corrected, trace-preserving form;
//! * [`lindblad`] integrates the phase-damping master equation directly and
//!   is the reference whenever the two disagree.
//!
//! [`metrics`] reduces joint states to scalar observables (inversion,
//! idempotency defect, concurrence, negativity) and [`sweep`] drives
//! parameter sweeps that write flat CSV.

pub mod closed_form;
pub mod density;
pub mod error;
pub mod lindblad;
pub mod metrics;
pub mod model;
pub mod sweep;

pub use density::{Basis, DensityMatrix, Qubit};
pub use error::{Error, Result};

/// Complex scalar used for every matrix in the crate.
pub type C64 = num_complex::Complex64;
