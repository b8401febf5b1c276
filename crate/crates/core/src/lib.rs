//! Exponential sums over even self-dual lattices, the root geometry of the
//! Lorentzian lattice `Leech + II(1,1)`, and two independent evaluators of
//! the Poincare series built from its positive roots.

pub mod analytic;
pub mod arith;
pub mod error;
pub mod geometry;
pub mod lattice;
pub mod report;
pub mod sums;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;
