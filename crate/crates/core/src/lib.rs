//! Locality-based coded computation over prime fields.
//!
//! A master evaluates a polynomial map `f` at `k` input points using `w`
//! workers, any `s` of which may straggle and any `b` of which may return
//! corrupted values. The planners in [`schemes`] exploit structure in the
//! specific input points (linear dependencies, low-degree curves, crossing
//! lines) to use fewer workers than input-oblivious coding allows. The
//! [`simulator`] replays every admissible failure pattern against a plan, and
//! [`locality`] computes the worker threshold of tiny function classes by
//! brute force.

pub mod cli;
pub mod error;
pub mod field;
pub mod linalg;
pub mod locality;
pub mod matmul;
pub mod poly;
pub mod scenario;
pub mod schemes;
pub mod simulator;
pub mod structure;

pub use error::{Error, Result};
pub use field::{FieldElem, PrimeField};

/// A point of `F^m`.
pub type Point = Vec<field::FieldElem>;
