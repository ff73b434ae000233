//! Multivariate polynomial maps, query curves, interpolation and robust
//! (Berlekamp-Welch) decoding.

mod curve;
mod multi;
pub mod univariate;

pub use curve::{berlekamp_welch, interpolate, Curve};
pub use multi::{monomials, MultiPoly, Term};
