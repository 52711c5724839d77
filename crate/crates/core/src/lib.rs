//! Symbolic tensor calculus for quadratic first integrals of natural
//! Hamiltonians and their Laplace-Beltrami quantizations.

pub mod expr;
pub mod geometry;
pub mod integrability;
pub mod operators;
mod verdict;

pub use expr::{parse, Expr, Parser, ZeroTest, ZeroVerdict};
pub use geometry::{Chart, GeometryError, SymTensor, Symmetry, Variance};
pub use verdict::{Failure, Verdict};
pub mod corrections;

/// Symbol standing for the reduced Planck constant.
pub const HBAR: &str = "hbar";
