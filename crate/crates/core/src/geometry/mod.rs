//! Levi-Civita connection, curvature and tensor calculus on a coordinate chart.
//!
//! Curvature sign: `R^a_{bcd} = ∂_d Γ^a_{cb} - ∂_c Γ^a_{db} + Γ^a_{de} Γ^e_{cb} - Γ^a_{ce} Γ^e_{db}`
//! and `R_{bd} = R^a_{bad}`. With this choice round spheres have negative
//! scalar curvature. Every derived object (Weyl, Schouten, Cotton-York,
//! conformal term) is written in terms of these and inherits the sign.

mod calculus;
mod chart;
mod tensor;

pub use calculus::{
    contract_vector, covariant_derivative, divergence, exterior_derivative, gradient, lower_index,
    raise_index,
};
pub use chart::Chart;
pub use tensor::{indices, Indices, SymTensor, Symmetry, Variance};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("matrix shape mismatch: expected {expected} columns, found {found}")]
    Shape { expected: usize, found: usize },
    #[error("a chart needs at least two coordinates, got {0}")]
    TooFewCoordinates(usize),
    #[error("coordinate `{0}` declared twice")]
    DuplicateCoordinate(String),
    #[error("inverse metric is not symmetric at ({i}, {j})")]
    Asymmetric { i: usize, j: usize },
    #[error("inverse metric is degenerate (determinant {0})")]
    Degenerate(String),
    #[error("could not decide whether the inverse metric is degenerate: {0}")]
    Undecided(String),
    #[error("{what} needs dimension at least {need}, chart has {found}")]
    Dimension { what: &'static str, need: usize, found: usize },
    #[error("variance mismatch: expected {expected:?}, found {found:?}")]
    VarianceMismatch { expected: Vec<Variance>, found: Vec<Variance> },
    #[error("slot {slot} out of range for a rank {rank} tensor")]
    SlotOutOfRange { slot: usize, rank: usize },
}
