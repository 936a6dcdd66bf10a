//! Exact rational linear algebra.
//!
//! All elimination goes through a fraction-free (Bareiss) integer core after
//! clearing denominators row by row; reduced forms, kernels and solvers are
//! derived from that.  Matrices are dense and row-major, which is the right
//! trade-off for the dimensions this crate ever sees (a few hundred at most).

mod matrix;
mod rational;
mod subspace;

pub use matrix::RationalMatrix;
pub use rational::Rat;
pub use subspace::Subspace;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("cannot parse rational from {0:?}")]
    BadRational(String),
}
