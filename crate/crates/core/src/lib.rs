//! Exact calculus for Fourier-Jacobi categories over stratified toroidal models.
//!
//! The crate is organised in layers.  `linalg` provides fraction-free rational
//! linear algebra; everything above it is exact (no floating point anywhere).
//! `coeffs` models the equivariant coefficient categories (weight-graded
//! representations, the character ring of GL_2, cohomology of equivariant line
//! bundles on P^1, and boundary-vanishing combinatorics).  `grid` implements
//! finitely presented multigraded modules Z^n -> Coeff with left Kan extension
//! semantics on a finite window.  `poset` handles stratification posets with
//! branch-index injections.  `fj` assembles the Fourier-Jacobi category:
//! per-stratum grids glued along stabilisation isomorphisms, structural
//! objects, residue resolutions and Ext bookkeeping.  `chern` carries the
//! Cech/Atiyah side and the proportionality pipeline.

pub mod chern;
pub mod coeffs;
pub mod fj;
pub mod grid;
pub mod linalg;
pub mod poset;

pub use linalg::{Rat, RationalMatrix};
