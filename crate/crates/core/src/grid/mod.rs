//! Finitely presented functors from Z^n to a coefficient category.
//!
//! A [`GridModule`] stores values and structure maps on a finite window and
//! extends to the whole lattice by Kan rules: zero below the window, clamped
//! constant above it.  Kernels, cokernels, images, tensor products (on
//! torsion-free objects), directional limits and an isomorphism test are
//! provided on top of that representation.

mod iso;
mod limits;
mod module;
mod morphism;
mod tensor;

pub use iso::{barcode, iso_test, rank_invariant, Barcode, IsoVerdict};
pub use limits::{lim_along, stabilization_map, StabilizationMap};
pub use module::{canonical_extension, GridFlags, GridModule};
pub use morphism::{grid_hom_basis, sub_quotient, GridMorphism, SubQuotientKind};
pub use tensor::{tensor, unit_module};
pub(crate) use tensor::tensor_with_inclusions;

use thiserror::Error;

use crate::coeffs::CoeffError;

#[derive(Debug, Error)]
pub enum GridError {
    #[error("rank mismatch: {left} vs {right}")]
    RankMismatch { left: usize, right: usize },
    #[error("degrees not comparable: {0}")]
    NotComparable(String),
    #[error("module is not torsion-free: {0}")]
    NotTorsionFree(String),
    #[error("bad window: {0}")]
    BadWindow(String),
    #[error("bad component: {0}")]
    BadComponent(String),
    #[error("square does not commute at {at:?} in directions {i}, {j}")]
    NonCommutingSquare { at: Vec<i64>, i: usize, j: usize },
    #[error(transparent)]
    Coeff(#[from] CoeffError),
}

/// All lattice points of the box `[lo, hi]`, lexicographically.
pub(crate) fn box_points(lo: &[i64], hi: &[i64]) -> Vec<Vec<i64>> {
    assert_eq!(lo.len(), hi.len());
    if lo.iter().zip(hi).any(|(a, b)| a > b) {
        return Vec::new();
    }
    let mut out = vec![lo.to_vec()];
    loop {
        let last = out.last().unwrap();
        let mut next = last.clone();
        let mut k = next.len();
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            if next[k] < hi[k] {
                next[k] += 1;
                for j in k + 1..next.len() {
                    next[j] = lo[j];
                }
                break;
            }
        }
        out.push(next);
    }
}

pub(crate) fn leq(v: &[i64], w: &[i64]) -> bool {
    v.iter().zip(w).all(|(a, b)| a <= b)
}

pub(crate) fn meet(v: &[i64], w: &[i64]) -> Vec<i64> {
    v.iter().zip(w).map(|(a, b)| *a.min(b)).collect()
}

pub(crate) fn join(v: &[i64], w: &[i64]) -> Vec<i64> {
    v.iter().zip(w).map(|(a, b)| *a.max(b)).collect()
}

pub(crate) fn plus_e(v: &[i64], i: usize) -> Vec<i64> {
    let mut out = v.to_vec();
    out[i] += 1;
    out
}

#[cfg(test)]
mod util_tests {
    use super::*;

    #[test]
    fn box_enumeration() {
        let pts = box_points(&[0, 0], &[1, 2]);
        assert_eq!(pts.len(), 6);
        assert_eq!(pts.first().unwrap(), &vec![0, 0]);
        assert_eq!(pts.last().unwrap(), &vec![1, 2]);
        assert_eq!(box_points(&[], &[]), vec![Vec::<i64>::new()]);
        assert!(box_points(&[1], &[0]).is_empty());
    }

    #[test]
    fn lattice_ops() {
        assert!(leq(&[0, 1], &[0, 2]));
        assert!(!leq(&[1, 0], &[0, 2]));
        assert_eq!(meet(&[0, 3], &[1, 2]), vec![0, 2]);
        assert_eq!(join(&[0, 3], &[1, 2]), vec![1, 3]);
        assert_eq!(plus_e(&[0, 0], 1), vec![0, 1]);
    }
}
