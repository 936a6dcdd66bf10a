//! Equivariant coefficient categories at desk scale.
//!
//! Degreewise values of multigraded modules live here.  A coefficient object
//! is a finite-dimensional vector space graded by the weight lattice of a
//! torus, together with a finite list of nilpotent "raising" operators with
//! fixed nonzero weight shifts.  Three instances cover everything this crate
//! models:
//!
//! * rank 0, no operators: plain vector spaces;
//! * rank r, no operators: representations of a rank-r torus;
//! * rank 2 with one operator of shift (-1, 1): representations of the Borel
//!   of GL_2 (the operator is the action of the lower-triangular nilpotent).
//!
//! Morphisms are weight-preserving linear maps commuting with the operators,
//! so kernels, cokernels, tensor products and Hom spaces are all exact
//! finite linear algebra.  The character-ring side (formal sums of GL_2
//! irreducibles, Borel-Weil-Bott for P^1, boundary weight combinatorics)
//! lives in its own submodules.

mod boundary;
mod char_ring;
mod group;
mod hom;
mod morphism;
mod object;

pub use boundary::{
    boundary_vanishing_check, quasi_parabolic_cohomology, unipotent_cohomology, BoundaryDatum,
    BoundaryVanishingReport, VanishingStatus,
};
pub use char_ring::{torus_rep_display, Gl2Rep, TorusRep};
pub use group::{GroupDatum, GroupShape};
pub use hom::{hom_basis, hom_dim, AffineExpr, ExprMatrix, SystemSolution, VarSystem};
pub use morphism::{
    restrict_restrict_interchange, sub_from_spans, tensor_restrict_interchange, CoeffMorphism,
};
pub use object::{CoeffObject, CoeffShape, Weight};

pub(crate) use object::{parse_weight_key, weight_add, weight_key};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoeffError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("weight has wrong rank: expected {expected}, got {got}")]
    WeightRank { expected: usize, got: usize },
    #[error("operator block at weight {weight:?} has wrong dimensions")]
    BadOpBlock { weight: Weight },
    #[error("morphism block at weight {weight:?} has wrong dimensions")]
    BadMorphismBlock { weight: Weight },
    #[error("morphism does not commute with operator {op} at weight {weight:?}")]
    NotEquivariant { op: usize, weight: Weight },
    #[error("span is not stable under operator {op}")]
    UnstableSpan { op: usize },
    #[error("operator shift must be nonzero")]
    ZeroOpShift,
    #[error("unsupported coefficient: {0}")]
    UnsupportedCoefficient(String),
    #[error("unsupported group morphism: {0}")]
    UnsupportedMorphism(String),
    #[error("object has nonzero operators: {0}")]
    NonSemisimple(String),
    #[error("malformed group datum: {0}")]
    BadGroupDatum(String),
}

/// Borel-Weil-Bott for equivariant line bundles on P^1.
///
/// `bwb_p1(k)` returns `(H0, H1)` of the degree-k member of the standard
/// one-parameter family of equivariant line bundles, as formal sums of GL_2
/// irreducibles.  The family is normalised so that the tautological quotient
/// bundle is `k = 1`; the cotangent line is the `k = -2` member tensored with
/// `det`, which makes its `H1` the trivial representation.
pub fn bwb_p1(k: i64) -> (Gl2Rep, Gl2Rep) {
    if k >= 0 {
        (Gl2Rep::irreducible(k as u32, 0), Gl2Rep::zero())
    } else if k == -1 {
        (Gl2Rep::zero(), Gl2Rep::zero())
    } else {
        (Gl2Rep::zero(), Gl2Rep::irreducible((-k - 2) as u32, k + 1))
    }
}

/// Cohomology on the rank-1 compact dual of a semisimple Borel-shaped object.
///
/// Each weight line `(c1, c2)` is the degree `c1 - c2` member of the line
/// bundle family twisted by `det^{c2}`; cohomology is additive over the
/// decomposition.  Objects with nonzero operators are refused: they are not
/// pulled back from the reductive group, and their cohomology has to be
/// assembled degree by degree from a resolution instead.
pub fn induced_p1_cohomology(obj: &CoeffObject) -> Result<(Gl2Rep, Gl2Rep), CoeffError> {
    if *obj.shape() != CoeffShape::gl2_borel() {
        return Err(CoeffError::UnsupportedCoefficient(
            "induced cohomology needs the rank-2 Borel shape".into(),
        ));
    }
    if !obj.has_zero_ops() {
        return Err(CoeffError::NonSemisimple(
            "weight lines must split before inducing".into(),
        ));
    }
    let mut h0 = Gl2Rep::zero();
    let mut h1 = Gl2Rep::zero();
    for (w, &mult) in obj.components() {
        let (a, b) = bwb_p1(w[0] - w[1]);
        for _ in 0..mult {
            h0 = h0.direct_sum(&a.twist_det(w[1]));
            h1 = h1.direct_sum(&b.twist_det(w[1]));
        }
    }
    Ok((h0, h1))
}

#[cfg(test)]
mod bwb_tests {
    use super::*;

    #[test]
    fn dimension_table() {
        for k in 0..=6 {
            let (h0, h1) = bwb_p1(k);
            assert_eq!(h0.dim(), (k + 1) as usize, "H0 of degree {k}");
            assert_eq!(h1.dim(), 0, "H1 of degree {k}");
        }
        let (h0, h1) = bwb_p1(-1);
        assert_eq!((h0.dim(), h1.dim()), (0, 0), "degree -1 is invisible");
        for k in -8..=-2i64 {
            let (h0, h1) = bwb_p1(k);
            assert_eq!(h0.dim(), 0, "H0 of degree {k}");
            assert_eq!(h1.dim(), (-k - 1) as usize, "H1 of degree {k}");
        }
    }

    #[test]
    fn serre_symmetry_of_dimensions() {
        for k in -8..=6i64 {
            let (h0_dual, _) = bwb_p1(-2 - k);
            let (_, h1) = bwb_p1(k);
            assert_eq!(h1.dim(), h0_dual.dim(), "dim H1(k) = dim H0(-2-k) at k={k}");
        }
    }

    #[test]
    fn cotangent_line_has_trivial_h1() {
        // cotangent = degree -2 member twisted by det
        let (_, h1) = bwb_p1(-2);
        let twisted = h1.tensor(&Gl2Rep::det(1));
        assert_eq!(twisted, Gl2Rep::irreducible(0, 0), "H1 of the cotangent line");
        assert_eq!(twisted.invariant_multiplicity(), 1);
    }

    #[test]
    fn tautological_quotient_sections_are_standard() {
        let (h0, _) = bwb_p1(1);
        assert_eq!(h0, Gl2Rep::irreducible(1, 0), "two sections forming std");
    }
}
