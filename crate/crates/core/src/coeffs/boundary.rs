//! Weight combinatorics of boundary stabilizers.
//!
//! A boundary stratum's stabilizer decomposes under a fixed rank-2 torus
//! `S`.  Lie-algebra pieces carry the built-in weights below; cohomology of
//! the abelian unipotent part is an exterior algebra, and invariants are
//! detected by the weight-0 criterion.

use serde::{Deserialize, Serialize};

use super::object::weight_neg;
use super::{CoeffError, TorusRep, Weight};

/// Dimensions of the graded pieces of a boundary stabilizer, with the fixed
/// S-weight table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryDatum {
    /// dim of the R^+ piece, S-weight (-1, 1)
    pub n0: usize,
    /// dim of the V^+ piece, S-weight (-1, 0)
    pub v: usize,
    /// dim of the U piece, S-weight (-1, -1)
    pub u: usize,
}

impl BoundaryDatum {
    pub fn new(n0: usize, v: usize, u: usize) -> Self {
        BoundaryDatum { n0, v, u }
    }

    /// total boundary codimension count n = n0 + v + u
    pub fn n(&self) -> usize {
        self.n0 + self.v + self.u
    }

    pub const WEIGHT_U: [i64; 2] = [-1, -1];
    pub const WEIGHT_V_PLUS: [i64; 2] = [-1, 0];
    pub const WEIGHT_V_MINUS: [i64; 2] = [0, -1];
    pub const WEIGHT_R_PLUS: [i64; 2] = [-1, 1];
    pub const WEIGHT_K: [i64; 2] = [0, 0];
    pub const WEIGHT_R_MINUS: [i64; 2] = [1, -1];

    /// S-weights of Lie(V^+) ⊕ Lie(R^+), the unipotent directions whose
    /// cohomology enters the vanishing argument.
    pub fn vr_weights(&self) -> Vec<Weight> {
        let mut out = Vec::with_capacity(self.v + self.n0);
        out.extend(std::iter::repeat_n(Self::WEIGHT_V_PLUS.to_vec(), self.v));
        out.extend(std::iter::repeat_n(Self::WEIGHT_R_PLUS.to_vec(), self.n0));
        out
    }

    /// S-weight of the dualizing line on this stratum.
    pub fn omega_weight(&self) -> Weight {
        vec![
            -(self.u as i64) - (self.v as i64) - (self.n0 as i64),
            self.n0 as i64 - self.u as i64,
        ]
    }
}

/// `Λ^i` of the dual of an abelian unipotent Lie algebra with the given
/// weights: the multiset of all sums of `i` distinct negated weights.
/// Degrees beyond the dimension give zero.
pub fn unipotent_cohomology(weights: &[Weight], i: usize) -> TorusRep {
    let rank = weights.first().map_or(2, Vec::len);
    if i > weights.len() {
        return TorusRep::zero(rank);
    }
    let negated: Vec<Weight> = weights.iter().map(|w| weight_neg(w)).collect();
    let mut rep = TorusRep::zero(rank);
    // iterate over all i-element subsets by index
    let mut idx: Vec<usize> = (0..i).collect();
    loop {
        let mut sum = vec![0i64; rank];
        for &j in &idx {
            for (s, c) in sum.iter_mut().zip(&negated[j]) {
                *s += c;
            }
        }
        rep.add_weight(sum, 1);
        // advance the subset
        let mut k = i;
        loop {
            if k == 0 {
                return rep;
            }
            k -= 1;
            if idx[k] + 1 <= weights.len() - (i - k) {
                idx[k] += 1;
                for j in k + 1..i {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Degree-`i` cohomology of the quotient stack of a point by a quasi
/// parabolic stabilizer, with a one-dimensional coefficient.
///
/// Computed as the S-weight-0 multiplicity of
/// `Λ^i((Lie V^+ ⊕ Lie R^+)^*) ⊗ coeff`.  This models invariants of the
/// reductive part by the weight criterion, which assumes the reductive
/// part contains the image of S; the caller owns that hypothesis.
pub fn quasi_parabolic_cohomology(
    unipotent_weights: &[Weight],
    coeff: &TorusRep,
    i: usize,
) -> Result<usize, CoeffError> {
    if coeff.dim() != 1 {
        return Err(CoeffError::UnsupportedCoefficient(format!(
            "coefficient must be one-dimensional, got dim {}",
            coeff.dim()
        )));
    }
    let rep = unipotent_cohomology(unipotent_weights, i).tensor(coeff);
    Ok(rep.invariant_multiplicity())
}

/// Verdict of [`boundary_vanishing_check`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VanishingStatus {
    /// weight-0 multiplicity is 0 in every degree
    AllDegrees,
    /// vanishes from the threshold degree on, but not everywhere below
    FromThreshold,
    /// a weight-0 class survives at or above the threshold
    Fails,
    /// u = 0: the criterion does not apply
    NotApplicable,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryVanishingReport {
    pub datum: BoundaryDatum,
    pub status: VanishingStatus,
    /// S-weight-0 multiplicity of `Λ^i ⊗ ω` for i = 0..=n0+v
    pub weight_zero_mults: Vec<usize>,
    /// degree bound n - u from which vanishing is claimed (meaningful for u > 0)
    pub threshold: usize,
    /// weight of the top exterior power Λ^{n0+v}
    pub top_degree_weight: Weight,
    /// weight of Λ^{n0+v} ⊗ ω
    pub tensor_weight: Weight,
}

/// Sweep all cohomological degrees of `Λ^* ((Lie V^+ ⊕ Lie R^+)^*) ⊗ ω` and
/// report where the S-weight-0 multiplicity vanishes.
pub fn boundary_vanishing_check(d: &BoundaryDatum) -> BoundaryVanishingReport {
    let weights = d.vr_weights();
    let omega = TorusRep::line(2, d.omega_weight());
    let top = d.n0 + d.v;
    let mut mults = Vec::with_capacity(top + 1);
    for i in 0..=top {
        mults.push(
            quasi_parabolic_cohomology(&weights, &omega, i)
                .expect("omega is one-dimensional"),
        );
    }
    let top_rep = unipotent_cohomology(&weights, top);
    let top_degree_weight = top_rep
        .mults()
        .keys()
        .next()
        .cloned()
        .unwrap_or_else(|| vec![0, 0]);
    let tensor_weight = top_rep
        .tensor(&omega)
        .mults()
        .keys()
        .next()
        .cloned()
        .unwrap_or_else(|| d.omega_weight());
    let threshold = d.n().saturating_sub(d.u);
    let status = if d.u == 0 {
        VanishingStatus::NotApplicable
    } else if mults.iter().all(|&m| m == 0) {
        VanishingStatus::AllDegrees
    } else if mults.iter().enumerate().all(|(i, &m)| i < threshold || m == 0) {
        VanishingStatus::FromThreshold
    } else {
        VanishingStatus::Fails
    };
    BoundaryVanishingReport {
        datum: *d,
        status,
        weight_zero_mults: mults,
        threshold,
        top_degree_weight,
        tensor_weight,
    }
}
