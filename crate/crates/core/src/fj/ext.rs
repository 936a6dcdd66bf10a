//! Ext dimensions against the dualizing variants.
//!
//! For the step-free variants the answer is a single stabilizer-cohomology
//! table.  For the full dualizing object the residue resolution splices those
//! tables together, and the long exact sequences of its short exact pieces
//! pin each dimension into an interval; on the built-in models the intervals
//! collapse to exact values.

use serde::{Deserialize, Serialize};

use crate::coeffs::{
    induced_p1_cohomology, quasi_parabolic_cohomology, GroupShape, TorusRep,
};
use crate::poset::StratumId;

use super::model::FjModel;
use super::residue::{codim_buckets, residue_resolution};
use super::FjError;

/// Which dualizing variant to resolve against.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtTarget {
    /// the interior dualizing object (steps at every stratum bound)
    Omega,
    /// the canonical extension from the open stratum
    OmegaCan,
    /// the punctual extension from the named stratum
    OmegaBar(String),
}

/// A computed Ext dimension: pinned exactly, or bracketed by the interval
/// the long exact sequences leave open.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtValue {
    Exact(usize),
    Bounds { lo: usize, hi: usize },
}

/// An Ext dimension together with a replayable account of how it was
/// obtained.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExtOutcome {
    pub value: ExtValue,
    pub audit: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Interval {
    lo: usize,
    hi: usize,
}

impl Interval {
    fn point(d: usize) -> Self {
        Interval { lo: d, hi: d }
    }

    fn value(self) -> ExtValue {
        if self.lo == self.hi {
            ExtValue::Exact(self.lo)
        } else {
            ExtValue::Bounds {
                lo: self.lo,
                hi: self.hi,
            }
        }
    }
}

/// Degree-`i` sections table for the punctual extension from one stratum.
///
/// On the open stratum this is cohomology of the stabilizer with the
/// canonical line as coefficient: flag-curve cohomology for the rank-2
/// group, the weight-zero multiplicity for a torus.  On a boundary stratum
/// it is the unipotent exterior algebra paired against the dualizing
/// weight, which requires the stratum to carry a boundary datum.
fn stratum_table(model: &FjModel, y: StratumId, i: usize) -> Result<usize, FjError> {
    let sm = model.stratum(y);
    if model.codim(y) == 0 {
        return match &sm.group.shape {
            GroupShape::Gl2 => {
                let (h0, h1) = induced_p1_cohomology(&sm.omega)?;
                Ok(match i {
                    0 => h0.invariant_multiplicity(),
                    1 => h1.invariant_multiplicity(),
                    _ => 0,
                })
            }
            GroupShape::Torus { .. } => Ok(if i == 0 {
                sm.omega.weight_zero_multiplicity()
            } else {
                0
            }),
            GroupShape::Semidirect { .. } => Err(FjError::HypothesisViolated(format!(
                "open stabilizer of {} is not reductive; its sections table is not a finite weight count",
                sm.label
            ))),
        };
    }
    match &sm.boundary {
        Some(d) => Ok(quasi_parabolic_cohomology(
            &d.vr_weights(),
            &TorusRep::line(2, d.omega_weight()),
            i,
        )?),
        None => Err(FjError::NotComputable(format!(
            "stratum {} carries no boundary datum",
            sm.label
        ))),
    }
}

/// Push the two-out-of-three bounds backwards through the short exact pieces
/// `0 -> Q_(j-1) -> T_j -> Q_j -> 0` of a finite resolution, starting from
/// `Q_(N-1) = T_N`.  `tables[j-1][i]` is the exact degree-`i` dimension of
/// `T_j`; the result brackets `Q_0` in each degree.
fn propagate_intervals(tables: &[Vec<usize>]) -> Vec<Interval> {
    let n = tables.len();
    let degrees = tables[0].len();
    let mut q: Vec<Interval> = tables[n - 1].iter().map(|&d| Interval::point(d)).collect();
    for j in (1..n).rev() {
        let b = &tables[j - 1];
        let mut a = Vec::with_capacity(degrees);
        for i in 0..degrees {
            let (c_prev, b_prev) = if i == 0 {
                (Interval::point(0), 0)
            } else {
                (q[i - 1], b[i - 1])
            };
            // dim Q_(j-1) in degree i = coker(T_j -> Q_j)_(i-1) + ker(T_j -> Q_j)_i
            let lo = c_prev.lo.saturating_sub(b_prev) + b[i].saturating_sub(q[i].hi);
            let hi = c_prev.hi + b[i];
            a.push(Interval { lo, hi });
        }
        q = a;
    }
    q
}

/// Dimension of `Ext^degree` from the unit object to the chosen dualizing
/// variant, with an audit trail of the rules applied.
pub fn ext_dim(
    model: &FjModel,
    target: &ExtTarget,
    degree: usize,
) -> Result<ExtOutcome, FjError> {
    let mut audit = Vec::new();
    match target {
        ExtTarget::OmegaCan => {
            let open = model.open_id()?;
            let d = stratum_table(model, open, degree)?;
            audit.push(format!(
                "open-stratum sections table of {} in degree {degree}",
                model.stratum(open).label
            ));
            Ok(ExtOutcome {
                value: ExtValue::Exact(d),
                audit,
            })
        }
        ExtTarget::OmegaBar(label) => {
            let y = model.by_label(label)?;
            let d = stratum_table(model, y, degree)?;
            audit.push(if model.codim(y) == 0 {
                format!("open-stratum sections table of {label} in degree {degree}")
            } else {
                format!("boundary sections table of {label} in degree {degree}")
            });
            Ok(ExtOutcome {
                value: ExtValue::Exact(d),
                audit,
            })
        }
        ExtTarget::Omega => {
            residue_resolution(model)?;
            audit.push("residue resolution certified exact".to_string());
            let buckets = codim_buckets(model)?;
            let mut tables: Vec<Vec<usize>> = Vec::with_capacity(buckets.len());
            for (p, bucket) in buckets.iter().enumerate() {
                let mut table = vec![0usize; degree + 1];
                let mut labels = Vec::new();
                for &y in bucket {
                    labels.push(model.stratum(y).label.clone());
                    for (i, entry) in table.iter_mut().enumerate() {
                        *entry += stratum_table(model, y, i)?;
                    }
                }
                audit.push(format!(
                    "term {}: strata [{}] with table {:?}",
                    p + 1,
                    labels.join(", "),
                    table
                ));
                tables.push(table);
            }
            let q = propagate_intervals(&tables);
            audit.push(format!(
                "interval [{}, {}] after splicing the long exact sequences",
                q[degree].lo, q[degree].hi
            ));
            Ok(ExtOutcome {
                value: q[degree].value(),
                audit,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fj::{compact_p1, jacobi, modular_curve, snc_corner_toy};

    fn exact(model: &FjModel, target: &ExtTarget, degree: usize) -> usize {
        match ext_dim(model, target, degree).unwrap().value {
            ExtValue::Exact(d) => d,
            ExtValue::Bounds { lo, hi } => panic!("expected an exact value, got [{lo}, {hi}]"),
        }
    }

    #[test]
    fn canonical_ext_table_of_the_modular_model() {
        let m = modular_curve();
        assert_eq!(exact(&m, &ExtTarget::OmegaCan, 0), 0);
        assert_eq!(exact(&m, &ExtTarget::OmegaCan, 1), 1);
        assert_eq!(exact(&m, &ExtTarget::OmegaCan, 2), 0);
    }

    #[test]
    fn cusp_bar_groups_vanish_in_every_degree() {
        let m = modular_curve();
        for i in 0..4 {
            assert_eq!(exact(&m, &ExtTarget::OmegaBar("cusp".into()), i), 0);
        }
    }

    #[test]
    fn interior_ext_groups_are_pinned_by_the_intervals() {
        let m = modular_curve();
        assert_eq!(exact(&m, &ExtTarget::Omega, 0), 0);
        assert_eq!(exact(&m, &ExtTarget::Omega, 1), 1);
        assert_eq!(exact(&m, &ExtTarget::Omega, 2), 0);
        let chi: i64 = (0..3)
            .map(|i| {
                let sign = if i % 2 == 0 { 1 } else { -1 };
                sign * exact(&m, &ExtTarget::Omega, i) as i64
            })
            .sum();
        assert_eq!(chi, -1);
        let audit = ext_dim(&m, &ExtTarget::Omega, 1).unwrap().audit;
        assert!(audit.iter().any(|l| l.contains("certified exact")));
    }

    #[test]
    fn compact_model_reads_off_the_open_table() {
        let m = compact_p1();
        assert_eq!(exact(&m, &ExtTarget::Omega, 0), 0);
        assert_eq!(exact(&m, &ExtTarget::Omega, 1), 1);
        assert_eq!(exact(&m, &ExtTarget::OmegaCan, 1), 1);
    }

    #[test]
    fn corner_toy_ext_groups_all_vanish() {
        let m = snc_corner_toy();
        for i in 0..4 {
            assert_eq!(exact(&m, &ExtTarget::Omega, i), 0);
        }
    }

    #[test]
    fn non_reductive_open_stabilizers_are_rejected() {
        let m = jacobi();
        assert!(matches!(
            ext_dim(&m, &ExtTarget::OmegaCan, 0),
            Err(FjError::HypothesisViolated(_))
        ));
        assert!(matches!(
            ext_dim(&m, &ExtTarget::Omega, 1),
            Err(FjError::HypothesisViolated(_))
        ));
        assert!(matches!(
            ext_dim(&m, &ExtTarget::OmegaBar("cusp".into()), 0),
            Err(FjError::NotComputable(_))
        ));
    }

    #[test]
    fn intervals_can_stay_loose_when_tables_interleave() {
        // two terms with overlapping support: the boundary map rank is not
        // determined, so both degrees only bracket
        let q = propagate_intervals(&[vec![1, 0], vec![1, 0]]);
        assert_eq!(q[0].value(), ExtValue::Bounds { lo: 0, hi: 1 });
        assert_eq!(q[1].value(), ExtValue::Bounds { lo: 0, hi: 1 });
        // a table concentrated in one term stays exact
        let p = propagate_intervals(&[vec![1, 0], vec![0, 0]]);
        assert_eq!(p[0].value(), ExtValue::Exact(1));
        assert_eq!(p[1].value(), ExtValue::Exact(0));
    }
}
