//! Chart-level Chern data and the proportionality pipeline.
//!
//! The flag curve carries an independent two-chart Laurent model of its line
//! bundles: cohomology is spanned by explicit monomials and the first Chern
//! number falls out of the Euler characteristic.  `universal_class` compares
//! that chart degree against the coupling constant sitting inside the first
//! jet of a character, degreewise checking the jet extension against the
//! strict differentials.  `hmp_check` stacks every certificate the crate
//! produces for one model: residue exactness, boundary vanishing, the jet
//! couplings, and the Euler characteristic of the interior dualizing object
//! against its compact chart-model counterpart.

use serde::Serialize;
use thiserror::Error;

use crate::coeffs::{boundary_vanishing_check, GroupShape, VanishingStatus};
use crate::fj::{
    ext_dim, jet1, omega_prime, residue_resolution, ExtTarget, ExtValue, FjError, FjModel,
};
use crate::grid::box_points;
use crate::linalg::Rat;

#[derive(Error, Debug)]
pub enum ChernError {
    #[error("cohomological degree {0} exceeds the curve model")]
    DegreeOutOfRange(usize),
    #[error(transparent)]
    Fj(#[from] FjError),
}

/// Monomial basis exponents for the degree-`i` cohomology of the degree-`k`
/// line on the flag curve, in its two-chart Laurent model.
///
/// Sections regular in both charts span `H^0` (exponents `0..=k`); the
/// Laurent tails annihilated by neither chart span `H^1` (exponents
/// `k+1..=-1`).  Degrees past 1 are out of range on a curve.
pub fn cech_p1(k: i64, i: usize) -> Result<Vec<i64>, ChernError> {
    match i {
        0 => Ok((0..=k).collect()),
        1 => Ok((k + 1..=-1).collect()),
        _ => Err(ChernError::DegreeOutOfRange(i)),
    }
}

/// First Chern number of the degree-`k` chart line, read off as the Euler
/// characteristic shift of its Laurent model against the trivial line.
pub fn atiyah_c1(k: i64) -> i64 {
    let chi = |k: i64| {
        let h0 = cech_p1(k, 0).expect("degree 0 is in range").len() as i64;
        let h1 = cech_p1(k, 1).expect("degree 1 is in range").len() as i64;
        h0 - h1
    };
    chi(k) - chi(0)
}

/// Outcome of the jet/chart comparison for one character.
#[derive(Clone, Debug, Serialize)]
pub struct UniversalClassReport {
    pub character: [i64; 2],
    /// coupling constant inside the first jet of the character
    pub coupling: Rat,
    /// first Chern number of the matching chart line
    pub chart_degree: i64,
    /// coupling divided by chart degree; `None` when the degree is 0
    pub ratio: Option<Rat>,
    /// the coupling agrees with the chart degree (both zero counts)
    pub matches: bool,
    /// number of (stratum, degree) slots where the jet extension was checked
    pub slots_checked: usize,
}

/// Compare the coupling constant of the first jet of the character `(k, 0)`
/// with the chart-model Chern number `k`, after certifying degreewise that
/// the jet really is an extension of the character line by the twisted
/// strict differentials.
pub fn universal_class(model: &FjModel, k: i64) -> Result<UniversalClassReport, ChernError> {
    let max_codim = model.poset.ids().map(|y| model.codim(y)).max().unwrap_or(0);
    if max_codim > 1 {
        return Err(FjError::NotComputable(format!(
            "jet comparison needs a divisorial boundary, found codimension {max_codim}"
        ))
        .into());
    }
    let open = model.open_id()?;
    let sm = model.stratum(open);
    if !matches!(sm.group.shape, GroupShape::Gl2) {
        return Err(FjError::HypothesisViolated(format!(
            "jet comparison needs the rank-2 flag stabilizer on {}",
            sm.label
        ))
        .into());
    }
    let chi = [k, 0];
    let jet = jet1(model, &chi, 1)?;
    let omp = omega_prime(model)?;
    let mut slots_checked = 0usize;
    for y in model.poset.ids() {
        let jg = jet.stratum(y);
        let og = omp.stratum(y);
        let lo: Vec<i64> = jg.lo().iter().map(|c| c - 1).collect();
        let hi: Vec<i64> = jg.hi().iter().map(|c| c + 1).collect();
        for v in box_points(&lo, &hi) {
            let dim_jet = jg.evaluate(&v).total_dim();
            let dim_forms = og.evaluate(&v).total_dim();
            let dim_line = usize::from(v.iter().all(|&c| c >= 0));
            if dim_jet != dim_forms + dim_line {
                return Err(FjError::NotExact {
                    stratum: model.stratum(y).label.clone(),
                    degree: v,
                    term: 1,
                }
                .into());
            }
            slots_checked += 1;
        }
    }
    let coupling = jet.stratum(open).evaluate(&[]).op_block(0, &chi)[(0, 0)].clone();
    let chart_degree = atiyah_c1(k);
    let ratio = (chart_degree != 0).then(|| &coupling / &Rat::from_int(chart_degree));
    let matches = match &ratio {
        Some(r) => *r == Rat::one(),
        None => coupling.is_zero(),
    };
    Ok(UniversalClassReport {
        character: chi,
        coupling,
        chart_degree,
        ratio,
        matches,
        slots_checked,
    })
}

/// Everything [`hmp_check`] certifies for one model.
#[derive(Clone, Debug, Serialize)]
pub struct ChernReport {
    pub model: String,
    /// Euler characteristic of the dualizing line in the compact chart model
    pub dual_euler: i64,
    /// Euler characteristic of the interior dualizing object
    pub fj_euler: i64,
    /// ratio of the two Euler characteristics, when defined
    pub proportionality: Option<Rat>,
    /// per character `k`: does the jet coupling match the chart degree
    pub jet_ratios: Vec<(i64, bool)>,
    pub residue_terms: usize,
    pub boundary_vanishing: Vec<(String, VanishingStatus)>,
    pub consistent: bool,
}

/// Run the full proportionality pipeline on one model: residue exactness,
/// boundary vanishing on every stratum carrying a datum, the jet couplings
/// for a band of characters, and the comparison of Euler characteristics.
pub fn hmp_check(model: &FjModel) -> Result<ChernReport, ChernError> {
    let open = model.open_id()?;
    let sm = model.stratum(open);
    if !sm.group.is_reductive() {
        return Err(FjError::HypothesisViolated(format!(
            "proportionality needs a reductive open stabilizer on {}",
            sm.label
        ))
        .into());
    }
    if !matches!(sm.group.shape, GroupShape::Gl2) {
        return Err(FjError::HypothesisViolated(format!(
            "proportionality compares against the flag curve; open stabilizer of {} is not the rank-2 group",
            sm.label
        ))
        .into());
    }
    let resolution = residue_resolution(model)?;
    let residue_terms = resolution.terms.len();
    let mut boundary_vanishing = Vec::new();
    let mut vanish_ok = true;
    for y in model.poset.ids() {
        if model.codim(y) == 0 {
            continue;
        }
        if let Some(d) = &model.stratum(y).boundary {
            let report = boundary_vanishing_check(d);
            vanish_ok &= report.status != VanishingStatus::Fails;
            boundary_vanishing.push((model.stratum(y).label.clone(), report.status));
        }
    }
    let mut fj_euler = 0i64;
    for i in 0..=model.dim {
        match ext_dim(model, &ExtTarget::Omega, i)?.value {
            ExtValue::Exact(d) => {
                let sign = if i % 2 == 0 { 1 } else { -1 };
                fj_euler += sign * d as i64;
            }
            ExtValue::Bounds { lo, hi } => {
                return Err(FjError::NotComputable(format!(
                    "Ext dimension in degree {i} only bracketed to [{lo}, {hi}]"
                ))
                .into());
            }
        }
    }
    let dual_euler = {
        let h0 = cech_p1(-2, 0)?.len() as i64;
        let h1 = cech_p1(-2, 1)?.len() as i64;
        h0 - h1
    };
    let proportionality = (dual_euler != 0).then(|| Rat::new(fj_euler, dual_euler));
    let mut jet_ratios = Vec::new();
    let mut jets_ok = true;
    for k in -3..=3 {
        let report = universal_class(model, k)?;
        jets_ok &= report.matches;
        jet_ratios.push((k, report.matches));
    }
    let consistent = vanish_ok && jets_ok && proportionality == Some(Rat::one());
    Ok(ChernReport {
        model: model.name.clone(),
        dual_euler,
        fj_euler,
        proportionality,
        jet_ratios,
        residue_terms,
        boundary_vanishing,
        consistent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::bwb_p1;
    use crate::fj::{compact_p1, jacobi, modular_curve, snc_corner_toy};

    #[test]
    fn chart_cohomology_matches_the_weight_model() {
        for k in -8..=6 {
            let (h0, h1) = bwb_p1(k);
            assert_eq!(cech_p1(k, 0).unwrap().len(), h0.dim(), "H0 at k = {k}");
            assert_eq!(cech_p1(k, 1).unwrap().len(), h1.dim(), "H1 at k = {k}");
        }
        assert!(matches!(cech_p1(0, 2), Err(ChernError::DegreeOutOfRange(2))));
    }

    #[test]
    fn chart_degree_is_additive_and_dual_negates() {
        for a in -4..=4 {
            for b in -4..=4 {
                assert_eq!(atiyah_c1(a + b), atiyah_c1(a) + atiyah_c1(b));
            }
            assert_eq!(atiyah_c1(-a), -atiyah_c1(a));
        }
        assert_eq!(atiyah_c1(5), 5);
        assert_eq!(atiyah_c1(-2), -2);
    }

    #[test]
    fn jet_couplings_reproduce_the_chart_degree() {
        let m = modular_curve();
        for k in [-2, -1, 1, 2, 3] {
            let report = universal_class(&m, k).unwrap();
            assert_eq!(report.ratio, Some(Rat::one()), "k = {k}");
            assert!(report.matches);
            assert!(report.slots_checked > 0);
        }
        let flat = universal_class(&m, 0).unwrap();
        assert_eq!(flat.ratio, None);
        assert!(flat.matches);
    }

    #[test]
    fn jet_comparison_rejects_other_stabilizers() {
        assert!(matches!(
            universal_class(&jacobi(), 1),
            Err(ChernError::Fj(FjError::HypothesisViolated(_)))
        ));
        assert!(matches!(
            universal_class(&snc_corner_toy(), 1),
            Err(ChernError::Fj(FjError::NotComputable(_)))
        ));
    }

    #[test]
    fn proportionality_holds_on_the_flag_models() {
        let report = hmp_check(&modular_curve()).unwrap();
        assert!(report.consistent);
        assert_eq!(report.dual_euler, -1);
        assert_eq!(report.fj_euler, -1);
        assert_eq!(report.proportionality, Some(Rat::one()));
        assert_eq!(report.residue_terms, 3);
        assert_eq!(
            report.boundary_vanishing,
            vec![("cusp".to_string(), VanishingStatus::AllDegrees)]
        );
        let compact = hmp_check(&compact_p1()).unwrap();
        assert!(compact.consistent);
        assert_eq!(compact.residue_terms, 2);
        assert!(compact.boundary_vanishing.is_empty());
    }

    #[test]
    fn proportionality_rejects_non_reductive_models() {
        assert!(matches!(
            hmp_check(&jacobi()),
            Err(ChernError::Fj(FjError::HypothesisViolated(_)))
        ));
        assert!(matches!(
            hmp_check(&snc_corner_toy()),
            Err(ChernError::Fj(FjError::HypothesisViolated(_)))
        ));
    }
}
