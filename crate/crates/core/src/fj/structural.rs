//! The structural objects: unit, dualizing lines and their boundary
//! pushforwards, strict and logarithmic differentials, first jets.

use std::collections::BTreeMap;

use crate::coeffs::{CoeffMorphism, CoeffObject, CoeffShape};
use crate::grid::{box_points, canonical_extension, join, lim_along, meet, GridModule};
use crate::linalg::{Rat, RationalMatrix};
use crate::poset::StratumId;

use super::functors::coextend;
use super::model::{FjModel, StratumModel};
use super::object::FjObject;
use super::FjError;

/// Monoidal unit: the trivially extended unit line on every stratum.
pub fn unit_object(model: &FjModel) -> Result<FjObject, FjError> {
    let mut grids = Vec::new();
    for y in model.poset.ids() {
        let sm = model.stratum(y);
        let unit = CoeffObject::line(sm.shape.clone(), vec![0; sm.shape.rank]);
        grids.push(canonical_extension(&unit, model.codim(y)));
    }
    FjObject::with_identity_glue(model, grids)
}

/// The character `chi` of the open group, canonically extended by its
/// restrictions.
pub(crate) fn line_object(model: &FjModel, chi: &[i64]) -> Result<FjObject, FjError> {
    let open = model.open_id()?;
    if chi.len() != model.stratum(open).shape.rank {
        return Err(FjError::NotComputable(format!(
            "character has rank {}, open coefficients have rank {}",
            chi.len(),
            model.stratum(open).shape.rank
        )));
    }
    let mut grids = Vec::new();
    for y in model.poset.ids() {
        let sm = model.stratum(y);
        let w = if y == open {
            chi.to_vec()
        } else {
            apply_lattice(&model.alpha(y, open)?, chi)
        };
        grids.push(canonical_extension(
            &CoeffObject::line(sm.shape.clone(), w),
            model.codim(y),
        ));
    }
    FjObject::with_identity_glue(model, grids)
}

fn apply_lattice(matrix: &[Vec<i64>], w: &[i64]) -> Vec<i64> {
    matrix
        .iter()
        .map(|row| row.iter().zip(w).map(|(a, b)| a * b).sum())
        .collect()
}

/// Dualizing line vanishing along the boundary: supported in degrees `>= 1`.
pub fn omega(model: &FjModel) -> Result<FjObject, FjError> {
    let open = model.open_id()?;
    coextend(model, open, &[], &model.stratum(open).omega, 1)
}

/// Canonical extension of the dualizing line: supported in degrees `>= 0`.
pub fn omega_can(model: &FjModel) -> Result<FjObject, FjError> {
    let open = model.open_id()?;
    coextend(model, open, &[], &model.stratum(open).omega, 0)
}

/// Dualizing line of the closed stratum `y`, pushed forward: punctual in
/// the transverse directions, free along `y` itself.
pub fn omega_bar(model: &FjModel, y: StratumId) -> Result<FjObject, FjError> {
    let origin = vec![0i64; model.codim(y)];
    coextend(model, y, &origin, &model.stratum(y).omega, 0)
}

/// Log differentials, canonically extended stratum by stratum.  Only glues
/// when restriction carries log forms to log forms; otherwise the boundary
/// carries extra directions and the constructor reports the mismatch.
pub fn omega_log_prime(model: &FjModel) -> Result<FjObject, FjError> {
    let mut grids = Vec::new();
    for y in model.poset.ids() {
        let sm = model.stratum(y);
        grids.push(canonical_extension(&sm.omega_one, model.codim(y)));
    }
    FjObject::with_identity_glue(model, grids)
}

/// Multiset of differential weights visible at degree `w`: the non-residue
/// part of the log differentials plus each residue line whose direction has
/// been crossed at least once.
fn strict_value(sm: &StratumModel, w: &[i64]) -> CoeffObject {
    let mut dims: BTreeMap<Vec<i64>, usize> = sm
        .omega_one
        .components()
        .iter()
        .map(|(u, &d)| (u.clone(), d))
        .collect();
    for line in &sm.boundary_lines {
        let d = dims
            .get_mut(line)
            .expect("residue line is a weight of the log differentials");
        assert!(*d > 0, "residue lines exceed log differential multiplicity");
        *d -= 1;
    }
    for (i, line) in sm.boundary_lines.iter().enumerate() {
        if w[i] >= 1 {
            *dims.entry(line.clone()).or_insert(0) += 1;
        }
    }
    CoeffObject::from_components(sm.shape.clone(), dims)
}

/// Principal padding injection: source coordinates map identically onto the
/// leading coordinates of the target at every weight.
fn padding_inclusion(s: &CoeffObject, t: &CoeffObject) -> CoeffMorphism {
    let mut blocks = BTreeMap::new();
    for (w, &sd) in s.components() {
        let td = t.dim_at(w);
        assert!(td >= sd, "padding needs a larger target");
        let mut m = RationalMatrix::zero(td, sd);
        for j in 0..sd {
            m[(j, j)] = Rat::one();
        }
        blocks.insert(w.clone(), m);
    }
    CoeffMorphism::new(s.clone(), t.clone(), blocks).expect("padding blocks are equivariant")
}

/// Identity gluing between independently built grids, checked degreewise;
/// degrees where the two sides disagree get the zero map so that validation
/// reports the mismatch.
fn matched_identity_components(
    model: &FjModel,
    grids: &[GridModule],
) -> Result<BTreeMap<(StratumId, StratumId), BTreeMap<Vec<i64>, CoeffMorphism>>, FjError> {
    let mut components = BTreeMap::new();
    for (z, y) in model.comparable_pairs() {
        let beta = model.poset.beta(z, y).expect("comparable pair").clone();
        let pushed = model.alpha_push(z, y, &grids[y])?;
        let limit = lim_along(&grids[z], &beta);
        let lo = meet(pushed.lo(), limit.lo());
        let hi = join(pushed.hi(), limit.hi());
        let mut comps = BTreeMap::new();
        for v in box_points(&lo, &hi) {
            let s = pushed.evaluate(&v);
            let t = limit.evaluate(&v);
            let c = if s == t {
                CoeffMorphism::identity(&s)
            } else {
                CoeffMorphism::zero(s, t)
            };
            comps.insert(v, c);
        }
        components.insert((z, y), comps);
    }
    Ok(components)
}

/// Strict-to-log filtration of the differentials: in degree `v` only the
/// residue lines of already-crossed directions appear.
pub fn omega_prime(model: &FjModel) -> Result<FjObject, FjError> {
    let mut grids = Vec::new();
    for y in model.poset.ids() {
        let sm = model.stratum(y);
        let rank = model.codim(y);
        let lo = vec![0i64; rank];
        let hi = vec![1i64; rank];
        let mut values = BTreeMap::new();
        for w in box_points(&lo, &hi) {
            values.insert(w.clone(), strict_value(sm, &w));
        }
        let mut maps = BTreeMap::new();
        for w in box_points(&lo, &hi) {
            for i in 0..rank {
                let mut w2 = w.clone();
                w2[i] += 1;
                if w2.iter().zip(&hi).all(|(a, b)| a <= b) {
                    maps.insert(
                        (w.clone(), i),
                        padding_inclusion(&values[&w], &values[&w2]),
                    );
                }
            }
        }
        grids.push(GridModule::from_parts(
            sm.shape.clone(),
            lo,
            hi,
            values,
            maps,
        )?);
    }
    let components = matched_identity_components(model, &grids)?;
    FjObject::new(model, grids, components)
}

/// First jets of the character `chi`, with the derivative sitting in the
/// lowering slot of the Borel operator.  Order 0 is the plain line; orders
/// above 1 are not implemented.
pub fn jet1(model: &FjModel, chi: &[i64], order: usize) -> Result<FjObject, FjError> {
    if order >= 2 {
        return Err(FjError::UnsupportedJetOrder(order));
    }
    if order == 0 {
        return line_object(model, chi);
    }
    let open = model.open_id()?;
    let open_shape = model.stratum(open).shape.clone();
    if open_shape != CoeffShape::gl2_borel() {
        return Err(FjError::NotComputable(
            "first jets need the rank-2 Borel operator to carry the derivative".into(),
        ));
    }
    if chi.len() != 2 {
        return Err(FjError::NotComputable(format!(
            "character has rank {}, expected 2",
            chi.len()
        )));
    }
    let shift = open_shape.op_shifts[0].clone();
    let chi_shifted: Vec<i64> = chi.iter().zip(&shift).map(|(a, b)| a + b).collect();
    let mut open_value = CoeffObject::from_components(
        open_shape.clone(),
        [(chi.to_vec(), 1), (chi_shifted, 1)].into_iter().collect(),
    );
    // derivative coupling along the distinguished coordinate
    let c = Rat::from_int(chi[0] - chi[1]);
    open_value.set_op_block(0, chi.to_vec(), RationalMatrix::new(1, 1, vec![c]));

    let mut grids = Vec::new();
    for y in model.poset.ids() {
        if y == open {
            grids.push(canonical_extension(&open_value, 0));
            continue;
        }
        let sm = model.stratum(y);
        let rank = model.codim(y);
        let aw = apply_lattice(&model.alpha(y, open)?, chi);
        let lo = vec![0i64; rank];
        let hi = vec![1i64; rank];
        let mut values = BTreeMap::new();
        for w in box_points(&lo, &hi) {
            let strict = strict_value(sm, &w);
            let mut dims: BTreeMap<Vec<i64>, usize> = [(aw.clone(), 1)].into_iter().collect();
            for (u, &d) in strict.components() {
                *dims
                    .entry(u.iter().zip(&aw).map(|(a, b)| a + b).collect())
                    .or_insert(0) += d;
            }
            values.insert(w.clone(), CoeffObject::from_components(sm.shape.clone(), dims));
        }
        let mut maps = BTreeMap::new();
        for w in box_points(&lo, &hi) {
            for i in 0..rank {
                let mut w2 = w.clone();
                w2[i] += 1;
                if w2.iter().zip(&hi).all(|(a, b)| a <= b) {
                    maps.insert(
                        (w.clone(), i),
                        padding_inclusion(&values[&w], &values[&w2]),
                    );
                }
            }
        }
        grids.push(GridModule::from_parts(
            sm.shape.clone(),
            lo,
            hi,
            values,
            maps,
        )?);
    }
    let components = matched_identity_components(model, &grids)?;
    FjObject::new(model, grids, components)
}

#[cfg(test)]
mod tests {
    use super::super::model::{compact_p1, jacobi, modular_curve, snc_corner_toy};
    use super::super::object::modular_forms_object;
    use super::*;

    #[test]
    fn unit_object_validates_on_every_builtin() {
        for model in [modular_curve(), compact_p1(), jacobi(), snc_corner_toy()] {
            let unit = unit_object(&model).unwrap();
            assert!(!unit.is_zero(), "{}", model.name);
            for y in model.poset.ids() {
                assert_eq!(
                    unit.stratum(y).evaluate(unit.stratum(y).hi()).total_dim(),
                    1
                );
            }
        }
    }

    #[test]
    fn unit_is_the_weight_zero_forms_object() {
        let model = modular_curve();
        assert_eq!(
            unit_object(&model).unwrap(),
            modular_forms_object(&model, 0, 0).unwrap()
        );
    }

    #[test]
    fn omega_variants_differ_only_at_the_step() {
        let model = modular_curve();
        let cusp = model.by_label("cusp").unwrap();
        let om = omega(&model).unwrap();
        let can = omega_can(&model).unwrap();
        assert!(om.stratum(cusp).evaluate(&[0]).is_zero());
        assert_eq!(om.stratum(cusp).evaluate(&[1]).dim_at(&[1]), 1);
        assert_eq!(can.stratum(cusp).evaluate(&[0]).dim_at(&[1]), 1);
        let m = model.by_label("M").unwrap();
        assert_eq!(om.stratum(m).evaluate(&[]), can.stratum(m).evaluate(&[]));
    }

    #[test]
    fn omega_bar_is_punctual_on_the_boundary() {
        let model = modular_curve();
        let cusp = model.by_label("cusp").unwrap();
        let bar = omega_bar(&model, cusp).unwrap();
        assert!(bar.stratum(model.by_label("M").unwrap()).is_zero());
        assert_eq!(bar.stratum(cusp).evaluate(&[0]).total_dim(), 1);
        assert!(bar.stratum(cusp).evaluate(&[1]).is_zero());
        assert!(!bar.flags(&model).torsion_free);
    }

    #[test]
    fn corner_omega_bars_freeze_the_transverse_directions() {
        let model = snc_corner_toy();
        let y1 = model.by_label("Y1").unwrap();
        let c = model.by_label("C").unwrap();
        let bar = omega_bar(&model, y1).unwrap();
        // on the corner only the Y1-transverse direction is frozen
        assert_eq!(bar.stratum(c).evaluate(&[0, 0]).total_dim(), 1);
        assert_eq!(bar.stratum(c).evaluate(&[0, 4]).total_dim(), 1);
        assert!(bar.stratum(c).evaluate(&[1, 0]).is_zero());
    }

    #[test]
    fn log_differentials_glue_when_restriction_preserves_them() {
        for model in [modular_curve(), compact_p1(), snc_corner_toy()] {
            omega_log_prime(&model).unwrap_or_else(|e| panic!("{}: {e}", model.name));
        }
        assert!(matches!(
            omega_log_prime(&jacobi()),
            Err(FjError::GluingMismatch(_))
        ));
    }

    #[test]
    fn strict_differentials_filter_the_residue_lines() {
        let model = snc_corner_toy();
        let c = model.by_label("C").unwrap();
        let prime = omega_prime(&model).unwrap();
        assert_eq!(prime.stratum(c).evaluate(&[0, 0]).total_dim(), 0);
        assert_eq!(prime.stratum(c).evaluate(&[1, 0]).total_dim(), 1);
        assert_eq!(prime.stratum(c).evaluate(&[1, 0]).dim_at(&[-1, 0]), 1);
        assert_eq!(prime.stratum(c).evaluate(&[1, 1]).total_dim(), 2);

        let modular = modular_curve();
        let cusp = modular.by_label("cusp").unwrap();
        let prime = omega_prime(&modular).unwrap();
        assert!(prime.stratum(cusp).evaluate(&[0]).is_zero());
        assert_eq!(prime.stratum(cusp).evaluate(&[1]).dim_at(&[1]), 1);
    }

    #[test]
    fn first_jets_couple_by_the_character_pairing() {
        let model = modular_curve();
        let m = model.by_label("M").unwrap();
        let cusp = model.by_label("cusp").unwrap();
        for k in [0i64, 4, 12] {
            let jet = jet1(&model, &[k, 0], 1).unwrap();
            let open = jet.stratum(m).evaluate(&[]);
            assert_eq!(open.total_dim(), 2, "k={k}");
            let block = open.op_block(0, &[k, 0]);
            assert_eq!(block, RationalMatrix::new(1, 1, vec![Rat::from_int(k)]));
            assert_eq!(jet.stratum(cusp).evaluate(&[0]).total_dim(), 1);
            assert_eq!(jet.stratum(cusp).evaluate(&[1]).total_dim(), 2);
        }
    }

    #[test]
    fn jet_term_dims_match_differentials_plus_line() {
        let model = modular_curve();
        let k = 4i64;
        let jet = jet1(&model, &[k, 0], 1).unwrap();
        let line = jet1(&model, &[k, 0], 0).unwrap();
        let prime = omega_prime(&model).unwrap();
        for y in model.poset.ids() {
            let g = jet.stratum(y);
            for v in g.window_points() {
                assert_eq!(
                    g.evaluate(&v).total_dim(),
                    prime.stratum(y).evaluate(&v).total_dim()
                        + line.stratum(y).evaluate(&v).total_dim(),
                    "stratum {} degree {v:?}",
                    model.poset.label(y)
                );
            }
        }
    }

    #[test]
    fn unsupported_jet_orders_are_reported() {
        let model = modular_curve();
        assert!(matches!(
            jet1(&model, &[4, 0], 2),
            Err(FjError::UnsupportedJetOrder(2))
        ));
        assert!(matches!(
            jet1(&jacobi(), &[4, 0], 1),
            Err(FjError::GluingMismatch(_))
        ));
        assert!(matches!(
            jet1(&snc_corner_toy(), &[4, 0], 1),
            Err(FjError::NotComputable(_))
        ));
    }
}
