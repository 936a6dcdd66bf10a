//! Objects: per-stratum grid modules glued along stabilization limits.
//!
//! For each strictly comparable pair `z < y` an object carries an
//! isomorphism from the coefficient restriction of the `y`-grid to the
//! limit of the `z`-grid along the shared boundary directions.  On triple
//! chains the three gluings must close up to the canonical reindexing
//! isomorphisms; [`FjObject::validate`] checks all of it degreewise.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::coeffs::{restrict_restrict_interchange, CoeffMorphism, CoeffObject};
use crate::grid::{
    box_points, join, lim_along, meet, GridFlags, GridModule, GridMorphism,
};
use crate::poset::{Injection, StratumId};

use super::model::FjModel;
use super::FjError;

/// Degree of `m`'s lattice whose `beta`-coordinates are `w` and whose
/// remaining coordinates are stabilized past the window.
pub(crate) fn embed_degree(m: &GridModule, beta: &Injection, w: &[i64]) -> Vec<i64> {
    let mut v: Vec<i64> = m.hi().iter().map(|c| c + 1).collect();
    for (k, &wk) in w.iter().enumerate() {
        v[beta.apply(k)] = wk;
    }
    v
}

/// The four structural predicates of an object, stratum by stratum and
/// in aggregate.
#[derive(Clone, Debug, Serialize)]
pub struct FjFlags {
    pub bounded_below: bool,
    pub coherent: bool,
    pub torsion_free: bool,
    pub locally_free: bool,
    pub per_stratum: Vec<(String, GridFlags)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FjObject {
    strata: Vec<GridModule>,
    glue: BTreeMap<(StratumId, StratumId), GridMorphism>,
}

impl FjObject {
    /// Checked constructor from raw gluing components, one map per degree
    /// of the union box of each comparable pair.
    pub fn new(
        model: &FjModel,
        strata: Vec<GridModule>,
        mut components: BTreeMap<(StratumId, StratumId), BTreeMap<Vec<i64>, CoeffMorphism>>,
    ) -> Result<FjObject, FjError> {
        let mut glue = BTreeMap::new();
        for (z, y) in model.comparable_pairs() {
            let comps = components.remove(&(z, y)).ok_or_else(|| {
                FjError::GluingMismatch(format!(
                    "missing gluing for ({}, {})",
                    model.poset.label(z),
                    model.poset.label(y)
                ))
            })?;
            let beta = model.poset.beta(z, y).expect("comparable pair").clone();
            let pushed = model.alpha_push(z, y, &strata[y])?;
            let limit = lim_along(&strata[z], &beta);
            let mu = GridMorphism::new(pushed, limit, comps).map_err(|e| {
                FjError::GluingMismatch(format!(
                    "pair ({}, {}): {e}",
                    model.poset.label(z),
                    model.poset.label(y)
                ))
            })?;
            glue.insert((z, y), mu);
        }
        if let Some((&(z, y), _)) = components.iter().next() {
            return Err(FjError::GluingMismatch(format!(
                "gluing supplied for a non-comparable pair ({z}, {y})"
            )));
        }
        FjObject::from_parts(model, strata, glue)
    }

    /// Checked constructor from prebuilt gluing morphisms.
    pub fn from_parts(
        model: &FjModel,
        strata: Vec<GridModule>,
        glue: BTreeMap<(StratumId, StratumId), GridMorphism>,
    ) -> Result<FjObject, FjError> {
        let obj = FjObject { strata, glue };
        obj.validate(model)?;
        Ok(obj)
    }

    /// Glue with identities; the restriction of each outer grid must then be
    /// literally equal to the stabilized limit of the inner one.
    pub fn with_identity_glue(
        model: &FjModel,
        strata: Vec<GridModule>,
    ) -> Result<FjObject, FjError> {
        let mut glue = BTreeMap::new();
        for (z, y) in model.comparable_pairs() {
            let beta = model.poset.beta(z, y).expect("comparable pair").clone();
            let pushed = model.alpha_push(z, y, &strata[y])?;
            let limit = lim_along(&strata[z], &beta);
            if pushed != limit {
                return Err(FjError::GluingMismatch(format!(
                    "({}, {}): restriction and limit differ, explicit gluing required",
                    model.poset.label(z),
                    model.poset.label(y)
                )));
            }
            glue.insert((z, y), GridMorphism::identity(&pushed));
        }
        FjObject::from_parts(model, strata, glue)
    }

    /// The zero object.
    pub fn zero(model: &FjModel) -> FjObject {
        let strata: Vec<GridModule> = model
            .poset
            .ids()
            .map(|y| GridModule::zero(model.stratum(y).shape.clone(), model.codim(y)))
            .collect();
        FjObject::with_identity_glue(model, strata).expect("zero object validates")
    }

    pub fn stratum(&self, y: StratumId) -> &GridModule {
        &self.strata[y]
    }

    pub fn strata(&self) -> &[GridModule] {
        &self.strata
    }

    pub fn glue_map(&self, z: StratumId, y: StratumId) -> Option<&GridMorphism> {
        self.glue.get(&(z, y))
    }

    pub fn is_zero(&self) -> bool {
        self.strata.iter().all(GridModule::is_zero)
    }

    pub fn flags(&self, model: &FjModel) -> FjFlags {
        let per_stratum: Vec<(String, GridFlags)> = self
            .strata
            .iter()
            .enumerate()
            .map(|(y, g)| (model.poset.label(y).to_string(), g.flags()))
            .collect();
        let all = |f: fn(&GridFlags) -> bool| per_stratum.iter().all(|(_, g)| f(g));
        FjFlags {
            bounded_below: all(|g| g.bounded_below),
            coherent: all(|g| g.coherent),
            torsion_free: all(|g| g.torsion_free),
            locally_free: all(|g| g.locally_free),
            per_stratum,
        }
    }

    pub fn validate(&self, model: &FjModel) -> Result<(), FjError> {
        model.validate()?;
        if self.strata.len() != model.strata.len() {
            return Err(FjError::GluingMismatch(format!(
                "{} grids for {} strata",
                self.strata.len(),
                model.strata.len()
            )));
        }
        for (y, grid) in self.strata.iter().enumerate() {
            let s = model.stratum(y);
            grid.validate()?;
            if grid.rank() != model.codim(y) {
                return Err(FjError::GluingMismatch(format!(
                    "{}: grid rank {} but codimension {}",
                    s.label,
                    grid.rank(),
                    model.codim(y)
                )));
            }
            if grid.shape() != &s.shape {
                return Err(FjError::GluingMismatch(format!(
                    "{}: grid lives in the wrong coefficient category",
                    s.label
                )));
            }
        }
        let pairs = model.comparable_pairs();
        for key in self.glue.keys() {
            if !pairs.contains(key) {
                return Err(FjError::GluingMismatch(format!(
                    "gluing stored for a non-comparable pair {key:?}"
                )));
            }
        }
        for &(z, y) in &pairs {
            let name = || format!("({}, {})", model.poset.label(z), model.poset.label(y));
            let mu = self
                .glue
                .get(&(z, y))
                .ok_or_else(|| FjError::GluingMismatch(format!("missing gluing for {}", name())))?;
            let beta = model.poset.beta(z, y).expect("comparable pair").clone();
            let pushed = model.alpha_push(z, y, &self.strata[y])?;
            let limit = lim_along(&self.strata[z], &beta);
            if mu.source() != &pushed || mu.target() != &limit {
                return Err(FjError::GluingMismatch(format!(
                    "gluing endpoints for {} are not the restriction and the limit",
                    name()
                )));
            }
            let lo = meet(pushed.lo(), limit.lo());
            let hi = join(pushed.hi(), limit.hi());
            for v in box_points(&lo, &hi) {
                if !mu.component(&v).is_iso() {
                    return Err(FjError::GluingMismatch(format!(
                        "gluing for {} is not invertible at {v:?}",
                        name()
                    )));
                }
            }
        }
        // cocycle on strict chains w < z < y: gluing straight down equals
        // gluing in two steps, compared after pushing into the common
        // stabilized degree of the deepest grid
        for (w, z, y) in model.chains() {
            let beta_zy = model.poset.beta(z, y).expect("chain").clone();
            let beta_wy = model.poset.beta(w, y).expect("chain").clone();
            let beta_wz = model.poset.beta(w, z).expect("chain").clone();
            let a_zy = model.alpha(z, y)?;
            let a_wz = model.alpha(w, z)?;
            let g_zy = &self.glue[&(z, y)];
            let g_wy = &self.glue[&(w, y)];
            let g_wz = &self.glue[&(w, z)];
            let lo = meet(
                &meet(g_zy.source().lo(), g_zy.target().lo()),
                &meet(g_wy.source().lo(), g_wy.target().lo()),
            );
            let hi = join(
                &join(g_zy.source().hi(), g_zy.target().hi()),
                &join(g_wy.source().hi(), g_wy.target().hi()),
            );
            for v in box_points(&lo, &hi) {
                let e = embed_degree(&self.strata[z], &beta_zy, &v);
                let d1 = embed_degree(&self.strata[w], &beta_wy, &v);
                let d2 = embed_degree(&self.strata[w], &beta_wz, &e);
                let d = join(&d1, &d2);
                let lhs = self.strata[w].eval_map(&d1, &d)?.after(&g_wy.component(&v));
                let theta =
                    restrict_restrict_interchange(&self.strata[y].evaluate(&v), &a_zy, &a_wz);
                let rhs = self.strata[w]
                    .eval_map(&d2, &d)?
                    .after(&g_wz.component(&e))
                    .after(&model.restrict_morphism(w, z, &g_zy.component(&v))?)
                    .after(&theta);
                if lhs != rhs {
                    return Err(FjError::GluingMismatch(format!(
                        "cocycle fails on the chain {} <= {} <= {} at degree {v:?}",
                        model.poset.label(w),
                        model.poset.label(z),
                        model.poset.label(y)
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Weight-`k` forms with vanishing order `nu` along the cusp direction.
///
/// The open grid is the canonically extended highest-weight line `(k, 0)`;
/// the cusp grid jumps from zero to the restricted line at degree `nu`.
pub fn modular_forms_object(model: &FjModel, k: i64, nu: i64) -> Result<FjObject, FjError> {
    let m = model.by_label("M")?;
    let cusp = model.by_label("cusp")?;
    let open_line = CoeffObject::line(model.stratum(m).shape.clone(), vec![k, 0]);
    let cusp_line = CoeffObject::line(model.stratum(cusp).shape.clone(), vec![0]);
    let mut strata = vec![GridModule::zero(model.stratum(m).shape.clone(), 0); model.strata.len()];
    strata[m] = crate::grid::canonical_extension(&open_line, 0);
    strata[cusp] = crate::grid::canonical_extension(&cusp_line, 1).translate(&[nu]);
    FjObject::with_identity_glue(model, strata)
}

/// A punctual boundary datum: zero on the open stratum, the weight-`k` line
/// exactly at cusp degree `i`.
pub fn jacobi_object(model: &FjModel, k: i64, i: i64) -> Result<FjObject, FjError> {
    let m = model.by_label("M")?;
    let cusp = model.by_label("cusp")?;
    let peak = CoeffObject::line(model.stratum(cusp).shape.clone(), vec![k]);
    let mut strata: Vec<GridModule> = model
        .poset
        .ids()
        .map(|y| GridModule::zero(model.stratum(y).shape.clone(), model.codim(y)))
        .collect();
    strata[m] = GridModule::zero(model.stratum(m).shape.clone(), 0);
    strata[cusp] = GridModule::skyscraper(peak, vec![i]);
    FjObject::with_identity_glue(model, strata)
}

#[cfg(test)]
mod tests {
    use super::super::model::{jacobi, modular_curve, snc_corner_toy};
    use super::*;
    use crate::coeffs::CoeffShape;
    use crate::grid::canonical_extension;
    use crate::linalg::Rat;

    #[test]
    fn modular_forms_objects_validate() {
        let model = modular_curve();
        for k in [0, 4, 12] {
            for nu in [0, 2] {
                let f = modular_forms_object(&model, k, nu).unwrap();
                let flags = f.flags(&model);
                assert!(flags.locally_free, "k={k} nu={nu}");
                assert!(!f.is_zero());
            }
        }
    }

    #[test]
    fn jacobi_object_is_punctual_torsion() {
        let model = jacobi();
        let f = jacobi_object(&model, 3, 1).unwrap();
        let flags = f.flags(&model);
        assert!(flags.bounded_below);
        assert!(!flags.torsion_free);
        let cusp = model.by_label("cusp").unwrap();
        assert_eq!(f.stratum(cusp).evaluate(&[1]).total_dim(), 1);
        assert_eq!(f.stratum(cusp).evaluate(&[2]).total_dim(), 0);
    }

    #[test]
    fn zero_objects_validate_everywhere() {
        for model in [
            modular_curve(),
            super::super::model::compact_p1(),
            jacobi(),
            snc_corner_toy(),
        ] {
            let z = FjObject::zero(&model);
            assert!(z.is_zero(), "{}", model.name);
            assert!(z.validate(&model).is_ok(), "{}", model.name);
        }
    }

    fn snc_constant_strata(line: &CoeffObject) -> Vec<GridModule> {
        vec![
            canonical_extension(line, 0),
            canonical_extension(line, 1),
            canonical_extension(line, 1),
            canonical_extension(line, 2),
        ]
    }

    #[test]
    fn snc_constant_object_glues_with_identities() {
        let model = snc_corner_toy();
        let line = CoeffObject::line(CoeffShape::torus(2), vec![-1, 2]);
        let f = FjObject::with_identity_glue(&model, snc_constant_strata(&line)).unwrap();
        assert!(f.flags(&model).locally_free);
    }

    #[test]
    fn cocycle_detects_a_sign_flip() {
        let model = snc_corner_toy();
        let line = CoeffObject::line(CoeffShape::torus(2), vec![-1, 2]);
        let (y1, y2) = (model.by_label("Y1").unwrap(), model.by_label("Y2").unwrap());
        let (m, c) = (model.by_label("M").unwrap(), model.by_label("C").unwrap());
        let id = CoeffMorphism::identity(&line);
        let mut comps = BTreeMap::new();
        for pair in [(y1, m), (y2, m), (c, m)] {
            comps.insert(pair, BTreeMap::from([(vec![], id.clone())]));
        }
        comps.insert((c, y2), BTreeMap::from([(vec![0], id.clone())]));
        comps.insert(
            (c, y1),
            BTreeMap::from([(vec![0], id.scale(&Rat::from_int(-1)))]),
        );
        let err = FjObject::new(&model, snc_constant_strata(&line), comps).unwrap_err();
        assert!(matches!(err, FjError::GluingMismatch(msg) if msg.contains("cocycle")));
    }

    #[test]
    fn unequal_sides_need_explicit_glue() {
        let model = modular_curve();
        let m = model.by_label("M").unwrap();
        let cusp = model.by_label("cusp").unwrap();
        let mut strata =
            vec![GridModule::zero(model.stratum(m).shape.clone(), 0); model.strata.len()];
        strata[m] = canonical_extension(
            &CoeffObject::line(model.stratum(m).shape.clone(), vec![2, 0]),
            0,
        );
        strata[cusp] = canonical_extension(
            &CoeffObject::line(model.stratum(cusp).shape.clone(), vec![1]),
            1,
        );
        let err = FjObject::with_identity_glue(&model, strata).unwrap_err();
        assert!(matches!(err, FjError::GluingMismatch(_)));
    }
}
