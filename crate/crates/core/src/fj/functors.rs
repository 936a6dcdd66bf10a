//! Restriction, coextension, truncation, tensor product, global sections
//! and boundary expansions.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::coeffs::{
    restrict_restrict_interchange, tensor_restrict_interchange, CoeffMorphism, CoeffObject,
};
use crate::grid::{
    box_points, join, lim_along, meet, tensor_with_inclusions, GridModule,
};
use crate::linalg::RationalMatrix;
use crate::poset::StratumId;

use super::model::FjModel;
use super::morphism::{hom_fj, FjMorphism};
use super::object::{embed_degree, FjObject};
use super::FjError;

/// Value of an object at one stratum and degree.
pub fn restrict_at(obj: &FjObject, y: StratumId, v: &[i64]) -> CoeffObject {
    obj.stratum(y).evaluate(v)
}

/// Coextension of a single coefficient value placed at degree `v` of
/// stratum `y`, supported in degrees at or above `bound`.
///
/// On a stratum `z <= y` the value in degree `w` is the restriction of
/// `value` when `w` lies over the box cut out by `v`, and zero otherwise;
/// strata outside the closure of `y` carry zero.
pub fn coextend(
    model: &FjModel,
    y: StratumId,
    v: &[i64],
    value: &CoeffObject,
    bound: i64,
) -> Result<FjObject, FjError> {
    if v.len() != model.codim(y) {
        return Err(FjError::NotComputable(format!(
            "coextension degree has rank {}, stratum {} has codimension {}",
            v.len(),
            model.poset.label(y),
            model.codim(y)
        )));
    }
    if value.shape() != &model.stratum(y).shape {
        return Err(FjError::NotComputable(
            "coextension value lives in the wrong coefficient category".into(),
        ));
    }
    if v.iter().any(|&c| c < bound) {
        return Err(FjError::KanViolation(format!(
            "coextension degree {v:?} lies below the support bound {bound}"
        )));
    }
    let mut grids = Vec::new();
    for z in model.poset.ids() {
        if !model.poset.leq(z, y) {
            grids.push(GridModule::zero(
                model.stratum(z).shape.clone(),
                model.codim(z),
            ));
            continue;
        }
        let beta = model.poset.beta(z, y).expect("comparable").clone();
        let rv = model.restrict_object(z, y, value)?;
        let rank = model.codim(z);
        let lo = vec![bound; rank];
        let mut hi = vec![bound; rank];
        for j in 0..beta.domain() {
            hi[beta.apply(j)] = v[j] + 1;
        }
        let in_region =
            |w: &[i64]| (0..beta.domain()).all(|j| w[beta.apply(j)] <= v[j]);
        let mut values = BTreeMap::new();
        for w in box_points(&lo, &hi) {
            let val = if in_region(&w) {
                rv.clone()
            } else {
                CoeffObject::zero(rv.shape().clone())
            };
            values.insert(w, val);
        }
        let mut maps = BTreeMap::new();
        for w in box_points(&lo, &hi) {
            for i in 0..rank {
                let mut w2 = w.clone();
                w2[i] += 1;
                if w2.iter().zip(&hi).any(|(a, b)| a > b) {
                    continue;
                }
                let m = if in_region(&w) && in_region(&w2) {
                    CoeffMorphism::identity(&rv)
                } else {
                    CoeffMorphism::zero(values[&w].clone(), values[&w2].clone())
                };
                maps.insert((w.clone(), i), m);
            }
        }
        grids.push(GridModule::from_parts(
            model.stratum(z).shape.clone(),
            lo,
            hi,
            values,
            maps,
        )?);
    }
    let mut components = BTreeMap::new();
    for (zp, yp) in model.comparable_pairs() {
        let beta = model.poset.beta(zp, yp).expect("comparable").clone();
        let pushed = model.alpha_push(zp, yp, &grids[yp])?;
        let limit = lim_along(&grids[zp], &beta);
        let lo = meet(pushed.lo(), limit.lo());
        let hi = join(pushed.hi(), limit.hi());
        let mut comps = BTreeMap::new();
        for w in box_points(&lo, &hi) {
            let s = pushed.evaluate(&w);
            let t = limit.evaluate(&w);
            let c = if s.is_zero() || t.is_zero() {
                CoeffMorphism::zero(s, t)
            } else if yp == y {
                CoeffMorphism::identity(&s)
            } else {
                let a_ypy = model.alpha(yp, y)?;
                let a_zpyp = model.alpha(zp, yp)?;
                restrict_restrict_interchange(value, &a_ypy, &a_zpyp)
                    .inverse()
                    .expect("restriction interchange is a permutation")
            };
            comps.insert(w, c);
        }
        components.insert((zp, yp), comps);
    }
    FjObject::new(model, grids, components)
}

/// Pullback along the inclusion of degrees `>= n` in every direction:
/// values below the bound are dropped to zero, everything else is kept.
pub fn truncate(model: &FjModel, obj: &FjObject, n: i64) -> Result<FjObject, FjError> {
    let mut grids = Vec::new();
    for yid in model.poset.ids() {
        let g = obj.stratum(yid);
        let lo: Vec<i64> = g.lo().iter().map(|&c| c.max(n)).collect();
        let hi: Vec<i64> = g.hi().iter().map(|&c| c.max(n)).collect();
        let mut values = BTreeMap::new();
        let mut maps = BTreeMap::new();
        for w in box_points(&lo, &hi) {
            values.insert(w.clone(), g.evaluate(&w));
            for i in 0..g.rank() {
                let mut w2 = w.clone();
                w2[i] += 1;
                if w2.iter().zip(&hi).all(|(a, b)| a <= b) {
                    maps.insert((w.clone(), i), g.eval_map(&w, &w2)?);
                }
            }
        }
        grids.push(GridModule::from_parts(
            g.shape().clone(),
            lo,
            hi,
            values,
            maps,
        )?);
    }
    let mut components = BTreeMap::new();
    for (z, y) in model.comparable_pairs() {
        let beta = model.poset.beta(z, y).expect("comparable").clone();
        let mu = obj.glue_map(z, y).expect("valid object");
        let pushed = model.alpha_push(z, y, &grids[y])?;
        let limit = lim_along(&grids[z], &beta);
        let lo = meet(pushed.lo(), limit.lo());
        let hi = join(pushed.hi(), limit.hi());
        let comps = box_points(&lo, &hi)
            .into_iter()
            .map(|v| {
                let c = mu.component(&v);
                (v, c)
            })
            .collect();
        components.insert((z, y), comps);
    }
    FjObject::new(model, grids, components)
}

/// Extension by zero from degrees `>= n`.  Objects already supported there
/// extend to themselves; anything with data below the bound is rejected.
pub fn extend_by_zero(model: &FjModel, obj: &FjObject, n: i64) -> Result<FjObject, FjError> {
    for yid in model.poset.ids() {
        let g = obj.stratum(yid);
        for w in g.window_points() {
            if w.iter().any(|&c| c < n) && !g.evaluate(&w).is_zero() {
                return Err(FjError::KanViolation(format!(
                    "{}: nonzero value at {w:?} below the support bound {n}",
                    model.poset.label(yid)
                )));
            }
        }
    }
    Ok(obj.clone())
}

/// Day convolution of two torsion-free objects, with the gluing induced
/// through the ambient tensor of stabilized values.
pub fn tensor_fj(model: &FjModel, f: &FjObject, g: &FjObject) -> Result<FjObject, FjError> {
    // the gluing below passes through fully stabilized values, which only
    // sees a punctual summand as zero; refuse rather than silently drop it
    for (side, obj) in [("left", f), ("right", g)] {
        if !obj.flags(model).torsion_free {
            return Err(FjError::NotTorsionFree(format!(
                "{side} tensor factor has a non-injective structure map"
            )));
        }
    }
    let mut grids = Vec::new();
    let mut incls: Vec<BTreeMap<Vec<i64>, CoeffMorphism>> = Vec::new();
    for yid in model.poset.ids() {
        let (t, inc) = tensor_with_inclusions(f.stratum(yid), g.stratum(yid))?;
        grids.push(t);
        incls.push(inc);
    }
    let mut components = BTreeMap::new();
    for (z, y) in model.comparable_pairs() {
        let a = model.alpha(z, y)?;
        let beta = model.poset.beta(z, y).expect("comparable").clone();
        let muf = f.glue_map(z, y).expect("valid object");
        let mug = g.glue_map(z, y).expect("valid object");
        // fully stabilized components of the factor gluings
        let f_top = join(
            &join(muf.source().hi(), muf.target().hi()),
            &join(mug.source().hi(), mug.target().hi()),
        );
        let muf_top = muf.component(&f_top);
        let mug_top = mug.component(&f_top);
        let fy_top = f.stratum(y).evaluate(f.stratum(y).hi());
        let gy_top = g.stratum(y).evaluate(g.stratum(y).hi());
        let theta = tensor_restrict_interchange(&fy_top, &gy_top, &a);
        let big = muf_top.tensor(&mug_top).after(&theta);
        let pushed = model.alpha_push(z, y, &grids[y])?;
        let limit = lim_along(&grids[z], &beta);
        let lo = meet(pushed.lo(), limit.lo());
        let hi = join(pushed.hi(), limit.hi());
        let mut comps = BTreeMap::new();
        for v in box_points(&lo, &hi) {
            if v.iter().zip(grids[y].lo()).any(|(a, b)| a < b) {
                comps.insert(
                    v.clone(),
                    CoeffMorphism::zero(pushed.evaluate(&v), limit.evaluate(&v)),
                );
                continue;
            }
            let vc = meet(&v, grids[y].hi());
            let e = embed_degree(&grids[z], &beta, &v);
            let ec = meet(&e, grids[z].hi());
            let comp = big
                .after(&model.restrict_morphism(z, y, &incls[y][&vc])?)
                .corestrict(&incls[z][&ec]);
            comps.insert(v.clone(), comp);
        }
        components.insert((z, y), comps);
    }
    FjObject::new(model, grids, components)
}

/// Basis of the space of maps out of the unit object.
pub fn global_sections(model: &FjModel, f: &FjObject) -> Result<Vec<FjMorphism>, FjError> {
    let unit = super::structural::unit_object(model)?;
    hom_fj(model, &unit, f)
}

/// One boundary degree of an expansion: the value dimensions and the matrix
/// of global-section evaluations in the weight-zero block.
#[derive(Clone, Debug, Serialize)]
pub struct ExpansionComponent {
    pub degree: Vec<i64>,
    pub object_dim: usize,
    pub weight_zero_dim: usize,
    pub section_images: RationalMatrix,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExpansionReport {
    pub stratum: String,
    pub num_sections: usize,
    pub components: Vec<ExpansionComponent>,
    /// sections are injectively determined by their expansion at this stratum
    pub injective: bool,
}

/// Expansion of an object along stratum `y`: degreewise values over the
/// window extended one step past its top, with global sections evaluated in
/// the weight-zero block of each degree.
pub fn fj_expansion(
    model: &FjModel,
    f: &FjObject,
    y: StratumId,
) -> Result<ExpansionReport, FjError> {
    let sections = global_sections(model, f)?;
    let grid = f.stratum(y);
    let zero_w = vec![0i64; model.stratum(y).shape.rank];
    let lo = grid.lo().to_vec();
    let hi: Vec<i64> = grid.hi().iter().map(|c| c + 1).collect();
    let mut components = Vec::new();
    let mut stacked = RationalMatrix::zero(0, sections.len());
    for v in box_points(&lo, &hi) {
        let val = grid.evaluate(&v);
        let wz = val.weight_zero_multiplicity();
        let mut images = RationalMatrix::zero(wz, 0);
        for s in &sections {
            let c = s.component(y).component(&v);
            let col = if c.source().total_dim() == 0 {
                RationalMatrix::zero(wz, 1)
            } else {
                c.block(&zero_w)
            };
            images = images.hstack(&col);
        }
        stacked = stacked.vstack(&images);
        components.push(ExpansionComponent {
            degree: v,
            object_dim: val.total_dim(),
            weight_zero_dim: wz,
            section_images: images,
        });
    }
    Ok(ExpansionReport {
        stratum: model.poset.label(y).to_string(),
        num_sections: sections.len(),
        injective: stacked.rank() == sections.len(),
        components,
    })
}
