//! Morphisms, hom spaces and the Abelian operations.
//!
//! A morphism is a grid morphism per stratum commuting with the gluing
//! isomorphisms of its endpoints.  Hom spaces are computed as the equalizer
//! of the stratum-wise hom spaces under those compatibility constraints;
//! kernels, cokernels and images are taken degreewise and re-glued, then
//! validated from scratch.

use std::collections::BTreeMap;

use crate::coeffs::{AffineExpr, CoeffMorphism, VarSystem};
use crate::grid::{
    box_points, grid_hom_basis, join, lim_along, meet, sub_quotient, GridModule, GridMorphism,
    SubQuotientKind,
};
use crate::linalg::Rat;
use crate::poset::{Injection, StratumId};

use super::model::FjModel;
use super::object::FjObject;
use super::FjError;

/// Degree of the common lattice of `a` and `b` whose `beta`-coordinates are
/// `v` and whose remaining coordinates stabilize both grids.
pub(crate) fn joint_embed(a: &GridModule, b: &GridModule, beta: &Injection, v: &[i64]) -> Vec<i64> {
    let mut e: Vec<i64> = a
        .hi()
        .iter()
        .zip(b.hi())
        .map(|(x, y)| x.max(y) + 1)
        .collect();
    for (k, &vk) in v.iter().enumerate() {
        e[beta.apply(k)] = vk;
    }
    e
}

/// Union box of the component domains of two gluing morphisms.
fn pair_box(f: &GridMorphism, g: &GridMorphism) -> (Vec<i64>, Vec<i64>) {
    let lo = meet(
        &meet(f.source().lo(), f.target().lo()),
        &meet(g.source().lo(), g.target().lo()),
    );
    let hi = join(
        &join(f.source().hi(), f.target().hi()),
        &join(g.source().hi(), g.target().hi()),
    );
    (lo, hi)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FjMorphism {
    source: FjObject,
    target: FjObject,
    components: Vec<GridMorphism>,
}

impl FjMorphism {
    pub fn new(
        model: &FjModel,
        source: FjObject,
        target: FjObject,
        components: Vec<GridMorphism>,
    ) -> Result<FjMorphism, FjError> {
        let phi = FjMorphism {
            source,
            target,
            components,
        };
        phi.validate(model)?;
        Ok(phi)
    }

    pub fn source(&self) -> &FjObject {
        &self.source
    }

    pub fn target(&self) -> &FjObject {
        &self.target
    }

    pub fn component(&self, y: StratumId) -> &GridMorphism {
        &self.components[y]
    }

    pub fn zero(source: &FjObject, target: &FjObject) -> FjMorphism {
        let components = source
            .strata()
            .iter()
            .zip(target.strata())
            .map(|(f, g)| GridMorphism::zero(f.clone(), g.clone()))
            .collect();
        FjMorphism {
            source: source.clone(),
            target: target.clone(),
            components,
        }
    }

    pub fn identity(obj: &FjObject) -> FjMorphism {
        FjMorphism {
            source: obj.clone(),
            target: obj.clone(),
            components: obj.strata().iter().map(GridMorphism::identity).collect(),
        }
    }

    /// `self ∘ first`; composites of valid morphisms stay valid.
    pub fn after(&self, first: &FjMorphism) -> FjMorphism {
        let components = self
            .components
            .iter()
            .zip(&first.components)
            .map(|(g, f)| g.after(f))
            .collect();
        FjMorphism {
            source: first.source.clone(),
            target: self.target.clone(),
            components,
        }
    }

    pub fn add(&self, other: &FjMorphism) -> FjMorphism {
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.add(b))
            .collect();
        FjMorphism {
            source: self.source.clone(),
            target: self.target.clone(),
            components,
        }
    }

    pub fn scale(&self, c: &Rat) -> FjMorphism {
        FjMorphism {
            source: self.source.clone(),
            target: self.target.clone(),
            components: self.components.iter().map(|f| f.scale(c)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(GridMorphism::is_zero)
    }

    pub fn is_iso(&self) -> bool {
        self.components.iter().all(GridMorphism::is_iso)
    }

    pub fn validate(&self, model: &FjModel) -> Result<(), FjError> {
        if self.components.len() != model.strata.len() {
            return Err(FjError::GluingMismatch(format!(
                "{} components for {} strata",
                self.components.len(),
                model.strata.len()
            )));
        }
        for (y, c) in self.components.iter().enumerate() {
            if c.source() != self.source.stratum(y) || c.target() != self.target.stratum(y) {
                return Err(FjError::GluingMismatch(format!(
                    "component endpoints wrong over {}",
                    model.poset.label(y)
                )));
            }
        }
        for (z, y) in model.comparable_pairs() {
            let beta = model.poset.beta(z, y).expect("comparable pair").clone();
            let muf = self.source.glue_map(z, y).ok_or_else(|| {
                FjError::GluingMismatch("source misses a gluing".into())
            })?;
            let mug = self.target.glue_map(z, y).ok_or_else(|| {
                FjError::GluingMismatch("target misses a gluing".into())
            })?;
            let (lo, hi) = pair_box(muf, mug);
            for v in box_points(&lo, &hi) {
                let e = joint_embed(self.source.stratum(z), self.target.stratum(z), &beta, &v);
                let lhs = mug
                    .component(&v)
                    .after(&model.restrict_morphism(z, y, &self.components[y].component(&v))?);
                let rhs = self.components[z].component(&e).after(&muf.component(&v));
                if lhs != rhs {
                    return Err(FjError::GluingMismatch(format!(
                        "morphism does not commute with the gluing of ({}, {}) at {v:?}",
                        model.poset.label(z),
                        model.poset.label(y)
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Basis of the hom space between two objects.
///
/// One scalar unknown per stratum-wise hom basis element; every comparable
/// pair contributes one linear constraint per degree, weight and entry.
pub fn hom_fj(
    model: &FjModel,
    source: &FjObject,
    target: &FjObject,
) -> Result<Vec<FjMorphism>, FjError> {
    let mut sys = VarSystem::new();
    let mut bases: Vec<Vec<GridMorphism>> = Vec::new();
    let mut vars: Vec<Vec<AffineExpr>> = Vec::new();
    for y in model.poset.ids() {
        let b = grid_hom_basis(source.stratum(y), target.stratum(y));
        vars.push(b.iter().map(|_| sys.fresh_var()).collect());
        bases.push(b);
    }
    for (z, y) in model.comparable_pairs() {
        let beta = model.poset.beta(z, y).expect("comparable pair").clone();
        let muf = source.glue_map(z, y).expect("valid source");
        let mug = target.glue_map(z, y).expect("valid target");
        let (lo, hi) = pair_box(muf, mug);
        for v in box_points(&lo, &hi) {
            let e = joint_embed(source.stratum(z), target.stratum(z), &beta, &v);
            let cs: Vec<CoeffMorphism> = bases[y]
                .iter()
                .map(|b| {
                    Ok(mug
                        .component(&v)
                        .after(&model.restrict_morphism(z, y, &b.component(&v))?))
                })
                .collect::<Result<_, FjError>>()?;
            let ds: Vec<CoeffMorphism> = bases[z]
                .iter()
                .map(|b| b.component(&e).after(&muf.component(&v)))
                .collect();
            let template = match cs.first().or_else(|| ds.first()) {
                Some(t) => t,
                None => continue,
            };
            let src = template.source().clone();
            let tgt = template.target().clone();
            for (w, &sd) in src.components() {
                let td = tgt.dim_at(w);
                if td == 0 {
                    continue;
                }
                let cb: Vec<_> = cs.iter().map(|m| m.block(w)).collect();
                let db: Vec<_> = ds.iter().map(|m| m.block(w)).collect();
                for r in 0..td {
                    for c in 0..sd {
                        let mut expr = AffineExpr::constant(Rat::zero());
                        for (i, b) in cb.iter().enumerate() {
                            expr = expr.add(&vars[y][i].scale(&b[(r, c)]));
                        }
                        for (j, b) in db.iter().enumerate() {
                            expr = expr.sub(&vars[z][j].scale(&b[(r, c)]));
                        }
                        sys.require_zero(&expr);
                    }
                }
            }
        }
    }
    let sol = sys.solve().expect("homogeneous system is consistent");
    let mut out = Vec::new();
    for col in 0..sol.kernel.cols() {
        let assignment = sol.kernel.col(col);
        let mut components = Vec::new();
        for y in model.poset.ids() {
            let mut acc =
                GridMorphism::zero(source.stratum(y).clone(), target.stratum(y).clone());
            for (i, b) in bases[y].iter().enumerate() {
                let cval = vars[y][i].eval(&assignment);
                if !cval.is_zero() {
                    acc = acc.add(&b.scale(&cval));
                }
            }
            components.push(acc);
        }
        out.push(FjMorphism::new(
            model,
            source.clone(),
            target.clone(),
            components,
        )?);
    }
    Ok(out)
}

/// Kernel, cokernel or image of a morphism, with its edge map into or out of
/// the ambient object.  Gluing is induced degreewise and the result is
/// validated in full before being returned.
pub fn ab_ops(
    model: &FjModel,
    phi: &FjMorphism,
    kind: SubQuotientKind,
) -> Result<(FjObject, FjMorphism), FjError> {
    let mut modules = Vec::new();
    let mut edges = Vec::new();
    for y in model.poset.ids() {
        let (m, e) = sub_quotient(phi.component(y), kind);
        modules.push(m);
        edges.push(e);
    }
    let ambient = match kind {
        SubQuotientKind::Kernel => phi.source(),
        _ => phi.target(),
    };
    let mut components: BTreeMap<(StratumId, StratumId), BTreeMap<Vec<i64>, CoeffMorphism>> =
        BTreeMap::new();
    for (z, y) in model.comparable_pairs() {
        let beta = model.poset.beta(z, y).expect("comparable pair").clone();
        let mu_amb = ambient.glue_map(z, y).expect("valid ambient");
        let pushed = model.alpha_push(z, y, &modules[y])?;
        let limit = lim_along(&modules[z], &beta);
        let lo = meet(pushed.lo(), limit.lo());
        let hi = join(pushed.hi(), limit.hi());
        let mut comps = BTreeMap::new();
        for v in box_points(&lo, &hi) {
            let e = joint_embed(&modules[z], ambient.stratum(z), &beta, &v);
            let induced = match kind {
                SubQuotientKind::Cokernel => edges[z]
                    .component(&e)
                    .after(&mu_amb.component(&v))
                    .descend_along(&model.restrict_morphism(z, y, &edges[y].component(&v))?),
                _ => mu_amb
                    .component(&v)
                    .after(&model.restrict_morphism(z, y, &edges[y].component(&v))?)
                    .corestrict(&edges[z].component(&e)),
            };
            comps.insert(v, induced);
        }
        components.insert((z, y), comps);
    }
    let obj = FjObject::new(model, modules, components)?;
    let edge = match kind {
        SubQuotientKind::Cokernel => {
            FjMorphism::new(model, ambient.clone(), obj.clone(), edges)?
        }
        _ => FjMorphism::new(model, obj.clone(), ambient.clone(), edges)?,
    };
    Ok((obj, edge))
}


#[cfg(test)]
mod tests {
    use super::super::model::{jacobi, modular_curve};
    use super::super::object::{jacobi_object, modular_forms_object};
    use super::*;

    #[test]
    fn endomorphisms_of_forms_are_scalars() {
        let model = modular_curve();
        let f = modular_forms_object(&model, 4, 0).unwrap();
        let endos = hom_fj(&model, &f, &f).unwrap();
        assert_eq!(endos.len(), 1);
        assert!(endos[0].is_iso());
    }

    #[test]
    fn vanishing_order_filtration() {
        let model = modular_curve();
        let f1 = modular_forms_object(&model, 4, 1).unwrap();
        let f0 = modular_forms_object(&model, 4, 0).unwrap();
        assert_eq!(hom_fj(&model, &f1, &f0).unwrap().len(), 1, "inclusion");
        assert_eq!(hom_fj(&model, &f0, &f1).unwrap().len(), 0, "no section back");
    }

    #[test]
    fn punctual_homs_separate_degrees() {
        let model = jacobi();
        let a = jacobi_object(&model, 3, 1).unwrap();
        let b = jacobi_object(&model, 3, 2).unwrap();
        assert_eq!(hom_fj(&model, &a, &a).unwrap().len(), 1);
        assert_eq!(hom_fj(&model, &a, &b).unwrap().len(), 0);
    }

    #[test]
    fn cokernel_of_the_filtration_step_is_punctual() {
        let model = modular_curve();
        let f1 = modular_forms_object(&model, 4, 1).unwrap();
        let f0 = modular_forms_object(&model, 4, 0).unwrap();
        let incl = hom_fj(&model, &f1, &f0).unwrap().remove(0);
        let (ker, _) = ab_ops(&model, &incl, SubQuotientKind::Kernel).unwrap();
        assert!(ker.is_zero());
        let (coker, proj) = ab_ops(&model, &incl, SubQuotientKind::Cokernel).unwrap();
        let cusp = model.by_label("cusp").unwrap();
        let m = model.by_label("M").unwrap();
        assert!(coker.stratum(m).is_zero());
        assert_eq!(coker.stratum(cusp).evaluate(&[0]).total_dim(), 1);
        assert_eq!(coker.stratum(cusp).evaluate(&[1]).total_dim(), 0);
        assert!(!coker.flags(&model).torsion_free);
        assert!(proj.validate(&model).is_ok());
        let (im, _) = ab_ops(&model, &incl, SubQuotientKind::Image).unwrap();
        assert_eq!(im.stratum(cusp).evaluate(&[1]).total_dim(), 1);
        assert_eq!(im.stratum(cusp).evaluate(&[0]).total_dim(), 0);
    }

    #[test]
    fn composition_and_arithmetic_stay_valid() {
        let model = modular_curve();
        let f = modular_forms_object(&model, 4, 0).unwrap();
        let id = FjMorphism::identity(&f);
        let double = id.add(&id);
        assert!(double.validate(&model).is_ok());
        assert!(double.after(&double).scale(&Rat::new(1, 4)).is_iso());
        assert!(FjMorphism::zero(&f, &f).validate(&model).is_ok());
    }
}
