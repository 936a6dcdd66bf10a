use std::collections::BTreeMap;

use super::{box_points, join, leq, meet, plus_e, GridError, GridModule};
use crate::coeffs::{CoeffMorphism, ExprMatrix, VarSystem, Weight};
use crate::linalg::Rat;

/// A natural transformation between grid modules of equal rank.
///
/// Components are stored on the union box of the two windows; outside it the
/// Kan rules determine them (zero below, clamped above).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GridMorphism {
    source: GridModule,
    target: GridModule,
    lo: Vec<i64>,
    hi: Vec<i64>,
    components: BTreeMap<Vec<i64>, CoeffMorphism>,
}

impl GridMorphism {
    /// Checked constructor; `components` must cover the union box of the two
    /// windows and commute with all structure maps.
    pub fn new(
        source: GridModule,
        target: GridModule,
        components: BTreeMap<Vec<i64>, CoeffMorphism>,
    ) -> Result<Self, GridError> {
        if source.rank() != target.rank() {
            return Err(GridError::RankMismatch {
                left: source.rank(),
                right: target.rank(),
            });
        }
        let lo = meet(source.lo(), target.lo());
        let hi = join(source.hi(), target.hi());
        let m = GridMorphism {
            source,
            target,
            lo,
            hi,
            components,
        };
        m.validate()?;
        Ok(m)
    }

    fn validate(&self) -> Result<(), GridError> {
        let points = box_points(&self.lo, &self.hi);
        if self.components.len() != points.len() {
            return Err(GridError::BadComponent(format!(
                "{} components for a box of {} points",
                self.components.len(),
                points.len()
            )));
        }
        for v in &points {
            let c = self
                .components
                .get(v)
                .ok_or_else(|| GridError::BadComponent(format!("missing component at {v:?}")))?;
            if c.source() != &self.source.evaluate(v) || c.target() != &self.target.evaluate(v) {
                return Err(GridError::BadComponent(format!(
                    "component endpoints wrong at {v:?}"
                )));
            }
        }
        for v in &points {
            for i in 0..self.rank() {
                let w = plus_e(v, i);
                let left = self
                    .component(&w)
                    .after(&self.source.eval_map(v, &w).expect("step"));
                let right = self
                    .target
                    .eval_map(v, &w)
                    .expect("step")
                    .after(&self.component(v));
                if left != right {
                    return Err(GridError::BadComponent(format!(
                        "naturality fails at {v:?} direction {i}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn rank(&self) -> usize {
        self.lo.len()
    }

    pub fn source(&self) -> &GridModule {
        &self.source
    }

    pub fn target(&self) -> &GridModule {
        &self.target
    }

    /// Component at an arbitrary degree under Kan semantics.
    pub fn component(&self, v: &[i64]) -> CoeffMorphism {
        if v.iter().zip(&self.lo).any(|(a, b)| a < b) {
            return CoeffMorphism::zero(self.source.evaluate(v), self.target.evaluate(v));
        }
        self.components[&meet(v, &self.hi)].clone()
    }

    pub fn zero(source: GridModule, target: GridModule) -> Self {
        assert_eq!(source.rank(), target.rank());
        let lo = meet(source.lo(), target.lo());
        let hi = join(source.hi(), target.hi());
        let components = box_points(&lo, &hi)
            .into_iter()
            .map(|v| {
                let c = CoeffMorphism::zero(source.evaluate(&v), target.evaluate(&v));
                (v, c)
            })
            .collect();
        GridMorphism {
            source,
            target,
            lo,
            hi,
            components,
        }
    }

    pub fn identity(m: &GridModule) -> Self {
        let components = box_points(m.lo(), m.hi())
            .into_iter()
            .map(|v| {
                let c = CoeffMorphism::identity(&m.evaluate(&v));
                (v, c)
            })
            .collect();
        GridMorphism {
            source: m.clone(),
            target: m.clone(),
            lo: m.lo().to_vec(),
            hi: m.hi().to_vec(),
            components,
        }
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &GridMorphism) -> GridMorphism {
        let lo = meet(&self.lo, &first.lo);
        let hi = join(&self.hi, &first.hi);
        let components = box_points(&lo, &hi)
            .into_iter()
            .map(|v| {
                let c = self.component(&v).after(&first.component(&v));
                (v, c)
            })
            .collect();
        GridMorphism {
            source: first.source.clone(),
            target: self.target.clone(),
            lo,
            hi,
            components,
        }
    }

    pub fn add(&self, other: &GridMorphism) -> GridMorphism {
        let lo = meet(&self.lo, &other.lo);
        let hi = join(&self.hi, &other.hi);
        let components = box_points(&lo, &hi)
            .into_iter()
            .map(|v| {
                let c = self.component(&v).add(&other.component(&v));
                (v, c)
            })
            .collect();
        GridMorphism {
            source: self.source.clone(),
            target: self.target.clone(),
            lo,
            hi,
            components,
        }
    }

    pub fn scale(&self, c: &Rat) -> GridMorphism {
        let components = self
            .components
            .iter()
            .map(|(v, f)| (v.clone(), f.scale(c)))
            .collect();
        GridMorphism {
            components,
            ..self.clone()
        }
    }

    pub fn is_zero(&self) -> bool {
        self.components.values().all(CoeffMorphism::is_zero)
    }

    pub fn is_injective(&self) -> bool {
        self.components.values().all(CoeffMorphism::is_injective)
    }

    pub fn is_surjective(&self) -> bool {
        self.components.values().all(CoeffMorphism::is_surjective)
    }

    pub fn is_iso(&self) -> bool {
        self.components.values().all(CoeffMorphism::is_iso)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SubQuotientKind {
    Kernel,
    Cokernel,
    Image,
}

/// Degreewise kernel, cokernel or image, with the induced structure maps.
/// Returns the module together with the inclusion (kernel, image) or
/// projection (cokernel).
pub fn sub_quotient(phi: &GridMorphism, kind: SubQuotientKind) -> (GridModule, GridMorphism) {
    let lo = phi.lo.clone();
    let hi = phi.hi.clone();
    let shape = phi.source.shape().clone();
    let mut values = BTreeMap::new();
    let mut edges = BTreeMap::new();
    let mut maps = BTreeMap::new();
    for v in box_points(&lo, &hi) {
        let comp = phi.component(&v);
        let (obj, edge) = match kind {
            SubQuotientKind::Kernel => comp.kernel(),
            SubQuotientKind::Cokernel => comp.cokernel(),
            SubQuotientKind::Image => comp.image(),
        };
        values.insert(v.clone(), obj);
        edges.insert(v, edge);
    }
    for v in box_points(&lo, &hi) {
        for i in 0..lo.len() {
            let w = plus_e(&v, i);
            if !leq(&w, &hi) {
                continue;
            }
            let induced = match kind {
                SubQuotientKind::Kernel => {
                    // K(v) -> source(v) -> source(w), then corestrict to K(w)
                    phi.source
                        .eval_map(&v, &w)
                        .expect("step")
                        .after(&edges[&v])
                        .corestrict(&edges[&w])
                }
                SubQuotientKind::Image => phi
                    .target
                    .eval_map(&v, &w)
                    .expect("step")
                    .after(&edges[&v])
                    .corestrict(&edges[&w]),
                SubQuotientKind::Cokernel => {
                    // descend target(v) -> target(w) -> C(w) along the epi
                    edges[&w]
                        .after(&phi.target.eval_map(&v, &w).expect("step"))
                        .descend_along(&edges[&v])
                }
            };
            maps.insert((v.clone(), i), induced);
        }
    }
    let module = GridModule::from_parts(shape, lo, hi, values, maps)
        .expect("degreewise construction is natural");
    let ambient = match kind {
        SubQuotientKind::Kernel => phi.source.clone(),
        _ => phi.target.clone(),
    };
    let edge_morphism = match kind {
        SubQuotientKind::Cokernel => GridMorphism::new(ambient, module.clone(), edges)
            .expect("projection is natural"),
        _ => GridMorphism::new(module.clone(), ambient, edges).expect("inclusion is natural"),
    };
    (module, edge_morphism)
}

/// Basis of the space of natural transformations `source -> target`.
///
/// Unknown blocks live on the union box; naturality beyond it is forced by
/// the Kan rules, so the finite system is complete.
pub fn grid_hom_basis(source: &GridModule, target: &GridModule) -> Vec<GridMorphism> {
    assert_eq!(source.rank(), target.rank(), "hom between equal ranks");
    assert_eq!(source.shape(), target.shape(), "hom between equal shapes");
    let lo = meet(source.lo(), target.lo());
    let hi = join(source.hi(), target.hi());
    let mut sys = VarSystem::new();
    // unknown per (point, weight)
    let mut unknowns: BTreeMap<(Vec<i64>, Weight), ExprMatrix> = BTreeMap::new();
    let points = box_points(&lo, &hi);
    for v in &points {
        let s = source.evaluate(v);
        let t = target.evaluate(v);
        for (w, &sd) in s.components() {
            let td = t.dim_at(w);
            if td > 0 {
                unknowns.insert((v.clone(), w.clone()), sys.fresh_matrix(td, sd));
            }
        }
    }
    let block_of = |unknowns: &BTreeMap<(Vec<i64>, Weight), ExprMatrix>,
                    v: &[i64],
                    w: &Weight,
                    t: usize,
                    s: usize| {
        unknowns
            .get(&(v.to_vec(), w.clone()))
            .cloned()
            .unwrap_or_else(|| {
                ExprMatrix::from_const(&crate::linalg::RationalMatrix::zero(t, s))
            })
    };
    let shape = source.shape().clone();
    for v in &points {
        let s = source.evaluate(v);
        let t = target.evaluate(v);
        // operator equivariance at v
        for (k, shift) in shape.op_shifts.iter().enumerate() {
            for (w, &sd) in s.components() {
                let ws = crate::coeffs::weight_add(w, shift);
                let f_w = block_of(&unknowns, v, w, t.dim_at(w), sd);
                let f_ws = block_of(&unknowns, v, &ws, t.dim_at(&ws), s.dim_at(&ws));
                let lhs = f_w.lmul(&t.op_block(k, w));
                let rhs = f_ws.rmul(&s.op_block(k, w));
                sys.require_eq(&lhs, &rhs);
            }
        }
        // naturality along each direction
        for i in 0..source.rank() {
            let vv = plus_e(v, i);
            let s_step = source.eval_map(v, &vv).expect("step");
            let t_step = target.eval_map(v, &vv).expect("step");
            let s2 = source.evaluate(&vv);
            let t2 = target.evaluate(&vv);
            let cv = meet(&vv, &hi);
            for (w, &sd) in s.components() {
                let f_v = block_of(&unknowns, v, w, t.dim_at(w), sd);
                let f_vv = block_of(&unknowns, &cv, w, t2.dim_at(w), s2.dim_at(w));
                let lhs = f_vv.rmul(&s_step.block(w));
                let rhs = f_v.lmul(&t_step.block(w));
                sys.require_eq(&lhs, &rhs);
            }
            // source may be zero at v but not at vv; those constraints are
            // vacuous, and target-side weights absent from s contribute none
        }
    }
    let sol = sys.solve().expect("homogeneous system");
    let mut out = Vec::new();
    for jv in 0..sol.kernel.cols() {
        let assignment = sol.kernel.col(jv);
        let mut components = BTreeMap::new();
        for v in &points {
            let s = source.evaluate(v);
            let t = target.evaluate(v);
            let mut blocks = BTreeMap::new();
            for (w, _) in s.components() {
                if let Some(um) = unknowns.get(&(v.clone(), w.clone())) {
                    blocks.insert(w.clone(), um.eval(&assignment));
                }
            }
            let c = CoeffMorphism::new(s, t, blocks).expect("solver output equivariant");
            components.insert(v.clone(), c);
        }
        out.push(
            GridMorphism::new(source.clone(), target.clone(), components)
                .expect("solver output natural"),
        );
    }
    out
}
