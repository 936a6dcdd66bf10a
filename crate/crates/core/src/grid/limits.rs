use std::collections::BTreeMap;

use super::{box_points, leq, plus_e, GridModule};
use crate::coeffs::CoeffMorphism;
use crate::poset::Injection;

fn embed(m: &GridModule, beta: &Injection, w: &[i64]) -> Vec<i64> {
    let mut v: Vec<i64> = m.hi().iter().map(|c| c + 1).collect();
    for (k, &wk) in w.iter().enumerate() {
        v[beta.apply(k)] = wk;
    }
    v
}

fn project(beta: &Injection, v: &[i64]) -> Vec<i64> {
    (0..beta.domain()).map(|k| v[beta.apply(k)]).collect()
}

// smallest degree >= v whose beta-coordinates agree with v and whose other
// coordinates are stabilized
fn stab_degree(m: &GridModule, beta: &Injection, v: &[i64]) -> Vec<i64> {
    super::join(v, &embed(m, beta, &project(beta, v)))
}

/// Stabilize the coordinates outside the image of `beta` and reindex the
/// remaining ones through it: `(lim_beta M)(w) = M(beta(w), rest -> +inf)`.
pub fn lim_along(m: &GridModule, beta: &Injection) -> GridModule {
    assert_eq!(beta.codomain(), m.rank(), "injection into the wrong lattice");
    let lo: Vec<i64> = beta.indices().iter().map(|&i| m.lo()[i]).collect();
    let hi: Vec<i64> = beta.indices().iter().map(|&i| m.hi()[i]).collect();
    let mut values = BTreeMap::new();
    let mut maps = BTreeMap::new();
    for w in box_points(&lo, &hi) {
        values.insert(w.clone(), m.evaluate(&embed(m, beta, &w)));
    }
    for w in box_points(&lo, &hi) {
        for k in 0..lo.len() {
            let w2 = plus_e(&w, k);
            if leq(&w2, &hi) {
                let f = m
                    .eval_map(&embed(m, beta, &w), &embed(m, beta, &w2))
                    .expect("embedded degrees are comparable");
                maps.insert((w.clone(), k), f);
            }
        }
    }
    GridModule::from_parts(m.shape().clone(), lo, hi, values, maps)
        .expect("limit inherits commutativity")
}

/// The componentwise family `M(v) -> (lim_beta M)(proj v)`.
///
/// Indexed by the window of `M`; each component is the composite structure
/// map from `v` to its stabilized degree, so the family is natural.
pub struct StabilizationMap {
    source: GridModule,
    target: GridModule,
    beta: Injection,
    components: BTreeMap<Vec<i64>, CoeffMorphism>,
}

impl StabilizationMap {
    pub fn source(&self) -> &GridModule {
        &self.source
    }

    /// The stabilized module `lim_beta M`.
    pub fn target(&self) -> &GridModule {
        &self.target
    }

    pub fn component(&self, v: &[i64]) -> CoeffMorphism {
        if let Some(c) = self.components.get(v) {
            return c.clone();
        }
        self.source
            .eval_map(v, &stab_degree(&self.source, &self.beta, v))
            .expect("stabilized degree dominates")
    }

    /// Naturality of the family over the given box: the square through each
    /// unit step commutes.
    pub fn is_natural_on(&self, lo: &[i64], hi: &[i64]) -> bool {
        for v in box_points(lo, hi) {
            for i in 0..self.source.rank() {
                let w = plus_e(&v, i);
                let left = self.component(&w).after(&self.source.structure_map(&v, i));
                let right = self
                    .target
                    .eval_map(&project(&self.beta, &v), &project(&self.beta, &w))
                    .expect("projections comparable")
                    .after(&self.component(&v));
                if left != right {
                    return false;
                }
            }
        }
        true
    }
}

pub fn stabilization_map(m: &GridModule, beta: &Injection) -> StabilizationMap {
    assert_eq!(beta.codomain(), m.rank());
    let target = lim_along(m, beta);
    let components = box_points(m.lo(), m.hi())
        .into_iter()
        .map(|v| {
            let f = m
                .eval_map(&v, &stab_degree(m, beta, &v))
                .expect("stabilized degree dominates");
            (v, f)
        })
        .collect();
    StabilizationMap {
        source: m.clone(),
        target,
        beta: beta.clone(),
        components,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::{CoeffObject, CoeffShape};
    use crate::grid::canonical_extension;

    #[test]
    fn identity_injection_is_identity() {
        let m = canonical_extension(&CoeffObject::vector_space(2), 2).extend_window(&[-1, 0], &[1, 1]);
        let l = lim_along(&m, &Injection::identity(2));
        assert_eq!(l, m);
    }

    #[test]
    fn full_stabilization_of_canonical_extension() {
        let v = CoeffObject::line(CoeffShape::torus(1), vec![3]);
        let m = canonical_extension(&v, 2);
        let l = lim_along(&m, &Injection::empty(2));
        assert_eq!(l.rank(), 0);
        assert_eq!(l.evaluate(&[]), v);
    }

    #[test]
    fn full_stabilization_of_skyscraper_vanishes() {
        let sky = GridModule::skyscraper(CoeffObject::vector_space(3), vec![0, 0]);
        let l = lim_along(&sky, &Injection::empty(2));
        assert!(l.evaluate(&[]).is_zero());
    }

    #[test]
    fn partial_stabilization_keeps_named_directions() {
        // skyscraper at (0,0): stabilizing coordinate 1 kills the peak,
        // while a canonically extended value survives it
        let sky = GridModule::skyscraper(CoeffObject::vector_space(1), vec![0, 0]);
        let l = lim_along(&sky, &Injection::new(vec![0], 2).unwrap());
        assert_eq!(l.rank(), 1);
        assert!(l.is_zero());

        let ext = canonical_extension(&CoeffObject::vector_space(1), 2);
        let l2 = lim_along(&ext, &Injection::new(vec![0], 2).unwrap());
        assert_eq!(l2.evaluate(&[0]).total_dim(), 1);
        assert_eq!(l2.evaluate(&[-1]).total_dim(), 0);
        assert_eq!(l2.evaluate(&[5]).total_dim(), 1);
    }

    #[test]
    fn stabilization_map_on_canonical_extension_is_iso() {
        let m = canonical_extension(&CoeffObject::vector_space(2), 1).extend_window(&[0], &[2]);
        let s = stabilization_map(&m, &Injection::empty(1));
        assert!(s.component(&[0]).is_iso());
        assert!(s.component(&[2]).is_iso());
        assert!(s.component(&[-1]).is_injective(), "zero into the limit");
        assert!(s.is_natural_on(&[-1], &[3]));
    }

    #[test]
    fn stabilization_map_on_skyscraper_is_zero() {
        let sky = GridModule::skyscraper(CoeffObject::vector_space(1), vec![1]);
        let s = stabilization_map(&sky, &Injection::empty(1));
        assert!(s.target().evaluate(&[]).is_zero());
        assert!(s.component(&[1]).is_zero());
        assert!(s.is_natural_on(&[0], &[3]));
    }

    #[test]
    fn limits_compose_functorially() {
        // gamma: [1] -> [2], beta: [2] -> [3]; lim over missing coordinates
        let shape = CoeffShape::vector_space();
        let mut values = BTreeMap::new();
        let maps = BTreeMap::new();
        values.insert(vec![0, 0, 0], CoeffObject::vector_space(2));
        let m = GridModule::from_parts(shape, vec![0, 0, 0], vec![0, 0, 0], values, maps).unwrap();
        let beta = Injection::new(vec![0, 2], 3).unwrap();
        let gamma = Injection::new(vec![1], 2).unwrap();
        let left = lim_along(&lim_along(&m, &beta), &gamma);
        let right = lim_along(&m, &gamma.then(&beta));
        assert_eq!(left, right);
    }
}
