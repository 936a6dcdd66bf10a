use std::collections::BTreeMap;

use super::{box_points, join, GridError, GridModule};
use crate::coeffs::{sub_from_spans, CoeffMorphism, CoeffObject, CoeffShape, Weight};
use crate::linalg::RationalMatrix;

/// Monoidal unit: the constant line in weight zero, supported in degrees >= 0.
pub fn unit_module(shape: &CoeffShape, rank: usize) -> GridModule {
    let unit = CoeffObject::line(shape.clone(), vec![0; shape.rank]);
    super::canonical_extension(&unit, rank)
}

// image of M(v1) (x) N(v2) inside L_M (x) L_N, keyed by ambient weight
fn pure_tensor_span(
    m: &GridModule,
    n: &GridModule,
    v1: &[i64],
    v2: &[i64],
    ambient: &CoeffObject,
) -> BTreeMap<Weight, RationalMatrix> {
    let im = m
        .eval_map(v1, &join(v1, m.hi()))
        .expect("degree dominated by its join with hi");
    let inn = n
        .eval_map(v2, &join(v2, n.hi()))
        .expect("degree dominated by its join with hi");
    let big = im.tensor(&inn);
    let mut out = BTreeMap::new();
    for (w, &d) in ambient.components() {
        if d == 0 {
            continue;
        }
        let b = big.block(w);
        if b.cols() > 0 {
            out.insert(w.clone(), b);
        }
    }
    out
}

/// Day convolution of two torsion-free modules.
///
/// Both inputs embed degreewise into their stabilized values `L_M = M(hi)`
/// and `L_N = N(hi)`; the tensor product in degree `v` is the sum of the
/// images of `M(v1) (x) N(v2)` over `v1 + v2 = v` inside `L_M (x) L_N`,
/// with structure maps induced by the inclusions.  Inputs with torsion are
/// rejected: their degreewise values do not embed anywhere common, and the
/// convolution formula would silently discard them.
pub fn tensor(m: &GridModule, n: &GridModule) -> Result<GridModule, GridError> {
    tensor_with_inclusions(m, n).map(|(t, _)| t)
}

/// As [`tensor`], also returning the inclusion of each window value into the
/// ambient object `L_M (x) L_N`.
pub(crate) fn tensor_with_inclusions(
    m: &GridModule,
    n: &GridModule,
) -> Result<(GridModule, BTreeMap<Vec<i64>, CoeffMorphism>), GridError> {
    if m.rank() != n.rank() {
        return Err(GridError::RankMismatch {
            left: m.rank(),
            right: n.rank(),
        });
    }
    if m.shape() != n.shape() {
        return Err(GridError::Coeff(crate::coeffs::CoeffError::ShapeMismatch(
            "tensor factors live over different coefficient shapes".into(),
        )));
    }
    if !m.flags().torsion_free {
        return Err(GridError::NotTorsionFree("left tensor factor".into()));
    }
    if !n.flags().torsion_free {
        return Err(GridError::NotTorsionFree("right tensor factor".into()));
    }
    let rank = m.rank();
    let ambient = m.evaluate(m.hi()).tensor(&n.evaluate(n.hi()));
    let lo: Vec<i64> = m.lo().iter().zip(n.lo()).map(|(a, b)| a + b).collect();
    let hi: Vec<i64> = m.hi().iter().zip(n.hi()).map(|(a, b)| a + b).collect();

    let mut values = BTreeMap::new();
    let mut incls: BTreeMap<Vec<i64>, CoeffMorphism> = BTreeMap::new();
    for v in box_points(&lo, &hi) {
        let mut spans: BTreeMap<Weight, Vec<RationalMatrix>> = BTreeMap::new();
        let v1_hi: Vec<i64> = (0..rank)
            .map(|i| (v[i] - n.lo()[i]).min(m.hi()[i]))
            .collect();
        for v1 in box_points(m.lo(), &v1_hi) {
            let v2: Vec<i64> = (0..rank).map(|i| v[i] - v1[i]).collect();
            for (w, b) in pure_tensor_span(m, n, &v1, &v2, &ambient) {
                spans.entry(w).or_default().push(b);
            }
        }
        let spans: BTreeMap<Weight, RationalMatrix> = spans
            .into_iter()
            .map(|(w, mats)| {
                let mut it = mats.into_iter();
                let first = it.next().expect("nonempty by construction");
                (w, it.fold(first, |acc, b| acc.hstack(&b)))
            })
            .collect();
        let (value, incl) = sub_from_spans(&ambient, &spans)?;
        values.insert(v.clone(), value);
        incls.insert(v, incl);
    }

    let mut maps = BTreeMap::new();
    for (v, incl) in &incls {
        for i in 0..rank {
            let w = super::plus_e(v, i);
            if let Some(incl_next) = incls.get(&w) {
                // spans grow with the degree, so the inclusion factors
                maps.insert((v.clone(), i), incl.corestrict(incl_next));
            }
        }
    }
    let module = GridModule::from_parts(m.shape().clone(), lo, hi, values, maps)?;
    Ok((module, incls))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::CoeffMorphism;
    use crate::grid::canonical_extension;
    use crate::linalg::Subspace;

    fn step(degree: i64) -> GridModule {
        canonical_extension(&CoeffObject::vector_space(1), 1).translate(&[degree])
    }

    fn twisted_step(degree: i64, weight: i64) -> GridModule {
        let line = CoeffObject::line(CoeffShape::torus(1), vec![weight]);
        canonical_extension(&line, 1).translate(&[degree])
    }

    #[test]
    fn unit_law_on_dimensions_and_maps() {
        let m = {
            let mut values = BTreeMap::new();
            let mut maps = BTreeMap::new();
            values.insert(vec![0], CoeffObject::vector_space(1));
            values.insert(vec![1], CoeffObject::vector_space(2));
            let f = CoeffMorphism::new_unchecked(
                CoeffObject::vector_space(1),
                CoeffObject::vector_space(2),
                BTreeMap::from([(
                    vec![],
                    RationalMatrix::from_i64(&[&[1], &[1]]),
                )]),
            );
            maps.insert((vec![0], 0), f.unwrap());
            GridModule::from_parts(CoeffShape::vector_space(), vec![0], vec![1], values, maps)
                .unwrap()
        };
        let u = unit_module(&CoeffShape::vector_space(), 1);
        let t = tensor(&u, &m).unwrap();
        assert_eq!(t.lo(), m.lo());
        assert_eq!(t.hi(), m.hi());
        for v in [vec![-1], vec![0], vec![1], vec![4]] {
            assert_eq!(t.evaluate(&v).total_dim(), m.evaluate(&v).total_dim());
        }
        let tm = t.structure_map(&[0], 0);
        assert!(tm.is_injective());
        let t2 = tensor(&m, &u).unwrap();
        for v in [vec![0], vec![1]] {
            assert_eq!(t2.evaluate(&v).total_dim(), m.evaluate(&v).total_dim());
        }
    }

    #[test]
    fn steps_tensor_to_a_shifted_step() {
        let t = tensor(&step(1), &step(2)).unwrap();
        assert_eq!(t.evaluate(&[2]).total_dim(), 0);
        assert_eq!(t.evaluate(&[3]).total_dim(), 1);
        assert_eq!(t.evaluate(&[7]).total_dim(), 1);
        assert!(t.flags().locally_free);
    }

    #[test]
    fn weights_add_under_tensor() {
        let t = tensor(&twisted_step(1, 2), &twisted_step(0, 3)).unwrap();
        let v = t.evaluate(&[1]);
        assert_eq!(v.total_dim(), 1);
        assert_eq!(v.dim_at(&[5]), 1);
    }

    #[test]
    fn rank_two_steps_tensor_to_the_sum_of_corners() {
        let m = canonical_extension(&CoeffObject::vector_space(1), 2).translate(&[1, 0]);
        let n = canonical_extension(&CoeffObject::vector_space(1), 2).translate(&[0, 2]);
        let t = tensor(&m, &n).unwrap();
        assert_eq!(t.evaluate(&[1, 2]).total_dim(), 1);
        assert_eq!(t.evaluate(&[0, 5]).total_dim(), 0);
        assert_eq!(t.evaluate(&[3, 1]).total_dim(), 0);
        assert!(t.flags().locally_free);
    }

    #[test]
    fn torsion_input_is_rejected() {
        let sky = GridModule::skyscraper(CoeffObject::vector_space(1), vec![0]);
        let err = tensor(&sky, &step(0)).unwrap_err();
        assert!(matches!(err, GridError::NotTorsionFree(_)));
        let err = tensor(&step(0), &sky).unwrap_err();
        assert!(matches!(err, GridError::NotTorsionFree(_)));
    }

    // brute-force triple convolution: dim of sum of im(M(v1) (x) N(v2) (x) P(v3))
    // over all v1 + v2 + v3 = v, inside M(hi) (x) N(hi) (x) P(hi) in either
    // association (dimensions do not depend on the bracketing)
    fn triple_dim(ms: [&GridModule; 3], v: i64) -> usize {
        let his: Vec<i64> = ms.iter().map(|m| m.hi()[0]).collect();
        let ambient_dim: usize = ms
            .iter()
            .map(|m| m.evaluate(&[m.hi()[0]]).total_dim())
            .product();
        let mut span = Subspace::zero(ambient_dim);
        let lo1 = ms[0].lo()[0];
        let lo2 = ms[1].lo()[0];
        let lo3 = ms[2].lo()[0];
        for v1 in lo1..=(v - lo2 - lo3) {
            for v2 in lo2..=(v - v1 - lo3) {
                let v3 = v - v1 - v2;
                let f1 = ms[0].eval_map(&[v1], &[v1.max(his[0])]).unwrap();
                let f2 = ms[1].eval_map(&[v2], &[v2.max(his[1])]).unwrap();
                let f3 = ms[2].eval_map(&[v3], &[v3.max(his[2])]).unwrap();
                let b = f1.block(&[]).kronecker(&f2.block(&[]).kronecker(&f3.block(&[])));
                if b.cols() > 0 {
                    span = span.sum(&Subspace::from_columns(&b));
                }
            }
        }
        span.dim()
    }

    #[test]
    fn associativity_matches_triple_convolution_oracle() {
        let m = {
            let mut values = BTreeMap::new();
            let mut maps = BTreeMap::new();
            values.insert(vec![0], CoeffObject::vector_space(1));
            values.insert(vec![1], CoeffObject::vector_space(2));
            let f = CoeffMorphism::new_unchecked(
                CoeffObject::vector_space(1),
                CoeffObject::vector_space(2),
                BTreeMap::from([(vec![], RationalMatrix::from_i64(&[&[1], &[2]]))]),
            );
            maps.insert((vec![0], 0), f.unwrap());
            GridModule::from_parts(CoeffShape::vector_space(), vec![0], vec![1], values, maps)
                .unwrap()
        };
        let n = step(-1);
        let p = {
            let mut values = BTreeMap::new();
            let mut maps = BTreeMap::new();
            values.insert(vec![1], CoeffObject::vector_space(2));
            values.insert(vec![2], CoeffObject::vector_space(2));
            let f = CoeffMorphism::new_unchecked(
                CoeffObject::vector_space(2),
                CoeffObject::vector_space(2),
                BTreeMap::from([(vec![], RationalMatrix::from_i64(&[&[1, 1], &[0, 1]]))]),
            );
            maps.insert((vec![1], 0), f.unwrap());
            GridModule::from_parts(CoeffShape::vector_space(), vec![1], vec![2], values, maps)
                .unwrap()
        };
        let left = tensor(&tensor(&m, &n).unwrap(), &p).unwrap();
        let right = tensor(&m, &tensor(&n, &p).unwrap()).unwrap();
        assert_eq!(left.lo(), right.lo());
        assert_eq!(left.hi(), right.hi());
        assert!(left.flags().torsion_free);
        for v in left.lo()[0]..=left.hi()[0] {
            let expected = triple_dim([&m, &n, &p], v);
            assert_eq!(left.evaluate(&[v]).total_dim(), expected, "left at {v}");
            assert_eq!(right.evaluate(&[v]).total_dim(), expected, "right at {v}");
        }
    }
}
