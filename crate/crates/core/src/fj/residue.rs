//! Residue resolution of the vanishing dualizing object by the pushed
//! forward dualizing lines of the closed strata.
//!
//! The terms are indexed by codimension; the differential out of a stratum
//! sums the restriction projections to its codimension-one degenerations,
//! with the simplicial sign of the added transverse direction.  Both the
//! complex property and degreewise exactness are certified at construction
//! time.

use std::collections::BTreeMap;

use crate::coeffs::{CoeffMorphism, CoeffObject};
use crate::grid::{box_points, join, lim_along, meet, GridModule, GridMorphism};
use crate::linalg::{Rat, RationalMatrix};
use crate::poset::{Injection, StratumId};

use super::model::FjModel;
use super::morphism::FjMorphism;
use super::object::FjObject;
use super::structural::{omega, omega_bar};
use super::FjError;

/// Exact complex `0 -> omega -> omega_bar(codim 0) -> omega_bar(codim 1) -> ...`
/// with one direct sum of boundary dualizing lines per codimension.
#[derive(Clone, Debug)]
pub struct ResidueResolution {
    pub terms: Vec<FjObject>,
    /// maps[i] points from terms[i] to terms[i + 1]
    pub maps: Vec<FjMorphism>,
    /// strata contributing to each term, in summand order
    pub term_strata: Vec<Vec<String>>,
}

fn grid_direct_sum(a: &GridModule, b: &GridModule) -> Result<GridModule, FjError> {
    assert_eq!(a.shape(), b.shape(), "summands share a coefficient shape");
    assert_eq!(a.rank(), b.rank(), "summands share a grid rank");
    let lo = meet(a.lo(), b.lo());
    let hi = join(a.hi(), b.hi());
    let mut values = BTreeMap::new();
    let mut maps = BTreeMap::new();
    for v in box_points(&lo, &hi) {
        values.insert(v.clone(), a.evaluate(&v).direct_sum(&b.evaluate(&v)));
        for i in 0..a.rank() {
            let mut v2 = v.clone();
            v2[i] += 1;
            if v2.iter().zip(&hi).all(|(p, q)| p <= q) {
                let m = a.eval_map(&v, &v2)?.direct_sum(&b.eval_map(&v, &v2)?);
                maps.insert((v.clone(), i), m);
            }
        }
    }
    Ok(GridModule::from_parts(
        a.shape().clone(),
        lo,
        hi,
        values,
        maps,
    )?)
}

/// Degreewise direct sum, with the gluing summed factor by factor.
fn fj_direct_sum(model: &FjModel, parts: &[FjObject]) -> Result<FjObject, FjError> {
    assert!(!parts.is_empty(), "direct sum needs at least one summand");
    if parts.len() == 1 {
        return Ok(parts[0].clone());
    }
    let mut grids = Vec::new();
    for x in model.poset.ids() {
        let mut g = parts[0].stratum(x).clone();
        for p in &parts[1..] {
            g = grid_direct_sum(&g, p.stratum(x))?;
        }
        grids.push(g);
    }
    let mut components = BTreeMap::new();
    for (z, y) in model.comparable_pairs() {
        let beta = model.poset.beta(z, y).expect("comparable pair").clone();
        let pushed = model.alpha_push(z, y, &grids[y])?;
        let limit = lim_along(&grids[z], &beta);
        let lo = meet(pushed.lo(), limit.lo());
        let hi = join(pushed.hi(), limit.hi());
        let mut comps = BTreeMap::new();
        for v in box_points(&lo, &hi) {
            let mut c = parts[0].glue_map(z, y).expect("valid summand").component(&v);
            for p in &parts[1..] {
                c = c.direct_sum(&p.glue_map(z, y).expect("valid summand").component(&v));
            }
            comps.insert(v, c);
        }
        components.insert((z, y), comps);
    }
    FjObject::new(model, grids, components)
}

/// Sign of dropping to a codimension-one deeper stratum: parity of the
/// position at which the new transverse direction is inserted.
fn residue_sign(beta: &Injection) -> Rat {
    assert_eq!(beta.codomain(), beta.domain() + 1, "codimension one step");
    let added = beta.complement().apply(0);
    let below = (0..beta.domain()).filter(|&j| beta.apply(j) < added).count();
    if below % 2 == 0 {
        Rat::one()
    } else {
        Rat::from_int(-1)
    }
}

/// Strata of each codimension, shallow to deep; requires the codimensions
/// present to be contiguous.
pub(crate) fn codim_buckets(model: &FjModel) -> Result<Vec<Vec<StratumId>>, FjError> {
    let mut buckets: BTreeMap<usize, Vec<StratumId>> = BTreeMap::new();
    for y in model.poset.ids() {
        buckets.entry(model.codim(y)).or_default().push(y);
    }
    let max = *buckets.keys().last().expect("nonempty poset");
    for c in 0..=max {
        if !buckets.contains_key(&c) {
            return Err(FjError::NotComputable(format!(
                "no stratum of codimension {c}: the residue terms would skip a step"
            )));
        }
    }
    Ok(buckets.into_values().collect())
}

/// One component of a differential: the signed projection matrix between the
/// nonzero summands present at this stratum and degree.
fn differential_component(
    model: &FjModel,
    source_strata: &[StratumId],
    source_parts: &[FjObject],
    target_strata: &[StratumId],
    target_parts: &[FjObject],
    x: StratumId,
    v: &[i64],
    source_value: CoeffObject,
    target_value: CoeffObject,
) -> CoeffMorphism {
    if source_value.is_zero() || target_value.is_zero() {
        return CoeffMorphism::zero(source_value, target_value);
    }
    let w = source_value
        .components()
        .keys()
        .next()
        .expect("nonzero value")
        .clone();
    let mut mtx = RationalMatrix::zero(target_value.dim_at(&w), source_value.dim_at(&w));
    let mut col = 0;
    for (yi, ypart) in source_parts.iter().enumerate() {
        if ypart.stratum(x).evaluate(v).is_zero() {
            continue;
        }
        let mut row = 0;
        for (zi, zpart) in target_parts.iter().enumerate() {
            if zpart.stratum(x).evaluate(v).is_zero() {
                continue;
            }
            let (ys, zs) = (source_strata[yi], target_strata[zi]);
            if zs != ys && model.poset.leq(zs, ys) {
                let beta = model.poset.beta(zs, ys).expect("comparable");
                mtx[(row, col)] = residue_sign(beta);
            }
            row += 1;
        }
        col += 1;
    }
    CoeffMorphism::new(source_value, target_value, [(w, mtx)].into_iter().collect())
        .expect("projection blocks are equivariant")
}

fn differential(
    model: &FjModel,
    source_strata: &[StratumId],
    source_parts: &[FjObject],
    source: &FjObject,
    target_strata: &[StratumId],
    target_parts: &[FjObject],
    target: &FjObject,
) -> Result<FjMorphism, FjError> {
    let mut comps = Vec::new();
    for x in model.poset.ids() {
        let sg = source.stratum(x);
        let tg = target.stratum(x);
        let lo = meet(sg.lo(), tg.lo());
        let hi = join(sg.hi(), tg.hi());
        let mut degree_comps = BTreeMap::new();
        for v in box_points(&lo, &hi) {
            let c = differential_component(
                model,
                source_strata,
                source_parts,
                target_strata,
                target_parts,
                x,
                &v,
                sg.evaluate(&v),
                tg.evaluate(&v),
            );
            degree_comps.insert(v, c);
        }
        comps.push(GridMorphism::new(sg.clone(), tg.clone(), degree_comps)?);
    }
    FjMorphism::new(model, source.clone(), target.clone(), comps)
}

fn component_rank(m: &CoeffMorphism) -> usize {
    m.source()
        .components()
        .keys()
        .map(|w| m.block(w).rank())
        .sum()
}

pub fn residue_resolution(model: &FjModel) -> Result<ResidueResolution, FjError> {
    let buckets = codim_buckets(model)?;
    let open = model.open_id()?;
    assert_eq!(buckets[0], vec![open], "single shallowest stratum");

    let mut term_strata: Vec<Vec<String>> =
        vec![vec![model.poset.label(open).to_string()]];
    let mut part_strata: Vec<Vec<StratumId>> = vec![vec![open]];
    let mut parts: Vec<Vec<FjObject>> = vec![vec![omega(model)?]];
    for bucket in &buckets {
        term_strata.push(
            bucket
                .iter()
                .map(|&y| model.poset.label(y).to_string())
                .collect(),
        );
        part_strata.push(bucket.clone());
        parts.push(
            bucket
                .iter()
                .map(|&y| omega_bar(model, y))
                .collect::<Result<_, _>>()?,
        );
    }
    let terms: Vec<FjObject> = parts
        .iter()
        .map(|p| fj_direct_sum(model, p))
        .collect::<Result<_, _>>()?;

    let mut maps = Vec::new();
    for i in 0..terms.len() - 1 {
        let d = if i == 0 {
            // leading inclusion: identical values away from the step
            let mut comps = Vec::new();
            for x in model.poset.ids() {
                let sg = terms[0].stratum(x);
                let tg = terms[1].stratum(x);
                let lo = meet(sg.lo(), tg.lo());
                let hi = join(sg.hi(), tg.hi());
                let mut degree_comps = BTreeMap::new();
                for v in box_points(&lo, &hi) {
                    let s = sg.evaluate(&v);
                    let t = tg.evaluate(&v);
                    let c = if s == t {
                        CoeffMorphism::identity(&s)
                    } else {
                        CoeffMorphism::zero(s, t)
                    };
                    degree_comps.insert(v, c);
                }
                comps.push(GridMorphism::new(sg.clone(), tg.clone(), degree_comps)?);
            }
            FjMorphism::new(model, terms[0].clone(), terms[1].clone(), comps)?
        } else {
            differential(
                model,
                &part_strata[i],
                &parts[i],
                &terms[i],
                &part_strata[i + 1],
                &parts[i + 1],
                &terms[i + 1],
            )?
        };
        maps.push(d);
    }

    for i in 0..maps.len().saturating_sub(1) {
        if !maps[i + 1].after(&maps[i]).is_zero() {
            return Err(FjError::NotComputable(format!(
                "residue differential does not square to zero after term {i}; \
                 the closure relations are incomplete"
            )));
        }
    }

    // degreewise exactness by rank arithmetic, one window beyond every term
    for x in model.poset.ids() {
        let mut lo = terms[0].stratum(x).lo().to_vec();
        let mut hi = terms[0].stratum(x).hi().to_vec();
        for t in &terms[1..] {
            lo = meet(&lo, t.stratum(x).lo());
            hi = join(&hi, t.stratum(x).hi());
        }
        let lo: Vec<i64> = lo.iter().map(|c| c - 1).collect();
        let hi: Vec<i64> = hi.iter().map(|c| c + 1).collect();
        for v in box_points(&lo, &hi) {
            let dims: Vec<usize> = terms
                .iter()
                .map(|t| t.stratum(x).evaluate(&v).total_dim())
                .collect();
            let ranks: Vec<usize> = maps
                .iter()
                .map(|d| component_rank(&d.component(x).component(&v)))
                .collect();
            for term in 0..terms.len() {
                let incoming = if term == 0 { 0 } else { ranks[term - 1] };
                let outgoing = if term < ranks.len() { ranks[term] } else { 0 };
                if incoming + outgoing != dims[term] {
                    return Err(FjError::NotExact {
                        stratum: model.poset.label(x).to_string(),
                        degree: v.clone(),
                        term,
                    });
                }
            }
        }
    }

    Ok(ResidueResolution {
        terms,
        maps,
        term_strata,
    })
}

#[cfg(test)]
mod tests {
    use super::super::model::{compact_p1, jacobi, modular_curve, snc_corner_toy};
    use super::*;
    use crate::coeffs::{CoeffShape, GroupDatum};
    use crate::fj::StratumModel;
    use crate::poset::StrataPoset;

    #[test]
    fn modular_resolution_has_three_exact_terms() {
        let model = modular_curve();
        let res = residue_resolution(&model).unwrap();
        assert_eq!(res.terms.len(), 3);
        assert_eq!(res.maps.len(), 2);
        assert_eq!(res.term_strata[2], vec!["cusp".to_string()]);
        let cusp = model.by_label("cusp").unwrap();
        assert!(res.terms[0].stratum(cusp).evaluate(&[0]).is_zero());
        assert_eq!(res.terms[1].stratum(cusp).evaluate(&[0]).total_dim(), 1);
        assert_eq!(res.terms[2].stratum(cusp).evaluate(&[0]).total_dim(), 1);
        assert!(res.terms[2].stratum(cusp).evaluate(&[1]).is_zero());
    }

    #[test]
    fn compact_resolution_is_the_identity_inclusion() {
        let res = residue_resolution(&compact_p1()).unwrap();
        assert_eq!(res.terms.len(), 2);
        assert!(res.maps[0].is_iso());
    }

    #[test]
    fn jacobi_resolution_is_exact() {
        let res = residue_resolution(&jacobi()).unwrap();
        assert_eq!(res.terms.len(), 3);
    }

    #[test]
    fn corner_signs_alternate_between_the_two_paths() {
        let model = snc_corner_toy();
        let res = residue_resolution(&model).unwrap();
        assert_eq!(res.terms.len(), 4);
        let c = model.by_label("C").unwrap();
        let d2 = res.maps[2].component(c).component(&[0, 0]);
        let w = vec![-1i64, -1];
        let block = d2.block(&w);
        assert_eq!(
            block,
            RationalMatrix::new(1, 2, vec![Rat::from_int(-1), Rat::one()])
        );
        assert!(res.maps[2].after(&res.maps[1]).is_zero());
    }

    /// Two divisor strata whose corner only degenerates one of them: the
    /// differential no longer squares to zero.
    #[test]
    fn incomplete_closure_relations_are_rejected() {
        let shape = CoeffShape::torus(2);
        let omega_line = crate::coeffs::CoeffObject::line(shape.clone(), vec![-1, -1]);
        let omega_one = crate::coeffs::CoeffObject::from_components(
            shape.clone(),
            [(vec![-1, 0], 1), (vec![0, -1], 1)].into_iter().collect(),
        );
        let stratum = |label: &str, dim_y: usize, lines: Vec<Vec<i64>>| StratumModel {
            label: label.to_string(),
            group: GroupDatum::torus(2),
            shape: shape.clone(),
            dim_y,
            omega: omega_line.clone(),
            omega_one: omega_one.clone(),
            boundary_lines: lines,
            boundary: None,
        };
        let mut poset = StrataPoset::new();
        let m = poset.add_stratum("M", 0);
        let y1 = poset.add_stratum("Y1", 1);
        let y2 = poset.add_stratum("Y2", 1);
        let c = poset.add_stratum("C", 2);
        poset.add_relation(y1, m, Injection::empty(1));
        poset.add_relation(y2, m, Injection::empty(1));
        poset.add_relation(c, y1, Injection::new(vec![0], 2).unwrap());
        poset.add_relation(c, m, Injection::empty(2));
        let id2 = vec![vec![1, 0], vec![0, 1]];
        let model = FjModel {
            name: "broken corner".into(),
            description: "corner missing one closure relation".into(),
            dim: 2,
            poset,
            strata: vec![
                stratum("M", 2, vec![]),
                stratum("Y1", 1, vec![vec![-1, 0]]),
                stratum("Y2", 1, vec![vec![0, -1]]),
                stratum("C", 0, vec![vec![-1, 0], vec![0, -1]]),
            ],
            alpha: [
                ((y1, m), id2.clone()),
                ((y2, m), id2.clone()),
                ((c, y1), id2.clone()),
                ((c, m), id2),
            ]
            .into_iter()
            .collect(),
        };
        model.validate().unwrap();
        let err = residue_resolution(&model).unwrap_err();
        assert!(
            matches!(err, FjError::NotComputable(_)),
            "unexpected error: {err}"
        );
    }
}
