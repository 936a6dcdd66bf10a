use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{box_points, join, leq, meet, plus_e, GridError};
use crate::coeffs::{parse_weight_key, weight_key, CoeffMorphism, CoeffObject, CoeffShape};
use crate::linalg::{RationalMatrix, Subspace};

/// A functor Z^n -> coefficient category, stored on a finite window.
///
/// Values below the window are zero; values beyond it are clamped to the
/// nearest window point with identity structure maps.  The window is not
/// required to be minimal; [`GridModule::kan_normalize`] shrinks it.
#[derive(Clone, PartialEq, Eq)]
pub struct GridModule {
    shape: CoeffShape,
    lo: Vec<i64>,
    hi: Vec<i64>,
    values: BTreeMap<Vec<i64>, CoeffObject>,
    /// structure map in direction `i` at window point `v`, keyed `(v, i)`
    maps: BTreeMap<(Vec<i64>, usize), CoeffMorphism>,
}

impl GridModule {
    pub fn from_parts(
        shape: CoeffShape,
        lo: Vec<i64>,
        hi: Vec<i64>,
        values: BTreeMap<Vec<i64>, CoeffObject>,
        maps: BTreeMap<(Vec<i64>, usize), CoeffMorphism>,
    ) -> Result<Self, GridError> {
        if lo.len() != hi.len() {
            return Err(GridError::BadWindow("lo and hi lengths differ".into()));
        }
        if lo.iter().zip(&hi).any(|(a, b)| a > b) {
            return Err(GridError::BadWindow(format!("lo {lo:?} exceeds hi {hi:?}")));
        }
        let m = GridModule {
            shape,
            lo,
            hi,
            values,
            maps,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<(), GridError> {
        let points = box_points(&self.lo, &self.hi);
        if self.values.len() != points.len() {
            return Err(GridError::BadComponent(format!(
                "{} values stored for a window of {} points",
                self.values.len(),
                points.len()
            )));
        }
        for v in &points {
            let val = self
                .values
                .get(v)
                .ok_or_else(|| GridError::BadComponent(format!("missing value at {v:?}")))?;
            if val.shape() != &self.shape {
                return Err(GridError::BadComponent(format!("shape mismatch at {v:?}")));
            }
            val.validate().map_err(GridError::Coeff)?;
        }
        for v in &points {
            for i in 0..self.rank() {
                let w = plus_e(v, i);
                let stored = self.maps.get(&(v.clone(), i));
                if !leq(&w, &self.hi) {
                    if stored.is_some() {
                        return Err(GridError::BadComponent(format!(
                            "map stored off the window at {v:?} direction {i}"
                        )));
                    }
                    continue;
                }
                let map = stored.ok_or_else(|| {
                    GridError::BadComponent(format!("missing map at {v:?} direction {i}"))
                })?;
                if map.source() != &self.values[v] || map.target() != &self.values[&w] {
                    return Err(GridError::BadComponent(format!(
                        "map endpoints wrong at {v:?} direction {i}"
                    )));
                }
            }
        }
        // commuting squares
        for v in &points {
            for i in 0..self.rank() {
                for j in i + 1..self.rank() {
                    let corner = plus_e(&plus_e(v, i), j);
                    if !leq(&corner, &self.hi) {
                        continue;
                    }
                    let via_i = self.maps[&(plus_e(v, i), j)].after(&self.maps[&(v.clone(), i)]);
                    let via_j = self.maps[&(plus_e(v, j), i)].after(&self.maps[&(v.clone(), j)]);
                    if via_i != via_j {
                        return Err(GridError::NonCommutingSquare {
                            at: v.clone(),
                            i,
                            j,
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn rank(&self) -> usize {
        self.lo.len()
    }

    pub fn shape(&self) -> &CoeffShape {
        &self.shape
    }

    pub fn lo(&self) -> &[i64] {
        &self.lo
    }

    pub fn hi(&self) -> &[i64] {
        &self.hi
    }

    pub fn window_points(&self) -> Vec<Vec<i64>> {
        box_points(&self.lo, &self.hi)
    }

    /// The zero functor, window fixed at the origin.
    pub fn zero(shape: CoeffShape, rank: usize) -> Self {
        let origin = vec![0i64; rank];
        GridModule {
            lo: origin.clone(),
            hi: origin.clone(),
            values: [(origin, CoeffObject::zero(shape.clone()))].into_iter().collect(),
            maps: BTreeMap::new(),
            shape,
        }
    }

    /// Value `V` exactly at `point`, zero elsewhere.
    pub fn skyscraper(value: CoeffObject, point: Vec<i64>) -> Self {
        let shape = value.shape().clone();
        let lo = point.clone();
        let hi: Vec<i64> = point.iter().map(|c| c + 1).collect();
        let mut values = BTreeMap::new();
        for v in box_points(&lo, &hi) {
            let val = if v == point {
                value.clone()
            } else {
                CoeffObject::zero(shape.clone())
            };
            values.insert(v, val);
        }
        let mut maps = BTreeMap::new();
        for v in box_points(&lo, &hi) {
            for i in 0..lo.len() {
                let w = plus_e(&v, i);
                if leq(&w, &hi) {
                    maps.insert(
                        (v.clone(), i),
                        CoeffMorphism::zero(values[&v].clone(), values[&w].clone()),
                    );
                }
            }
        }
        GridModule {
            shape,
            lo,
            hi,
            values,
            maps,
        }
    }

    /// Kan-semantics value at an arbitrary lattice point.
    pub fn evaluate(&self, v: &[i64]) -> CoeffObject {
        assert_eq!(v.len(), self.rank(), "degree rank");
        if v.iter().zip(&self.lo).any(|(a, b)| a < b) {
            return CoeffObject::zero(self.shape.clone());
        }
        self.values[&meet(v, &self.hi)].clone()
    }

    /// Composite structure map `M(v) -> M(w)` for `v ≤ w`; path independent.
    pub fn eval_map(&self, v: &[i64], w: &[i64]) -> Result<CoeffMorphism, GridError> {
        if !leq(v, w) {
            return Err(GridError::NotComparable(format!("{v:?} vs {w:?}")));
        }
        if v.iter().zip(&self.lo).any(|(a, b)| a < b) {
            return Ok(CoeffMorphism::zero(
                CoeffObject::zero(self.shape.clone()),
                self.evaluate(w),
            ));
        }
        let cv = meet(v, &self.hi);
        let cw = meet(w, &self.hi);
        let mut acc = CoeffMorphism::identity(&self.values[&cv]);
        let mut cur = cv;
        for k in 0..self.rank() {
            while cur[k] < cw[k] {
                acc = self.maps[&(cur.clone(), k)].after(&acc);
                cur[k] += 1;
            }
        }
        Ok(acc)
    }

    /// One-step structure map under Kan semantics.
    pub fn structure_map(&self, v: &[i64], i: usize) -> CoeffMorphism {
        self.eval_map(v, &plus_e(v, i)).expect("single step is comparable")
    }

    /// Translate the whole functor by `t`.
    pub fn translate(&self, t: &[i64]) -> GridModule {
        assert_eq!(t.len(), self.rank());
        let shift = |v: &Vec<i64>| -> Vec<i64> { v.iter().zip(t).map(|(a, b)| a + b).collect() };
        GridModule {
            shape: self.shape.clone(),
            lo: self.lo.iter().zip(t).map(|(a, b)| a + b).collect(),
            hi: self.hi.iter().zip(t).map(|(a, b)| a + b).collect(),
            values: self.values.iter().map(|(v, x)| (shift(v), x.clone())).collect(),
            maps: self
                .maps
                .iter()
                .map(|((v, i), f)| ((shift(v), *i), f.clone()))
                .collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.values.values().all(CoeffObject::is_zero)
    }

    pub fn flags(&self) -> GridFlags {
        let torsion_free = self.maps.values().all(CoeffMorphism::is_injective);
        let locally_free = torsion_free && self.all_squares_cartesian();
        GridFlags {
            bounded_below: true,
            coherent: true,
            torsion_free,
            locally_free,
        }
    }

    /// Unit squares over the box extended one step below the window: the
    /// square at `v` in directions `i < j` must be Cartesian.
    fn all_squares_cartesian(&self) -> bool {
        if self.rank() < 2 {
            return true;
        }
        let lo1: Vec<i64> = self.lo.iter().map(|c| c - 1).collect();
        for v in box_points(&lo1, &self.hi) {
            for i in 0..self.rank() {
                for j in i + 1..self.rank() {
                    let p = self
                        .structure_map(&v, i)
                        .pair(&self.structure_map(&v, j));
                    let d = self
                        .structure_map(&plus_e(&v, i), j)
                        .copair(&self.structure_map(&plus_e(&v, j), i).scale(
                            &crate::linalg::Rat::from_int(-1),
                        ));
                    if !p.is_injective() {
                        return false;
                    }
                    let (_, incl_k) = d.kernel();
                    let (_, incl_i) = p.image();
                    let ambient = d.source();
                    for w in ambient.components().keys() {
                        let span_k = Subspace::from_columns(&incl_k.block(w));
                        let span_i = Subspace::from_columns(&incl_i.block(w));
                        if span_k != span_i {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    /// Shrink the window: raise `lo` past all-zero faces, lower `hi` past
    /// faces reached by isomorphisms.  The result is isomorphic as a functor
    /// (equal whenever the dropped maps were identities).
    pub fn kan_normalize(&self) -> GridModule {
        let mut cur = self.clone();
        loop {
            let mut changed = false;
            for i in 0..cur.rank() {
                while cur.lo[i] < cur.hi[i] && cur.face_is_zero(i) {
                    let mut lo = cur.lo.clone();
                    lo[i] += 1;
                    cur = cur.restrict_window(lo, cur.hi.clone());
                    changed = true;
                }
                while cur.hi[i] > cur.lo[i] && cur.face_maps_iso(i) {
                    let mut hi = cur.hi.clone();
                    hi[i] -= 1;
                    cur = cur.restrict_window(cur.lo.clone(), hi);
                    changed = true;
                }
            }
            if !changed {
                return cur;
            }
        }
    }

    fn face_is_zero(&self, i: usize) -> bool {
        let mut hi = self.hi.clone();
        hi[i] = self.lo[i];
        box_points(&self.lo, &hi).iter().all(|v| self.values[v].is_zero())
    }

    fn face_maps_iso(&self, i: usize) -> bool {
        let mut lo = self.lo.clone();
        let mut hi = self.hi.clone();
        lo[i] = self.hi[i] - 1;
        hi[i] = self.hi[i] - 1;
        box_points(&lo, &hi)
            .iter()
            .all(|v| self.maps[&(v.clone(), i)].is_iso())
    }

    fn restrict_window(&self, lo: Vec<i64>, hi: Vec<i64>) -> GridModule {
        let values: BTreeMap<Vec<i64>, CoeffObject> = box_points(&lo, &hi)
            .into_iter()
            .map(|v| {
                let val = self.values[&v].clone();
                (v, val)
            })
            .collect();
        let mut maps = BTreeMap::new();
        for v in box_points(&lo, &hi) {
            for i in 0..lo.len() {
                let w = plus_e(&v, i);
                if leq(&w, &hi) {
                    maps.insert((v.clone(), i), self.maps[&(v.clone(), i)].clone());
                }
            }
        }
        GridModule {
            shape: self.shape.clone(),
            lo,
            hi,
            values,
            maps,
        }
    }

    /// Grow the window to contain the box `[lo, hi]` without changing the
    /// functor: new points take their Kan values and maps.
    pub fn extend_window(&self, lo: &[i64], hi: &[i64]) -> GridModule {
        let new_lo = meet(lo, &self.lo);
        let new_hi = join(hi, &self.hi);
        let mut values = BTreeMap::new();
        for v in box_points(&new_lo, &new_hi) {
            values.insert(v.clone(), self.evaluate(&v));
        }
        let mut maps = BTreeMap::new();
        for v in box_points(&new_lo, &new_hi) {
            for i in 0..new_lo.len() {
                let w = plus_e(&v, i);
                if leq(&w, &new_hi) {
                    maps.insert((v.clone(), i), self.eval_map(&v, &w).expect("step"));
                }
            }
        }
        GridModule {
            shape: self.shape.clone(),
            lo: new_lo,
            hi: new_hi,
            values,
            maps,
        }
    }
}

/// Constant functor `V` on `v ≥ 0`, zero elsewhere.
pub fn canonical_extension(value: &CoeffObject, rank: usize) -> GridModule {
    let origin = vec![0i64; rank];
    GridModule {
        shape: value.shape().clone(),
        lo: origin.clone(),
        hi: origin.clone(),
        values: [(origin, value.clone())].into_iter().collect(),
        maps: BTreeMap::new(),
    }
}

/// The four structural predicates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridFlags {
    pub bounded_below: bool,
    pub coherent: bool,
    pub torsion_free: bool,
    pub locally_free: bool,
}

impl std::fmt::Debug for GridModule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "GridModule[{:?}..{:?}]", self.lo, self.hi)?;
        for (v, val) in &self.values {
            write!(f, " {v:?}:{}", val.total_dim())?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct GridWire {
    lo: Vec<i64>,
    hi: Vec<i64>,
    values: BTreeMap<String, CoeffObject>,
    /// per point, per direction: weight-keyed blocks (absent off-window)
    maps: BTreeMap<String, Vec<Option<BTreeMap<String, RationalMatrix>>>>,
}

fn point_key(v: &[i64]) -> String {
    weight_key(v)
}

fn parse_point_key(s: &str, rank: usize) -> Option<Vec<i64>> {
    parse_weight_key(s, rank)
}

impl Serialize for GridModule {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let values = self
            .values
            .iter()
            .map(|(v, val)| (point_key(v), val.clone()))
            .collect();
        let mut maps = BTreeMap::new();
        for v in self.window_points() {
            let mut dirs = Vec::with_capacity(self.rank());
            for i in 0..self.rank() {
                dirs.push(self.maps.get(&(v.clone(), i)).map(|m| {
                    m.blocks()
                        .iter()
                        .map(|(w, blk)| (weight_key(w), blk.clone()))
                        .collect()
                }));
            }
            maps.insert(point_key(&v), dirs);
        }
        GridWire {
            lo: self.lo.clone(),
            hi: self.hi.clone(),
            values,
            maps,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for GridModule {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let wire = GridWire::deserialize(deserializer)?;
        let rank = wire.lo.len();
        let mut values = BTreeMap::new();
        for (key, val) in wire.values {
            let v = parse_point_key(&key, rank)
                .ok_or_else(|| D::Error::custom(format!("bad point key {key:?}")))?;
            values.insert(v, val);
        }
        let shape = values
            .values()
            .next()
            .map(|v| v.shape().clone())
            .ok_or_else(|| D::Error::custom("empty value table"))?;
        let mut maps = BTreeMap::new();
        for (key, dirs) in wire.maps {
            let v = parse_point_key(&key, rank)
                .ok_or_else(|| D::Error::custom(format!("bad point key {key:?}")))?;
            for (i, entry) in dirs.into_iter().enumerate() {
                let Some(blocks) = entry else { continue };
                let w = plus_e(&v, i);
                let (src, tgt) = match (values.get(&v), values.get(&w)) {
                    (Some(a), Some(b)) => (a.clone(), b.clone()),
                    _ => return Err(D::Error::custom(format!("map endpoints missing at {key}"))),
                };
                let mut parsed = BTreeMap::new();
                for (wk, blk) in blocks {
                    let weight = parse_weight_key(&wk, src.shape().rank)
                        .ok_or_else(|| D::Error::custom(format!("bad weight key {wk:?}")))?;
                    parsed.insert(weight, blk);
                }
                let m = CoeffMorphism::new(src, tgt, parsed)
                    .map_err(|e| D::Error::custom(e.to_string()))?;
                maps.insert((v.clone(), i), m);
            }
        }
        GridModule::from_parts(shape, wire.lo, wire.hi, values, maps)
            .map_err(|e| D::Error::custom(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::Weight;
    use crate::linalg::Rat;

    pub(crate) fn line(w: Weight) -> CoeffObject {
        CoeffObject::line(CoeffShape::torus(w.len()), w)
    }

    #[test]
    fn canonical_extension_semantics() {
        let v = CoeffObject::vector_space(2);
        let o = canonical_extension(&v, 1);
        assert_eq!(o.evaluate(&[-3]).total_dim(), 0);
        assert_eq!(o.evaluate(&[0]).total_dim(), 2);
        assert_eq!(o.evaluate(&[17]).total_dim(), 2);
        let clamp = o.eval_map(&[0], &[5]).unwrap();
        assert!(clamp.is_iso(), "clamped maps are identities");
        assert_eq!(canonical_extension(&v, 0).evaluate(&[]).total_dim(), 2);
        assert!(canonical_extension(&CoeffObject::vector_space(0), 1).is_zero());
    }

    #[test]
    fn skyscraper_semantics() {
        let sky = GridModule::skyscraper(CoeffObject::vector_space(1), vec![2]);
        assert_eq!(sky.evaluate(&[1]).total_dim(), 0);
        assert_eq!(sky.evaluate(&[2]).total_dim(), 1);
        assert_eq!(sky.evaluate(&[3]).total_dim(), 0);
        assert_eq!(sky.evaluate(&[100]).total_dim(), 0);
        let flags = sky.flags();
        assert!(!flags.torsion_free, "the map out of the peak is not injective");
        assert!(flags.bounded_below && flags.coherent);
    }

    #[test]
    fn path_independence_on_square() {
        // 2x2 window with non-identity commuting maps
        let shape = CoeffShape::vector_space();
        let val = CoeffObject::vector_space(1);
        let lo = vec![0, 0];
        let hi = vec![1, 1];
        let mut values = BTreeMap::new();
        for v in box_points(&lo, &hi) {
            values.insert(v, val.clone());
        }
        let scale = |c: i64| {
            CoeffMorphism::new(
                val.clone(),
                val.clone(),
                [(vec![], RationalMatrix::from_i64(&[&[c]]))].into_iter().collect(),
            )
            .unwrap()
        };
        let mut maps = BTreeMap::new();
        maps.insert((vec![0, 0], 0), scale(2));
        maps.insert((vec![0, 0], 1), scale(3));
        maps.insert((vec![1, 0], 1), scale(3));
        maps.insert((vec![0, 1], 0), scale(2));
        let m = GridModule::from_parts(shape, lo, hi, values, maps).unwrap();
        let f = m.eval_map(&[0, 0], &[1, 1]).unwrap();
        assert_eq!(f.block(&[])[(0, 0)], Rat::from_int(6));
        // every monotone lattice path gives the same composite
        let via = m
            .eval_map(&[0, 1], &[1, 1])
            .unwrap()
            .after(&m.eval_map(&[0, 0], &[0, 1]).unwrap());
        assert_eq!(f, via);
    }

    #[test]
    fn non_commuting_square_rejected() {
        let shape = CoeffShape::vector_space();
        let val = CoeffObject::vector_space(1);
        let lo = vec![0, 0];
        let hi = vec![1, 1];
        let mut values = BTreeMap::new();
        for v in box_points(&lo, &hi) {
            values.insert(v, val.clone());
        }
        let scale = |c: i64| {
            CoeffMorphism::new(
                val.clone(),
                val.clone(),
                [(vec![], RationalMatrix::from_i64(&[&[c]]))].into_iter().collect(),
            )
            .unwrap()
        };
        let mut maps = BTreeMap::new();
        maps.insert((vec![0, 0], 0), scale(2));
        maps.insert((vec![0, 0], 1), scale(3));
        maps.insert((vec![1, 0], 1), scale(5));
        maps.insert((vec![0, 1], 0), scale(2));
        let err = GridModule::from_parts(shape, lo, hi, values, maps).unwrap_err();
        assert!(matches!(err, GridError::NonCommutingSquare { .. }));
    }

    #[test]
    fn eval_map_requires_comparability() {
        let o = canonical_extension(&CoeffObject::vector_space(1), 2);
        assert!(matches!(
            o.eval_map(&[1, 0], &[0, 1]),
            Err(GridError::NotComparable(_))
        ));
    }

    #[test]
    fn canonical_extension_is_locally_free() {
        let flags = canonical_extension(&line(vec![3, -1]), 2).flags();
        assert!(flags.torsion_free);
        assert!(flags.locally_free);
    }

    #[test]
    fn union_of_two_axes_is_not_locally_free() {
        // value k on (v1 >= 0) ∪ (v2 >= 0): torsion-free but the square at
        // the origin fails to be Cartesian (0 ≠ k ∩ k inside k)
        let shape = CoeffShape::vector_space();
        let k = CoeffObject::vector_space(1);
        let zero = CoeffObject::zero(shape.clone());
        let lo = vec![-1, -1];
        let hi = vec![0, 0];
        let mut values = BTreeMap::new();
        values.insert(vec![-1, -1], zero.clone());
        values.insert(vec![-1, 0], k.clone());
        values.insert(vec![0, -1], k.clone());
        values.insert(vec![0, 0], k.clone());
        let mut maps = BTreeMap::new();
        maps.insert((vec![-1, -1], 0), CoeffMorphism::zero(zero.clone(), k.clone()));
        maps.insert((vec![-1, -1], 1), CoeffMorphism::zero(zero.clone(), k.clone()));
        maps.insert((vec![-1, 0], 0), CoeffMorphism::identity(&k));
        maps.insert((vec![0, -1], 1), CoeffMorphism::identity(&k));
        let m = GridModule::from_parts(shape, lo, hi, values, maps).unwrap();
        let flags = m.flags();
        assert!(flags.torsion_free);
        assert!(!flags.locally_free);
    }

    #[test]
    fn kan_normalize_shrinks_padding() {
        let o = canonical_extension(&CoeffObject::vector_space(2), 1);
        let padded = o.extend_window(&[-2], &[3]);
        assert_eq!(padded.lo(), &[-2]);
        assert_eq!(padded.hi(), &[3]);
        assert_eq!(padded.evaluate(&[1]).total_dim(), 2);
        let back = padded.kan_normalize();
        assert_eq!(back.lo(), &[0]);
        assert_eq!(back.hi(), &[0]);
        assert_eq!(back, o);
    }

    #[test]
    fn translate_shifts_degrees() {
        let o = canonical_extension(&CoeffObject::vector_space(1), 1).translate(&[4]);
        assert_eq!(o.evaluate(&[3]).total_dim(), 0);
        assert_eq!(o.evaluate(&[4]).total_dim(), 1);
    }

    #[test]
    fn serde_round_trip() {
        let shape = CoeffShape::torus(2);
        let val = CoeffObject::line(shape.clone(), vec![1, -1]);
        let m = canonical_extension(&val, 1).extend_window(&[-1], &[1]);
        let json = serde_json::to_string(&m).unwrap();
        let back: GridModule = serde_json::from_str(&json).unwrap();
        assert_eq!(m, back);
        // rank-0 module round trip: the single point has the empty key
        let p = canonical_extension(&val, 0);
        let json0 = serde_json::to_string(&p).unwrap();
        let back0: GridModule = serde_json::from_str(&json0).unwrap();
        assert_eq!(p, back0);
    }
}
