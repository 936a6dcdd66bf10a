//! Toroidal models: the fixed data every Fourier-Jacobi object lives over.

use std::collections::BTreeMap;

use crate::coeffs::{
    BoundaryDatum, CoeffMorphism, CoeffObject, CoeffShape, GroupDatum, GroupShape, Weight,
};
use crate::grid::GridModule;
use crate::poset::{Injection, PosetError, StrataPoset, StratumId};

use super::FjError;

/// Per-stratum data of a toroidal model.
///
/// `omega` and `omega_one` are the canonical and logarithmic-cotangent lines
/// of the closed stratum, expressed in the coefficient category of the
/// stratum's stabilizer.  `boundary_lines[i]` is the conormal weight of the
/// i-th boundary direction; there is one per grid direction, so the list has
/// length `codim`.
#[derive(Clone, Debug, PartialEq)]
pub struct StratumModel {
    pub label: String,
    pub group: GroupDatum,
    pub shape: CoeffShape,
    pub dim_y: usize,
    pub omega: CoeffObject,
    pub omega_one: CoeffObject,
    pub boundary_lines: Vec<Weight>,
    pub boundary: Option<BoundaryDatum>,
}

/// A toroidal model: strata poset, stabilizer data, and the weight-lattice
/// maps `alpha` along which coefficients restrict from a stratum to each
/// stratum in its closure.
#[derive(Clone, Debug, PartialEq)]
pub struct FjModel {
    pub name: String,
    pub description: String,
    pub dim: usize,
    pub poset: StrataPoset,
    pub strata: Vec<StratumModel>,
    /// restriction matrix for each strictly comparable pair `(z, y)`, acting
    /// on weights by `w -> alpha * w`; rows = rank of z, cols = rank of y
    pub alpha: BTreeMap<(StratumId, StratumId), Vec<Vec<i64>>>,
}

pub(crate) fn identity_lattice(n: usize) -> Vec<Vec<i64>> {
    (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect()
}

pub(crate) fn compose_lattice(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let cols = if b.is_empty() { 0 } else { b[0].len() };
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| row.iter().zip(b).map(|(&x, br)| x * br[j]).sum())
                .collect()
        })
        .collect()
}

impl FjModel {
    pub fn stratum(&self, y: StratumId) -> &StratumModel {
        &self.strata[y]
    }

    pub fn codim(&self, y: StratumId) -> usize {
        self.poset.codim(y)
    }

    pub fn by_label(&self, label: &str) -> Result<StratumId, FjError> {
        self.poset
            .id_by_label(label)
            .ok_or_else(|| FjError::UnknownStratum(label.to_string()))
    }

    pub fn open_id(&self) -> Result<StratumId, FjError> {
        self.poset
            .open_stratum()
            .ok_or_else(|| FjError::ModelInvalid("no unique open stratum".into()))
    }

    /// Strictly comparable pairs `(z, y)` with `z < y`.
    pub fn comparable_pairs(&self) -> Vec<(StratumId, StratumId)> {
        let mut out = Vec::new();
        for y in self.poset.ids() {
            for z in self.poset.ids() {
                if z != y && self.poset.leq(z, y) {
                    out.push((z, y));
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Strict chains `w < z < y`.
    pub fn chains(&self) -> Vec<(StratumId, StratumId, StratumId)> {
        let mut out = Vec::new();
        for (z, y) in self.comparable_pairs() {
            for w in self.poset.ids() {
                if w != z && w != y && self.poset.leq(w, z) {
                    out.push((w, z, y));
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Weight-lattice map of the pair `z <= y`; the identity when `z == y`.
    pub fn alpha(&self, z: StratumId, y: StratumId) -> Result<Vec<Vec<i64>>, FjError> {
        if z == y {
            return Ok(identity_lattice(self.strata[y].shape.rank));
        }
        self.alpha.get(&(z, y)).cloned().ok_or_else(|| {
            FjError::Poset(PosetError::NotComparable(
                self.poset.label(z).to_string(),
                self.poset.label(y).to_string(),
            ))
        })
    }

    /// Restrict a coefficient object of stratum `y` to stratum `z <= y`.
    pub fn restrict_object(
        &self,
        z: StratumId,
        y: StratumId,
        obj: &CoeffObject,
    ) -> Result<CoeffObject, FjError> {
        if z == y {
            return Ok(obj.clone());
        }
        Ok(obj.restrict_weights(&self.alpha(z, y)?))
    }

    pub fn restrict_morphism(
        &self,
        z: StratumId,
        y: StratumId,
        f: &CoeffMorphism,
    ) -> Result<CoeffMorphism, FjError> {
        if z == y {
            return Ok(f.clone());
        }
        Ok(f.restrict_weights(&self.alpha(z, y)?))
    }

    /// Apply coefficient restriction along `z <= y` to a whole grid module
    /// over stratum `y`, keeping the window.
    pub fn alpha_push(
        &self,
        z: StratumId,
        y: StratumId,
        grid: &GridModule,
    ) -> Result<GridModule, FjError> {
        if z == y {
            return Ok(grid.clone());
        }
        let mut values = BTreeMap::new();
        for v in grid.window_points() {
            values.insert(v.clone(), self.restrict_object(z, y, &grid.evaluate(&v))?);
        }
        let mut maps = BTreeMap::new();
        for v in grid.window_points() {
            for i in 0..grid.rank() {
                let mut w = v.clone();
                w[i] += 1;
                if w.iter().zip(grid.hi()).any(|(a, b)| a > b) {
                    continue;
                }
                maps.insert(
                    (v.clone(), i),
                    self.restrict_morphism(z, y, &grid.structure_map(&v, i))?,
                );
            }
        }
        let shape = CoeffShape::torus(self.strata[z].shape.rank);
        Ok(GridModule::from_parts(
            shape,
            grid.lo().to_vec(),
            grid.hi().to_vec(),
            values,
            maps,
        )?)
    }

    pub fn validate(&self) -> Result<(), FjError> {
        let report = self.poset.validate();
        if !report.is_valid() {
            return Err(FjError::ModelInvalid(format!(
                "poset: {}",
                report.violations.join("; ")
            )));
        }
        if self.strata.len() != self.poset.len() {
            return Err(FjError::ModelInvalid(format!(
                "{} stratum records for a poset of {} strata",
                self.strata.len(),
                self.poset.len()
            )));
        }
        for (id, s) in self.strata.iter().enumerate() {
            let fail = |msg: String| Err(FjError::ModelInvalid(format!("{}: {msg}", s.label)));
            if s.label != self.poset.label(id) {
                return fail(format!("label mismatch with poset entry {id}"));
            }
            s.group.validate()?;
            if s.shape != s.group.coeff_shape() {
                return fail("coefficient shape does not match the group".into());
            }
            s.omega.validate()?;
            s.omega_one.validate()?;
            if s.omega.shape() != &s.shape || s.omega_one.shape() != &s.shape {
                return fail("canonical data lives in the wrong category".into());
            }
            if s.omega.total_dim() != 1 {
                return fail("omega is not a line".into());
            }
            if s.dim_y + self.poset.codim(id) != self.dim {
                return fail("dimension and codimension do not add up".into());
            }
            if s.boundary_lines.len() != self.poset.codim(id) {
                return fail("one conormal weight per grid direction required".into());
            }
            for w in &s.boundary_lines {
                if s.omega_one.dim_at(w) == 0 {
                    return fail(format!("conormal weight {w:?} missing from omega_one"));
                }
            }
        }
        for (z, y) in self.comparable_pairs() {
            let a = self
                .alpha
                .get(&(z, y))
                .ok_or_else(|| FjError::ModelInvalid(format!("missing alpha for pair ({z}, {y})")))?;
            let (rz, ry) = (self.strata[z].shape.rank, self.strata[y].shape.rank);
            if a.len() != rz || a.iter().any(|row| row.len() != ry) {
                return Err(FjError::ModelInvalid(format!(
                    "alpha for ({z}, {y}) is not a {rz} x {ry} matrix"
                )));
            }
            if self.strata[z].shape != CoeffShape::torus(rz) {
                return Err(FjError::ModelInvalid(format!(
                    "restriction along ({z}, {y}) lands outside a torus category"
                )));
            }
            let restricted = self.restrict_object(z, y, &self.strata[y].omega)?;
            if restricted != self.strata[z].omega {
                return Err(FjError::ModelInvalid(format!(
                    "omega of {} does not restrict to omega of {}",
                    self.poset.label(y),
                    self.poset.label(z)
                )));
            }
        }
        for (w, z, y) in self.chains() {
            let direct = self.alpha(w, y)?;
            let composed = compose_lattice(&self.alpha(w, z)?, &self.alpha(z, y)?);
            if direct != composed {
                return Err(FjError::ModelInvalid(format!(
                    "alpha is not functorial on the chain ({w}, {z}, {y})"
                )));
            }
        }
        for (&(z, y), _) in &self.alpha {
            if z == y || !self.poset.leq(z, y) {
                return Err(FjError::ModelInvalid(format!(
                    "alpha stored for a non-comparable pair ({z}, {y})"
                )));
            }
        }
        Ok(())
    }
}

/// Modular curve with one cusp.  The open stratum carries Borel coefficients;
/// the weight `(a, b)` line has `omega = (-1, 1)`.  The cusp is a point with
/// one boundary direction whose conormal weight is `1`.
pub fn modular_curve() -> FjModel {
    let mut poset = StrataPoset::new();
    let m = poset.add_stratum("M", 0);
    let cusp = poset.add_stratum("cusp", 1);
    poset.add_relation(cusp, m, Injection::empty(1));
    let strata = vec![
        StratumModel {
            label: "M".into(),
            group: GroupDatum::gl2(),
            shape: CoeffShape::gl2_borel(),
            dim_y: 1,
            omega: CoeffObject::line(CoeffShape::gl2_borel(), vec![-1, 1]),
            omega_one: CoeffObject::line(CoeffShape::gl2_borel(), vec![-1, 1]),
            boundary_lines: vec![],
            boundary: None,
        },
        StratumModel {
            label: "cusp".into(),
            group: GroupDatum::torus(1),
            shape: CoeffShape::torus(1),
            dim_y: 0,
            omega: CoeffObject::line(CoeffShape::torus(1), vec![1]),
            omega_one: CoeffObject::line(CoeffShape::torus(1), vec![1]),
            boundary_lines: vec![vec![1]],
            boundary: Some(BoundaryDatum::new(0, 0, 1)),
        },
    ];
    let mut alpha = BTreeMap::new();
    alpha.insert((cusp, m), vec![vec![0, 1]]);
    let model = FjModel {
        name: "modular_curve".into(),
        description: "compactified modular curve with a single cusp".into(),
        dim: 1,
        poset,
        strata,
        alpha,
    };
    model.validate().expect("built-in model");
    model
}

/// Projective line as a boundary-free model: one open stratum, Borel
/// coefficients, canonical line of weight `(-1, 1)`.
pub fn compact_p1() -> FjModel {
    let mut poset = StrataPoset::new();
    let _m = poset.add_stratum("M", 0);
    let strata = vec![StratumModel {
        label: "M".into(),
        group: GroupDatum::gl2(),
        shape: CoeffShape::gl2_borel(),
        dim_y: 1,
        omega: CoeffObject::line(CoeffShape::gl2_borel(), vec![-1, 1]),
        omega_one: CoeffObject::line(CoeffShape::gl2_borel(), vec![-1, 1]),
        boundary_lines: vec![],
        boundary: None,
    }];
    let model = FjModel {
        name: "compact_p1".into(),
        description: "projective line, compact with no boundary strata".into(),
        dim: 1,
        poset,
        strata,
        alpha: BTreeMap::new(),
    };
    model.validate().expect("built-in model");
    model
}

/// Surface fibered in elliptic curves over the modular curve.  The open
/// stratum's stabilizer is not reductive: a three-dimensional unipotent
/// radical sits under the Borel, with a distinguished central line.
pub fn jacobi() -> FjModel {
    let mut poset = StrataPoset::new();
    let m = poset.add_stratum("M", 0);
    let cusp = poset.add_stratum("cusp", 1);
    poset.add_relation(cusp, m, Injection::empty(1));
    let strata = vec![
        StratumModel {
            label: "M".into(),
            group: GroupDatum::semidirect(
                GroupShape::Gl2,
                vec![vec![1, 0], vec![0, 1], vec![1, 1]],
                vec![vec![1, 1]],
            ),
            shape: CoeffShape::gl2_borel(),
            dim_y: 2,
            omega: CoeffObject::line(CoeffShape::gl2_borel(), vec![-2, 2]),
            omega_one: CoeffObject::from_components(
                CoeffShape::gl2_borel(),
                BTreeMap::from([(vec![-1, 1], 2)]),
            ),
            boundary_lines: vec![],
            boundary: None,
        },
        StratumModel {
            label: "cusp".into(),
            group: GroupDatum::torus(1),
            shape: CoeffShape::torus(1),
            dim_y: 1,
            omega: CoeffObject::line(CoeffShape::torus(1), vec![2]),
            omega_one: CoeffObject::from_components(
                CoeffShape::torus(1),
                BTreeMap::from([(vec![0], 1), (vec![1], 1)]),
            ),
            boundary_lines: vec![vec![1]],
            boundary: None,
        },
    ];
    let mut alpha = BTreeMap::new();
    alpha.insert((cusp, m), vec![vec![0, 1]]);
    let model = FjModel {
        name: "jacobi".into(),
        description: "elliptic surface over the modular curve; open stabilizer non-reductive"
            .into(),
        dim: 2,
        poset,
        strata,
        alpha,
    };
    model.validate().expect("built-in model");
    model
}

/// Torus surface whose boundary is a simple normal crossing of two lines
/// meeting in a corner point.  All four strata share the rank-2 torus
/// coefficient category, so every restriction matrix is the identity.
pub fn snc_corner_toy() -> FjModel {
    let mut poset = StrataPoset::new();
    let m = poset.add_stratum("M", 0);
    let y1 = poset.add_stratum("Y1", 1);
    let y2 = poset.add_stratum("Y2", 1);
    let c = poset.add_stratum("C", 2);
    poset.add_relation(y1, m, Injection::empty(1));
    poset.add_relation(y2, m, Injection::empty(1));
    poset.add_relation(c, y1, Injection::new(vec![0], 2).unwrap());
    poset.add_relation(c, y2, Injection::new(vec![1], 2).unwrap());
    poset.add_relation(c, m, Injection::empty(2));
    let omega_one = CoeffObject::from_components(
        CoeffShape::torus(2),
        BTreeMap::from([(vec![-1, 0], 1), (vec![0, -1], 1)]),
    );
    let corner_stratum = |label: &str, codim: usize, lines: Vec<Weight>, unit: usize| StratumModel {
        label: label.into(),
        group: GroupDatum::torus(2),
        shape: CoeffShape::torus(2),
        dim_y: 2 - codim,
        omega: CoeffObject::line(CoeffShape::torus(2), vec![-1, -1]),
        omega_one: omega_one.clone(),
        boundary_lines: lines,
        boundary: (codim > 0).then(|| BoundaryDatum::new(0, 0, unit)),
    };
    let strata = vec![
        corner_stratum("M", 0, vec![], 0),
        corner_stratum("Y1", 1, vec![vec![-1, 0]], 1),
        corner_stratum("Y2", 1, vec![vec![0, -1]], 2),
        corner_stratum("C", 2, vec![vec![-1, 0], vec![0, -1]], 3),
    ];
    let mut alpha = BTreeMap::new();
    for (z, y) in [(y1, m), (y2, m), (c, y1), (c, y2), (c, m)] {
        alpha.insert((z, y), identity_lattice(2));
    }
    let model = FjModel {
        name: "snc_corner_toy".into(),
        description: "torus surface with two boundary lines crossing in a corner".into(),
        dim: 2,
        poset,
        strata,
        alpha,
    };
    model.validate().expect("built-in model");
    model
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_models_validate() {
        for model in [modular_curve(), compact_p1(), jacobi(), snc_corner_toy()] {
            assert!(model.validate().is_ok(), "{}", model.name);
        }
    }

    #[test]
    fn modular_alpha_carries_omega() {
        let model = modular_curve();
        let (m, cusp) = (model.by_label("M").unwrap(), model.by_label("cusp").unwrap());
        let restricted = model
            .restrict_object(cusp, m, &model.stratum(m).omega)
            .unwrap();
        assert_eq!(restricted, model.stratum(cusp).omega);
        assert_eq!(model.alpha(m, m).unwrap(), identity_lattice(2));
        assert!(model.alpha(m, cusp).is_err());
    }

    #[test]
    fn corner_chains_compose() {
        let model = snc_corner_toy();
        assert_eq!(model.comparable_pairs().len(), 5);
        assert_eq!(model.chains().len(), 2);
        let open = model.open_id().unwrap();
        assert_eq!(model.poset.label(open), "M");
    }

    #[test]
    fn jacobi_open_group_is_not_reductive() {
        let model = jacobi();
        let m = model.open_id().unwrap();
        assert!(!model.stratum(m).group.is_reductive());
        assert_eq!(model.stratum(m).group.unipotent_weights().len(), 3);
    }

    #[test]
    fn alpha_push_restricts_a_grid() {
        let model = modular_curve();
        let (m, cusp) = (model.by_label("M").unwrap(), model.by_label("cusp").unwrap());
        let line = CoeffObject::line(CoeffShape::gl2_borel(), vec![3, 0]);
        let grid = crate::grid::canonical_extension(&line, 0);
        let pushed = model.alpha_push(cusp, m, &grid).unwrap();
        assert_eq!(
            pushed.evaluate(&[]),
            CoeffObject::line(CoeffShape::torus(1), vec![0])
        );
    }

    #[test]
    fn broken_alpha_is_rejected() {
        let mut model = modular_curve();
        let (m, cusp) = (model.by_label("M").unwrap(), model.by_label("cusp").unwrap());
        model.alpha.insert((cusp, m), vec![vec![1, 0]]);
        assert!(matches!(
            model.validate(),
            Err(FjError::ModelInvalid(msg)) if msg.contains("omega")
        ));
    }
}
