//! Small affine-linear constraint solver over the rationals.
//!
//! Morphism spaces in every layer of this crate reduce to systems of matrix
//! equations whose unknowns are the entries of the component blocks.  The
//! [`VarSystem`] collects those equations sparsely and solves them in one
//! pass, returning a particular solution together with a basis of the
//! homogeneous solution space.

use std::collections::BTreeMap;

use super::object::weight_add;
use super::{CoeffMorphism, CoeffObject, Weight};
use crate::linalg::{Rat, RationalMatrix};

/// A linear combination of solver variables plus a constant.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct AffineExpr {
    terms: BTreeMap<usize, Rat>,
    constant: Rat,
}

impl AffineExpr {
    pub fn constant(c: Rat) -> Self {
        AffineExpr {
            terms: BTreeMap::new(),
            constant: c,
        }
    }

    pub fn var(idx: usize) -> Self {
        AffineExpr {
            terms: [(idx, Rat::one())].into_iter().collect(),
            constant: Rat::zero(),
        }
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &AffineExpr) -> AffineExpr {
        let mut out = self.clone();
        for (i, c) in &other.terms {
            let entry = out.terms.entry(*i).or_insert_with(Rat::zero);
            *entry = entry.clone() + c.clone();
            if entry.is_zero() {
                out.terms.remove(i);
            }
        }
        out.constant = out.constant.clone() + other.constant.clone();
        out
    }

    pub fn scale(&self, c: &Rat) -> AffineExpr {
        if c.is_zero() {
            return AffineExpr::default();
        }
        AffineExpr {
            terms: self.terms.iter().map(|(i, v)| (*i, v.clone() * c.clone())).collect(),
            constant: self.constant.clone() * c.clone(),
        }
    }

    pub fn sub(&self, other: &AffineExpr) -> AffineExpr {
        self.add(&other.scale(&Rat::from_int(-1)))
    }

    pub fn eval(&self, assignment: &[Rat]) -> Rat {
        let mut acc = self.constant.clone();
        for (i, c) in &self.terms {
            acc = acc + c.clone() * assignment[*i].clone();
        }
        acc
    }
}

/// A matrix of affine expressions.
#[derive(Clone, Debug)]
pub struct ExprMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<AffineExpr>,
}

impl ExprMatrix {
    pub fn from_const(m: &RationalMatrix) -> Self {
        let entries = (0..m.rows())
            .flat_map(|i| (0..m.cols()).map(move |j| (i, j)))
            .map(|(i, j)| AffineExpr::constant(m[(i, j)].clone()))
            .collect();
        ExprMatrix {
            rows: m.rows(),
            cols: m.cols(),
            entries,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &AffineExpr {
        &self.entries[i * self.cols + j]
    }

    pub fn sub(&self, other: &ExprMatrix) -> ExprMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        ExprMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a.sub(b))
                .collect(),
        }
    }

    /// Multiply by a constant matrix on the left.
    pub fn lmul(&self, m: &RationalMatrix) -> ExprMatrix {
        assert_eq!(m.cols(), self.rows, "lmul shape");
        let mut entries = Vec::with_capacity(m.rows() * self.cols);
        for i in 0..m.rows() {
            for j in 0..self.cols {
                let mut acc = AffineExpr::default();
                for k in 0..self.rows {
                    acc = acc.add(&self.at(k, j).scale(&m[(i, k)]));
                }
                entries.push(acc);
            }
        }
        ExprMatrix {
            rows: m.rows(),
            cols: self.cols,
            entries,
        }
    }

    /// Multiply by a constant matrix on the right.
    pub fn rmul(&self, m: &RationalMatrix) -> ExprMatrix {
        assert_eq!(self.cols, m.rows(), "rmul shape");
        let mut entries = Vec::with_capacity(self.rows * m.cols());
        for i in 0..self.rows {
            for j in 0..m.cols() {
                let mut acc = AffineExpr::default();
                for k in 0..self.cols {
                    acc = acc.add(&self.at(i, k).scale(&m[(k, j)]));
                }
                entries.push(acc);
            }
        }
        ExprMatrix {
            rows: self.rows,
            cols: m.cols(),
            entries,
        }
    }

    pub fn eval(&self, assignment: &[Rat]) -> RationalMatrix {
        let mut out = RationalMatrix::zero(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self.at(i, j).eval(assignment);
            }
        }
        out
    }
}

/// Outcome of solving a [`VarSystem`].
#[derive(Clone, Debug)]
pub struct SystemSolution {
    /// one particular solution (all free variables set to zero)
    pub particular: Vec<Rat>,
    /// columns form a basis of the homogeneous solution space
    pub kernel: RationalMatrix,
}

impl SystemSolution {
    pub fn dim(&self) -> usize {
        self.kernel.cols()
    }

    /// particular + kernel * coeffs
    pub fn member(&self, coeffs: &[Rat]) -> Vec<Rat> {
        assert_eq!(coeffs.len(), self.kernel.cols());
        let shift = self.kernel.mul_vec(coeffs);
        self.particular
            .iter()
            .zip(shift)
            .map(|(p, s)| p.clone() + s)
            .collect()
    }
}

/// Accumulates affine constraints over fresh variables and solves them.
#[derive(Clone, Debug, Default)]
pub struct VarSystem {
    num_vars: usize,
    // sparse rows: (coefficients, constant); the row asserts expr == 0
    rows: Vec<(BTreeMap<usize, Rat>, Rat)>,
}

impl VarSystem {
    pub fn new() -> Self {
        VarSystem::default()
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_constraints(&self) -> usize {
        self.rows.len()
    }

    pub fn fresh_var(&mut self) -> AffineExpr {
        let idx = self.num_vars;
        self.num_vars += 1;
        AffineExpr::var(idx)
    }

    pub fn fresh_matrix(&mut self, rows: usize, cols: usize) -> ExprMatrix {
        let entries = (0..rows * cols).map(|_| self.fresh_var()).collect();
        ExprMatrix {
            rows,
            cols,
            entries,
        }
    }

    pub fn require_zero(&mut self, e: &AffineExpr) {
        if e.is_constant() && e.constant.is_zero() {
            return;
        }
        self.rows.push((e.terms.clone(), e.constant.clone()));
    }

    pub fn require_zero_matrix(&mut self, m: &ExprMatrix) {
        for e in &m.entries {
            self.require_zero(e);
        }
    }

    pub fn require_eq(&mut self, a: &ExprMatrix, b: &ExprMatrix) {
        self.require_zero_matrix(&a.sub(b));
    }

    /// Solve all constraints.  `None` means the system is inconsistent.
    pub fn solve(&self) -> Option<SystemSolution> {
        let mut a = RationalMatrix::zero(self.rows.len(), self.num_vars);
        let mut b = Vec::with_capacity(self.rows.len());
        for (i, (terms, constant)) in self.rows.iter().enumerate() {
            for (j, c) in terms {
                a[(i, *j)] = c.clone();
            }
            b.push(Rat::zero() - constant.clone());
        }
        let particular = a.solve(&b)?;
        Some(SystemSolution {
            particular,
            kernel: a.kernel_basis(),
        })
    }
}

/// Basis of the space of morphisms `source -> target`.
pub fn hom_basis(source: &CoeffObject, target: &CoeffObject) -> Vec<CoeffMorphism> {
    assert_eq!(source.shape(), target.shape(), "hom between shapes");
    let mut sys = VarSystem::new();
    let mut unknowns: BTreeMap<Weight, ExprMatrix> = BTreeMap::new();
    for (w, &s) in source.components() {
        let t = target.dim_at(w);
        if t > 0 {
            unknowns.insert(w.clone(), sys.fresh_matrix(t, s));
        }
    }
    let block_of = |unknowns: &BTreeMap<Weight, ExprMatrix>, w: &Weight, t: usize, s: usize| {
        unknowns
            .get(w)
            .cloned()
            .unwrap_or_else(|| ExprMatrix::from_const(&RationalMatrix::zero(t, s)))
    };
    let shape = source.shape().clone();
    for (k, shift) in shape.op_shifts.iter().enumerate() {
        for (w, &s) in source.components() {
            let ws = weight_add(w, shift);
            let f_w = block_of(&unknowns, w, target.dim_at(w), s);
            let f_ws = block_of(&unknowns, &ws, target.dim_at(&ws), source.dim_at(&ws));
            let lhs = f_w.lmul(&target.op_block(k, w));
            let rhs = f_ws.rmul(&source.op_block(k, w));
            sys.require_eq(&lhs, &rhs);
        }
    }
    let sol = sys.solve().expect("homogeneous system is consistent");
    let mut out = Vec::new();
    for j in 0..sol.kernel.cols() {
        let assignment = sol.kernel.col(j);
        let mut blocks = BTreeMap::new();
        for (w, um) in &unknowns {
            blocks.insert(w.clone(), um.eval(&assignment));
        }
        let m = CoeffMorphism::new(source.clone(), target.clone(), blocks)
            .expect("solver output is equivariant");
        out.push(m);
    }
    out
}

pub fn hom_dim(source: &CoeffObject, target: &CoeffObject) -> usize {
    hom_basis(source, target).len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::CoeffShape;

    #[test]
    fn solve_inhomogeneous_system() {
        // x + y = 3, x - y = 1  =>  x = 2, y = 1
        let mut sys = VarSystem::new();
        let x = sys.fresh_var();
        let y = sys.fresh_var();
        sys.require_zero(&x.add(&y).sub(&AffineExpr::constant(Rat::from_int(3))));
        sys.require_zero(&x.sub(&y).sub(&AffineExpr::constant(Rat::from_int(1))));
        let sol = sys.solve().unwrap();
        assert_eq!(sol.dim(), 0);
        assert_eq!(sol.particular, vec![Rat::from_int(2), Rat::from_int(1)]);
    }

    #[test]
    fn detect_inconsistency() {
        let mut sys = VarSystem::new();
        let x = sys.fresh_var();
        sys.require_zero(&x.sub(&AffineExpr::constant(Rat::from_int(1))));
        sys.require_zero(&x.sub(&AffineExpr::constant(Rat::from_int(2))));
        assert!(sys.solve().is_none());
    }

    #[test]
    fn underdetermined_kernel() {
        let mut sys = VarSystem::new();
        let x = sys.fresh_var();
        let y = sys.fresh_var();
        sys.require_zero(&x.add(&y));
        let sol = sys.solve().unwrap();
        assert_eq!(sol.dim(), 1);
        let m = sol.member(&[Rat::from_int(5)]);
        assert_eq!(m[0].clone() + m[1].clone(), Rat::zero());
    }

    #[test]
    fn hom_between_torus_lines() {
        let shape = CoeffShape::torus(2);
        let a = CoeffObject::line(shape.clone(), vec![1, 0]);
        let b = CoeffObject::line(shape.clone(), vec![0, 1]);
        assert_eq!(hom_dim(&a, &a), 1);
        assert_eq!(hom_dim(&a, &b), 0, "different weights admit no maps");
    }

    #[test]
    fn hom_respects_operators() {
        // 2-dim indecomposable with op entry 1 vs entry 0: End dims differ
        let shape = CoeffShape::gl2_borel();
        let mk = |c: i64| {
            let mut obj = CoeffObject::from_components(
                shape.clone(),
                [(vec![0, 0], 1), (vec![-1, 1], 1)].into_iter().collect(),
            );
            obj.set_op_block(
                0,
                vec![0, 0],
                RationalMatrix::from_rows(vec![vec![Rat::from_int(c)]]),
            );
            obj
        };
        let nonsplit = mk(1);
        let split = mk(0);
        // maps are weight-preserving, so each is diagonal (f0, f1); the op
        // forces f0 = f1 whenever it is nonzero on either side
        assert_eq!(hom_dim(&nonsplit, &nonsplit), 1);
        assert_eq!(hom_dim(&split, &split), 2);
        assert_eq!(hom_dim(&nonsplit, &split), 1, "op on target is zero, so f1 = 0 frees f0");
        assert_eq!(hom_dim(&split, &nonsplit), 1);
    }

    #[test]
    fn expr_matrix_multiplication_consistency() {
        let mut sys = VarSystem::new();
        let m = sys.fresh_matrix(2, 2);
        let c = RationalMatrix::from_i64(&[&[1, 2], &[3, 4]]);
        let lhs = m.lmul(&c);
        let assignment: Vec<Rat> = (1..=4).map(Rat::from_int).collect();
        let evaluated = lhs.eval(&assignment);
        let direct = c.mul(&m.eval(&assignment));
        assert_eq!(evaluated, direct);
    }
}
