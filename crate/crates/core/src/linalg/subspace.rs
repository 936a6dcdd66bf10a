use super::{Rat, RationalMatrix};

/// A subspace of Q^n, held as a column-span in reduced form so that equality
/// of subspaces is equality of representations.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Subspace {
    ambient: usize,
    /// `ambient x dim`, columns form a basis in column-reduced order.
    basis: RationalMatrix,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: RationalMatrix::zero(ambient, 0),
        }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: RationalMatrix::identity(ambient),
        }
    }

    /// Span of the columns of `m`.
    pub fn from_columns(m: &RationalMatrix) -> Self {
        // Reduce via the row space of the transpose: rref rows are a canonical
        // basis, so equal spans yield identical `basis` matrices.
        let (r, pivots) = m.transpose().rref();
        let rows: Vec<usize> = (0..pivots.len()).collect();
        let cols: Vec<usize> = (0..r.cols()).collect();
        Subspace {
            ambient: m.rows(),
            basis: r.submatrix(&rows, &cols).transpose(),
        }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn basis(&self) -> &RationalMatrix {
        &self.basis
    }

    pub fn contains(&self, v: &[Rat]) -> bool {
        self.basis.solve(v).is_some()
    }

    pub fn contains_space(&self, other: &Subspace) -> bool {
        assert_eq!(self.ambient, other.ambient);
        (0..other.dim()).all(|j| self.contains(&other.basis.col(j)))
    }

    /// Coordinates of `v` in the stored basis, if `v` lies in the subspace.
    pub fn coords(&self, v: &[Rat]) -> Option<Vec<Rat>> {
        self.basis.solve(v)
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.ambient, other.ambient);
        Subspace::from_columns(&self.basis.hstack(&other.basis))
    }

    pub fn intersect(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.ambient, other.ambient);
        // null space of [A | -B] gives pairs (x, y) with Ax = By
        let joint = self.basis.hstack(&other.basis.scale(&-Rat::one()));
        let null = joint.kernel_basis();
        let x_rows: Vec<usize> = (0..self.dim()).collect();
        let x_cols: Vec<usize> = (0..null.cols()).collect();
        let x = null.submatrix(&x_rows, &x_cols);
        Subspace::from_columns(&self.basis.mul(&x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cols(m: &[&[i64]]) -> Subspace {
        Subspace::from_columns(&RationalMatrix::from_i64(m).transpose())
    }

    #[test]
    fn canonical_form_makes_equality_work() {
        let a = cols(&[&[1, 0, 1], &[0, 1, 1]]);
        let b = cols(&[&[1, 1, 2], &[1, -1, 0]]);
        assert_eq!(a, b, "same plane, different spanning sets");
        assert_eq!(a.dim(), 2);
    }

    #[test]
    fn sum_and_intersection() {
        let x = cols(&[&[1, 0, 0]]);
        let y = cols(&[&[0, 1, 0]]);
        let xy = x.sum(&y);
        assert_eq!(xy.dim(), 2);
        assert_eq!(x.intersect(&y).dim(), 0);
        let diag = cols(&[&[1, 1, 0]]);
        assert_eq!(xy.intersect(&diag), diag);
        assert!(xy.contains_space(&diag));
        assert!(!diag.contains_space(&xy));
    }

    #[test]
    fn modular_law_sample() {
        // dim(U + W) + dim(U cap W) = dim U + dim W
        let u = cols(&[&[1, 2, 0], &[0, 0, 1]]);
        let w = cols(&[&[1, 2, 3], &[1, 0, 0]]);
        assert_eq!(
            u.sum(&w).dim() + u.intersect(&w).dim(),
            u.dim() + w.dim()
        );
    }
}
