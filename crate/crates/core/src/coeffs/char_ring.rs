//! Semisimple representation rings used on compact duals.
//!
//! [`TorusRep`] is a multiset of characters of a split torus.  [`Gl2Rep`] is
//! a non-negative combination of the irreducibles `Sym^a(std) (x) det^b`,
//! with the tensor product expanded by the Clebsch-Gordan rule.  Both are
//! bookkeeping devices: the objects carrying actual operators live in
//! [`super::CoeffObject`].

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::object::{weight_add, weight_key, weight_neg};
use super::Weight;

/// Multiset of torus characters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorusRep {
    rank: usize,
    mults: BTreeMap<Weight, usize>,
}

impl TorusRep {
    pub fn zero(rank: usize) -> Self {
        TorusRep {
            rank,
            mults: BTreeMap::new(),
        }
    }

    pub fn line(rank: usize, w: Weight) -> Self {
        assert_eq!(w.len(), rank);
        TorusRep {
            rank,
            mults: [(w, 1)].into_iter().collect(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn mults(&self) -> &BTreeMap<Weight, usize> {
        &self.mults
    }

    pub fn dim(&self) -> usize {
        self.mults.values().sum()
    }

    pub fn multiplicity(&self, w: &[i64]) -> usize {
        self.mults.get(w).copied().unwrap_or(0)
    }

    pub fn add_weight(&mut self, w: Weight, mult: usize) {
        assert_eq!(w.len(), self.rank);
        if mult > 0 {
            *self.mults.entry(w).or_insert(0) += mult;
        }
    }

    pub fn direct_sum(&self, other: &TorusRep) -> TorusRep {
        assert_eq!(self.rank, other.rank);
        let mut out = self.clone();
        for (w, &m) in &other.mults {
            out.add_weight(w.clone(), m);
        }
        out
    }

    pub fn tensor(&self, other: &TorusRep) -> TorusRep {
        assert_eq!(self.rank, other.rank);
        let mut out = TorusRep::zero(self.rank);
        for (w1, &m1) in &self.mults {
            for (w2, &m2) in &other.mults {
                out.add_weight(weight_add(w1, w2), m1 * m2);
            }
        }
        out
    }

    pub fn dual(&self) -> TorusRep {
        TorusRep {
            rank: self.rank,
            mults: self.mults.iter().map(|(w, &m)| (weight_neg(w), m)).collect(),
        }
    }

    pub fn invariant_multiplicity(&self) -> usize {
        self.multiplicity(&vec![0; self.rank])
    }

    /// Push forward along a homomorphism of tori given on weight lattices by
    /// an integer matrix acting on weight column vectors.
    pub fn map_weights(&self, matrix: &[Vec<i64>]) -> TorusRep {
        let new_rank = matrix.len();
        let mut out = TorusRep::zero(new_rank);
        for (w, &m) in &self.mults {
            let img: Weight = matrix
                .iter()
                .map(|row| {
                    assert_eq!(row.len(), self.rank);
                    row.iter().zip(w).map(|(a, b)| a * b).sum()
                })
                .collect();
            out.add_weight(img, m);
        }
        out
    }
}

/// Non-negative combination of `Sym^a(std) (x) det^b`, keyed by `(a, b)`.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Gl2Rep {
    terms: BTreeMap<(u32, i64), usize>,
}

impl Gl2Rep {
    pub fn zero() -> Self {
        Gl2Rep::default()
    }

    pub fn irreducible(a: u32, b: i64) -> Self {
        Gl2Rep {
            terms: [((a, b), 1)].into_iter().collect(),
        }
    }

    pub fn trivial() -> Self {
        Gl2Rep::irreducible(0, 0)
    }

    pub fn std() -> Self {
        Gl2Rep::irreducible(1, 0)
    }

    pub fn det(n: i64) -> Self {
        Gl2Rep::irreducible(0, n)
    }

    pub fn terms(&self) -> &BTreeMap<(u32, i64), usize> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.terms
            .iter()
            .map(|(&(a, _), &m)| (a as usize + 1) * m)
            .sum()
    }

    pub fn add_term(&mut self, a: u32, b: i64, mult: usize) {
        if mult > 0 {
            *self.terms.entry((a, b)).or_insert(0) += mult;
        }
    }

    pub fn direct_sum(&self, other: &Gl2Rep) -> Gl2Rep {
        let mut out = self.clone();
        for (&(a, b), &m) in &other.terms {
            out.add_term(a, b, m);
        }
        out
    }

    pub fn twist_det(&self, n: i64) -> Gl2Rep {
        Gl2Rep {
            terms: self.terms.iter().map(|(&(a, b), &m)| ((a, b + n), m)).collect(),
        }
    }

    /// Clebsch-Gordan: `Sym^a (x) Sym^c = sum_{i=0..min(a,c)} Sym^{a+c-2i} det^i`.
    pub fn tensor(&self, other: &Gl2Rep) -> Gl2Rep {
        let mut out = Gl2Rep::zero();
        for (&(a, b), &m1) in &self.terms {
            for (&(c, d), &m2) in &other.terms {
                for i in 0..=a.min(c) {
                    out.add_term(a + c - 2 * i, b + d + i as i64, m1 * m2);
                }
            }
        }
        out
    }

    /// `(Sym^a det^b)^* = Sym^a det^{-a-b}`.
    pub fn dual(&self) -> Gl2Rep {
        Gl2Rep {
            terms: self
                .terms
                .iter()
                .map(|(&(a, b), &m)| ((a, -(a as i64) - b), m))
                .collect(),
        }
    }

    pub fn multiplicity(&self, a: u32, b: i64) -> usize {
        self.terms.get(&(a, b)).copied().unwrap_or(0)
    }

    pub fn invariant_multiplicity(&self) -> usize {
        self.multiplicity(0, 0)
    }

    /// Restriction to the maximal torus: `Sym^a det^b` has weights
    /// `(a - i + b, i + b)` for `i = 0..=a`.
    pub fn to_torus(&self) -> TorusRep {
        let mut out = TorusRep::zero(2);
        for (&(a, b), &m) in &self.terms {
            for i in 0..=a as i64 {
                out.add_weight(vec![a as i64 - i + b, i + b], m);
            }
        }
        out
    }

    /// Restriction along `t -> diag(t, 1)`: keep the first weight coordinate.
    pub fn restrict_first_factor(&self) -> TorusRep {
        self.to_torus().map_weights(&[vec![1, 0]])
    }
}

/// Stable sort key rendering for report output.
pub fn torus_rep_display(rep: &TorusRep) -> Vec<(String, usize)> {
    rep.mults()
        .iter()
        .map(|(w, &m)| (weight_key(w), m))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Laurent polynomial in two variables, the character oracle.
    type Character = BTreeMap<(i64, i64), i64>;

    fn char_of(rep: &Gl2Rep) -> Character {
        let mut out = Character::new();
        for (&(a, b), &m) in rep.terms() {
            for i in 0..=a as i64 {
                *out.entry((a as i64 - i + b, i + b)).or_insert(0) += m as i64;
            }
        }
        out.retain(|_, v| *v != 0);
        out
    }

    fn char_mul(x: &Character, y: &Character) -> Character {
        let mut out = Character::new();
        for ((a1, b1), c1) in x {
            for ((a2, b2), c2) in y {
                *out.entry((a1 + a2, b1 + b2)).or_insert(0) += c1 * c2;
            }
        }
        out.retain(|_, v| *v != 0);
        out
    }

    #[test]
    fn clebsch_gordan_matches_character_product() {
        for a in 0..6u32 {
            for c in 0..6u32 {
                for b in [-2i64, 0, 3] {
                    let x = Gl2Rep::irreducible(a, b);
                    let y = Gl2Rep::irreducible(c, 1);
                    let product = x.tensor(&y);
                    assert_eq!(
                        char_of(&product),
                        char_mul(&char_of(&x), &char_of(&y)),
                        "a={a} c={c} b={b}"
                    );
                    assert_eq!(product.dim(), x.dim() * y.dim());
                }
            }
        }
    }

    #[test]
    fn dual_character_inverts_weights() {
        let rep = Gl2Rep::irreducible(3, -1).direct_sum(&Gl2Rep::det(2));
        let dual_char = char_of(&rep.dual());
        let expected: Character = char_of(&rep)
            .into_iter()
            .map(|((a, b), c)| ((-a, -b), c))
            .collect();
        assert_eq!(dual_char, expected);
    }

    #[test]
    fn invariants_via_dual_tensor() {
        // mult of W in V equals invariants of V (x) W^*
        let v = Gl2Rep::irreducible(2, 0).direct_sum(&Gl2Rep::irreducible(2, 0));
        let w = Gl2Rep::irreducible(2, 0);
        assert_eq!(v.tensor(&w.dual()).invariant_multiplicity(), 2);
        let other = Gl2Rep::irreducible(4, -1);
        assert_eq!(v.tensor(&other.dual()).invariant_multiplicity(), 0);
    }

    #[test]
    fn restriction_to_first_factor() {
        // Sym^2 std has torus weights (2,0), (1,1), (0,2)
        let rep = Gl2Rep::irreducible(2, 0);
        let restricted = rep.restrict_first_factor();
        assert_eq!(restricted.multiplicity(&[2]), 1);
        assert_eq!(restricted.multiplicity(&[1]), 1);
        assert_eq!(restricted.multiplicity(&[0]), 1);
        assert_eq!(restricted.dim(), 3);
    }

    #[test]
    fn torus_rep_ring_ops() {
        let a = TorusRep::line(2, vec![1, 0]);
        let b = TorusRep::line(2, vec![-1, 0]);
        let t = a.tensor(&b);
        assert_eq!(t.invariant_multiplicity(), 1);
        assert_eq!(a.dual(), b);
        let s = a.direct_sum(&b);
        assert_eq!(s.dim(), 2);
        assert_eq!(s.tensor(&s).dim(), 4);
    }
}
