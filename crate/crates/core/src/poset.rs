//! Strata combinatorics of an abstract toroidal model.
//!
//! A [`StrataPoset`] records a finite set of strata with codimensions, the
//! closure order, and for each comparable pair an injection identifying the
//! boundary directions of the larger stratum inside those of the smaller.
//! No geometry is attached; everything downstream consumes only this data.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PosetError {
    #[error("unknown stratum: {0}")]
    UnknownStratum(String),
    #[error("strata not comparable: {0} vs {1}")]
    NotComparable(String, String),
    #[error("bad injection: {0}")]
    BadInjection(String),
}

/// An injection `[domain] -> [codomain]`, 0-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Injection {
    codomain: usize,
    map: Vec<usize>,
}

impl Injection {
    pub fn new(map: Vec<usize>, codomain: usize) -> Result<Self, PosetError> {
        let mut seen = vec![false; codomain];
        for &i in &map {
            if i >= codomain {
                return Err(PosetError::BadInjection(format!(
                    "index {i} out of range {codomain}"
                )));
            }
            if seen[i] {
                return Err(PosetError::BadInjection(format!("index {i} repeated")));
            }
            seen[i] = true;
        }
        Ok(Injection { codomain, map })
    }

    pub fn identity(n: usize) -> Self {
        Injection {
            codomain: n,
            map: (0..n).collect(),
        }
    }

    /// The empty injection `[0] -> [n]`.
    pub fn empty(codomain: usize) -> Self {
        Injection {
            codomain,
            map: Vec::new(),
        }
    }

    pub fn domain(&self) -> usize {
        self.map.len()
    }

    pub fn codomain(&self) -> usize {
        self.codomain
    }

    pub fn apply(&self, i: usize) -> usize {
        self.map[i]
    }

    pub fn indices(&self) -> &[usize] {
        &self.map
    }

    pub fn is_identity(&self) -> bool {
        self.codomain == self.map.len() && self.map.iter().enumerate().all(|(i, &j)| i == j)
    }

    pub fn contains(&self, target: usize) -> bool {
        self.map.contains(&target)
    }

    /// Index mapping to `target`, if any.
    pub fn preimage(&self, target: usize) -> Option<usize> {
        self.map.iter().position(|&j| j == target)
    }

    /// `next ∘ self`: first apply `self`, then `next`.
    pub fn then(&self, next: &Injection) -> Injection {
        assert_eq!(self.codomain, next.domain(), "composition mismatch");
        Injection {
            codomain: next.codomain,
            map: self.map.iter().map(|&i| next.map[i]).collect(),
        }
    }

    /// Missing indices in increasing order, as an injection
    /// `[codomain - domain] -> [codomain]`.
    pub fn complement(&self) -> Injection {
        let map: Vec<usize> = (0..self.codomain).filter(|i| !self.map.contains(i)).collect();
        Injection {
            codomain: self.codomain,
            map,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
struct StratumInfo {
    label: String,
    codim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
struct Relation {
    beta: Injection,
    beta_perp: Injection,
}

/// Strata with closure order and boundary-direction injections.
///
/// `leq(z, y)` means "z lies in the closure of y"; for such a pair,
/// `beta(z, y)` embeds the `n_y` boundary directions of `y` into the `n_z`
/// directions of `z`, and `complement(z, y)` lists the remaining directions
/// in increasing order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrataPoset {
    strata: Vec<StratumInfo>,
    relations: BTreeMap<(usize, usize), Relation>,
}

pub type StratumId = usize;

impl Default for StrataPoset {
    fn default() -> Self {
        Self::new()
    }
}

impl StrataPoset {
    pub fn new() -> Self {
        StrataPoset {
            strata: Vec::new(),
            relations: BTreeMap::new(),
        }
    }

    pub fn add_stratum(&mut self, label: &str, codim: usize) -> StratumId {
        assert!(
            self.strata.iter().all(|s| s.label != label),
            "duplicate stratum label {label}"
        );
        let id = self.strata.len();
        self.strata.push(StratumInfo {
            label: label.to_string(),
            codim,
        });
        let identity = Injection::identity(codim);
        self.relations.insert(
            (id, id),
            Relation {
                beta_perp: identity.complement(),
                beta: identity,
            },
        );
        id
    }

    /// Record `z ≤ y` with the direction injection `beta: [n_y] -> [n_z]`.
    /// The complement is filled deterministically (missing indices in
    /// increasing order).
    pub fn add_relation(&mut self, z: StratumId, y: StratumId, beta: Injection) {
        let beta_perp = beta.complement();
        self.add_relation_with_complement(z, y, beta, beta_perp);
    }

    pub fn add_relation_with_complement(
        &mut self,
        z: StratumId,
        y: StratumId,
        beta: Injection,
        beta_perp: Injection,
    ) {
        self.relations.insert((z, y), Relation { beta, beta_perp });
    }

    pub fn len(&self) -> usize {
        self.strata.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strata.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = StratumId> {
        0..self.strata.len()
    }

    pub fn label(&self, y: StratumId) -> &str {
        &self.strata[y].label
    }

    pub fn codim(&self, y: StratumId) -> usize {
        self.strata[y].codim
    }

    pub fn id_by_label(&self, label: &str) -> Option<StratumId> {
        self.strata.iter().position(|s| s.label == label)
    }

    pub fn leq(&self, z: StratumId, y: StratumId) -> bool {
        self.relations.contains_key(&(z, y))
    }

    pub fn beta(&self, z: StratumId, y: StratumId) -> Option<&Injection> {
        self.relations.get(&(z, y)).map(|r| &r.beta)
    }

    pub fn complement(&self, z: StratumId, y: StratumId) -> Result<&Injection, PosetError> {
        self.relations
            .get(&(z, y))
            .map(|r| &r.beta_perp)
            .ok_or_else(|| {
                PosetError::NotComparable(self.label(z).to_string(), self.label(y).to_string())
            })
    }

    /// Strata in the closure of `y` (including `y`).
    pub fn below(&self, y: StratumId) -> Vec<StratumId> {
        self.ids().filter(|&z| self.leq(z, y)).collect()
    }

    /// The unique maximal stratum, if the poset is well-formed.
    pub fn open_stratum(&self) -> Option<StratumId> {
        let maximal: Vec<StratumId> = self
            .ids()
            .filter(|&y| self.ids().all(|w| w == y || !self.leq(y, w)))
            .collect();
        match maximal.as_slice() {
            [m] if self.codim(*m) == 0 => Some(*m),
            _ => None,
        }
    }

    pub fn validate(&self) -> PosetReport {
        let mut violations = Vec::new();
        let n = self.strata.len();
        let lbl = |y: usize| self.strata[y].label.clone();
        // reflexivity and identity on the diagonal
        for y in 0..n {
            match self.relations.get(&(y, y)) {
                None => violations.push(format!("missing reflexive relation at {}", lbl(y))),
                Some(r) => {
                    if !r.beta.is_identity() || r.beta.codomain() != self.codim(y) {
                        violations.push(format!("beta at ({0}, {0}) is not the identity", lbl(y)));
                    }
                }
            }
        }
        // arity, antisymmetry, monotone codimension
        for (&(z, y), r) in &self.relations {
            if r.beta.domain() != self.codim(y) || r.beta.codomain() != self.codim(z) {
                violations.push(format!(
                    "beta at ({}, {}) has arity {}->{}, expected {}->{}",
                    lbl(z),
                    lbl(y),
                    r.beta.domain(),
                    r.beta.codomain(),
                    self.codim(y),
                    self.codim(z)
                ));
            }
            if z != y && self.leq(y, z) {
                violations.push(format!("antisymmetry fails between {} and {}", lbl(z), lbl(y)));
            }
            if self.codim(z) < self.codim(y) {
                violations.push(format!(
                    "codimension decreases along {} <= {}",
                    lbl(z),
                    lbl(y)
                ));
            }
            let expected_perp = r.beta.complement();
            if r.beta_perp != expected_perp {
                violations.push(format!(
                    "complement at ({}, {}) does not list the missing indices increasingly",
                    lbl(z),
                    lbl(y)
                ));
            }
        }
        // transitivity and the cocycle condition
        for w in 0..n {
            for z in 0..n {
                for y in 0..n {
                    if !(self.leq(w, z) && self.leq(z, y)) {
                        continue;
                    }
                    if !self.leq(w, y) {
                        violations.push(format!(
                            "transitivity fails: {} <= {} <= {} but not {} <= {}",
                            lbl(w),
                            lbl(z),
                            lbl(y),
                            lbl(w),
                            lbl(y)
                        ));
                        continue;
                    }
                    let first = &self.relations[&(z, y)].beta;
                    let second = &self.relations[&(w, z)].beta;
                    if first.codomain() != second.domain() {
                        // arity violation already recorded by the pair loop
                        continue;
                    }
                    let composed = first.then(second);
                    let direct = &self.relations[&(w, y)].beta;
                    if composed != *direct {
                        violations.push(format!(
                            "cocycle fails on chain {} <= {} <= {}",
                            lbl(w),
                            lbl(z),
                            lbl(y)
                        ));
                    }
                    // restriction square: transverse directions of (z, y)
                    // must land in transverse directions of (w, y)
                    let bzy_perp = &self.relations[&(z, y)].beta_perp;
                    let bwz = &self.relations[&(w, z)].beta;
                    let bwy_perp = &self.relations[&(w, y)].beta_perp;
                    if bzy_perp.codomain() != bwz.domain() {
                        continue;
                    }
                    for i in 0..bzy_perp.domain() {
                        let t = bwz.apply(bzy_perp.apply(i));
                        if bwy_perp.preimage(t).is_none() {
                            violations.push(format!(
                                "restriction square fails on chain {} <= {} <= {}",
                                lbl(w),
                                lbl(z),
                                lbl(y)
                            ));
                            break;
                        }
                    }
                }
            }
        }
        // unique maximal open stratum of codimension zero lying over everything
        match self.open_stratum() {
            None => violations.push("no unique maximal codimension-0 stratum".to_string()),
            Some(m) => {
                for z in 0..n {
                    if !self.leq(z, m) {
                        violations.push(format!("{} is not below the open stratum", lbl(z)));
                    }
                }
            }
        }
        PosetReport { violations }
    }

    /// The closure of `y` as a poset in its own right: codimensions are taken
    /// relative to `y` and transition maps are rewritten through the
    /// complements.
    pub fn restrict_to_closure(&self, y: StratumId) -> Result<StrataPoset, PosetError> {
        if y >= self.strata.len() {
            return Err(PosetError::UnknownStratum(format!("#{y}")));
        }
        let members = self.below(y);
        let mut out = StrataPoset::new();
        let mut new_id = BTreeMap::new();
        for &z in &members {
            let id = out.add_stratum(self.label(z), self.codim(z) - self.codim(y));
            new_id.insert(z, id);
        }
        for &z in &members {
            for &w in &members {
                if w == z || !self.leq(w, z) {
                    continue;
                }
                // solve beta'_{wz} from the restriction square:
                // beta_perp_{wy} ∘ beta' = beta_{wz} ∘ beta_perp_{zy}
                let bzy_perp = self.complement(z, y)?;
                let bwy_perp = self.complement(w, y)?;
                let bwz = self.beta(w, z).expect("relation present");
                let mut map = Vec::with_capacity(bzy_perp.domain());
                for i in 0..bzy_perp.domain() {
                    let t = bwz.apply(bzy_perp.apply(i));
                    let j = bwy_perp.preimage(t).ok_or_else(|| {
                        PosetError::BadInjection(format!(
                            "restriction square broken on ({}, {}) below {}",
                            self.label(w),
                            self.label(z),
                            self.label(y)
                        ))
                    })?;
                    map.push(j);
                }
                let beta = Injection::new(map, bwy_perp.domain())
                    .expect("restricted beta is injective");
                out.add_relation(new_id[&w], new_id[&z], beta);
            }
        }
        Ok(out)
    }
}

/// Validation outcome; empty violations means the poset is well-formed.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PosetReport {
    pub violations: Vec<String>,
}

impl PosetReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

mod wire {
    use super::*;

    #[derive(Serialize, Deserialize)]
    struct WireStratum {
        label: String,
        codim: usize,
    }

    #[derive(Serialize, Deserialize)]
    struct WireRelation {
        z: String,
        y: String,
        beta: Vec<usize>,
    }

    #[derive(Serialize, Deserialize)]
    struct WirePoset {
        strata: Vec<WireStratum>,
        relations: Vec<WireRelation>,
    }

    impl Serialize for StrataPoset {
        fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
            let strata = self
                .strata
                .iter()
                .map(|s| WireStratum {
                    label: s.label.clone(),
                    codim: s.codim,
                })
                .collect();
            let relations = self
                .relations
                .iter()
                .filter(|((z, y), _)| z != y)
                .map(|((z, y), r)| WireRelation {
                    z: self.label(*z).to_string(),
                    y: self.label(*y).to_string(),
                    beta: r.beta.indices().to_vec(),
                })
                .collect();
            WirePoset { strata, relations }.serialize(serializer)
        }
    }

    impl<'de> Deserialize<'de> for StrataPoset {
        fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
            use serde::de::Error;
            let wire = WirePoset::deserialize(deserializer)?;
            let mut poset = StrataPoset::new();
            for s in &wire.strata {
                poset.add_stratum(&s.label, s.codim);
            }
            for r in &wire.relations {
                let z = poset
                    .id_by_label(&r.z)
                    .ok_or_else(|| D::Error::custom(format!("unknown stratum {}", r.z)))?;
                let y = poset
                    .id_by_label(&r.y)
                    .ok_or_else(|| D::Error::custom(format!("unknown stratum {}", r.y)))?;
                let beta = Injection::new(r.beta.clone(), poset.codim(z))
                    .map_err(|e| D::Error::custom(e.to_string()))?;
                poset.add_relation(z, y, beta);
            }
            Ok(poset)
        }
    }
}
