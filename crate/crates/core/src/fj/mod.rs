//! Fourier-Jacobi objects over a strata poset.
//!
//! A model fixes the poset, one stabilizer group and coefficient category per
//! stratum, and the weight-lattice maps along which coefficients restrict
//! from a stratum to the strata in its closure.  An object is then a grid
//! module per stratum together with gluing isomorphisms identifying the
//! restricted values of a stratum with the stabilized values of each deeper
//! one.  On top of that sit the Abelian calculus, the tensor product, the
//! restriction/coextension adjunctions, the structural objects (unit, the
//! canonical bundles, logarithmic differentials, first jets), the residue
//! resolution and the Ext-dimension pipeline.

mod ext;
mod functors;
mod model;
mod morphism;
mod object;
mod residue;
mod structural;

pub use ext::{ext_dim, ExtOutcome, ExtTarget, ExtValue};
pub use functors::{
    coextend, extend_by_zero, fj_expansion, global_sections, restrict_at, tensor_fj, truncate,
    ExpansionComponent, ExpansionReport,
};
pub use model::{compact_p1, jacobi, modular_curve, snc_corner_toy, FjModel, StratumModel};
pub use morphism::{ab_ops, hom_fj, FjMorphism};
pub use object::{jacobi_object, modular_forms_object, FjFlags, FjObject};
pub use residue::{residue_resolution, ResidueResolution};
pub use structural::{jet1, omega, omega_bar, omega_can, omega_log_prime, omega_prime, unit_object};

use thiserror::Error;

use crate::coeffs::CoeffError;
use crate::grid::GridError;
use crate::poset::PosetError;

#[derive(Error, Debug)]
pub enum FjError {
    #[error("model is not well-formed: {0}")]
    ModelInvalid(String),
    #[error("unknown stratum {0}")]
    UnknownStratum(String),
    #[error("gluing data violated: {0}")]
    GluingMismatch(String),
    #[error("Kan-extension finiteness violated: {0}")]
    KanViolation(String),
    #[error("operation needs torsion-free inputs: {0}")]
    NotTorsionFree(String),
    #[error("complex is not exact at stratum {stratum}, degree {degree:?}, term {term}")]
    NotExact {
        stratum: String,
        degree: Vec<i64>,
        term: usize,
    },
    #[error("not computable: {0}")]
    NotComputable(String),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("jets are supported at first order only, got order {0}")]
    UnsupportedJetOrder(usize),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Coeff(#[from] CoeffError),
    #[error(transparent)]
    Poset(#[from] PosetError),
}
