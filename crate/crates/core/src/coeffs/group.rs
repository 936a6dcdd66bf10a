use serde::{Deserialize, Serialize};

use super::{CoeffError, CoeffShape, Weight};

/// The supported stabilizer shapes.
///
/// Every stratum of a model carries one of these.  `Semidirect` is a
/// reductive part acting on an abelian unipotent radical through the listed
/// weights; the `distinguished` lines are the normal one-dimensional
/// directions that the logarithmic differentials and jets filter through.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GroupShape {
    Torus {
        rank: usize,
    },
    Gl2,
    Semidirect {
        reductive: Box<GroupShape>,
        unipotent_weights: Vec<Weight>,
        distinguished: Vec<Weight>,
    },
}

impl GroupShape {
    pub fn is_reductive(&self) -> bool {
        match self {
            GroupShape::Torus { .. } | GroupShape::Gl2 => true,
            GroupShape::Semidirect {
                unipotent_weights, ..
            } => unipotent_weights.is_empty(),
        }
    }

    /// Rank of the maximal torus of the reductive part.
    pub fn torus_rank(&self) -> usize {
        match self {
            GroupShape::Torus { rank } => *rank,
            GroupShape::Gl2 => 2,
            GroupShape::Semidirect { reductive, .. } => reductive.torus_rank(),
        }
    }

    /// The coefficient category attached to equivariant sheaves for this
    /// shape: torus representations, Borel representations, or (for the
    /// semidirect case) the coefficients of the reductive part, since the
    /// unipotent action on our one-dimensional coefficients is trivial.
    pub fn coeff_shape(&self) -> CoeffShape {
        match self {
            GroupShape::Torus { rank } => CoeffShape::torus(*rank),
            GroupShape::Gl2 => CoeffShape::gl2_borel(),
            GroupShape::Semidirect { reductive, .. } => reductive.coeff_shape(),
        }
    }

    pub fn validate(&self) -> Result<(), CoeffError> {
        match self {
            GroupShape::Torus { .. } | GroupShape::Gl2 => Ok(()),
            GroupShape::Semidirect {
                reductive,
                unipotent_weights,
                distinguished,
            } => {
                if matches!(**reductive, GroupShape::Semidirect { .. }) {
                    return Err(CoeffError::BadGroupDatum(
                        "reductive part cannot itself be semidirect".into(),
                    ));
                }
                reductive.validate()?;
                let rank = reductive.torus_rank();
                for w in unipotent_weights.iter().chain(distinguished) {
                    if w.len() != rank {
                        return Err(CoeffError::BadGroupDatum(format!(
                            "weight {w:?} has rank {} but the torus has rank {rank}",
                            w.len()
                        )));
                    }
                }
                for u in distinguished {
                    if !unipotent_weights.contains(u) {
                        return Err(CoeffError::BadGroupDatum(format!(
                            "distinguished line {u:?} missing from the unipotent weights"
                        )));
                    }
                }
                Ok(())
            }
        }
    }
}

/// Group data attached to a stratum.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupDatum {
    pub shape: GroupShape,
}

impl GroupDatum {
    pub fn torus(rank: usize) -> Self {
        GroupDatum {
            shape: GroupShape::Torus { rank },
        }
    }

    pub fn gl2() -> Self {
        GroupDatum {
            shape: GroupShape::Gl2,
        }
    }

    pub fn semidirect(
        reductive: GroupShape,
        unipotent_weights: Vec<Weight>,
        distinguished: Vec<Weight>,
    ) -> Self {
        GroupDatum {
            shape: GroupShape::Semidirect {
                reductive: Box::new(reductive),
                unipotent_weights,
                distinguished,
            },
        }
    }

    pub fn is_reductive(&self) -> bool {
        self.shape.is_reductive()
    }

    pub fn coeff_shape(&self) -> CoeffShape {
        self.shape.coeff_shape()
    }

    pub fn validate(&self) -> Result<(), CoeffError> {
        self.shape.validate()
    }

    /// Unipotent weight list; empty for reductive shapes.
    pub fn unipotent_weights(&self) -> &[Weight] {
        match &self.shape {
            GroupShape::Semidirect {
                unipotent_weights, ..
            } => unipotent_weights,
            _ => &[],
        }
    }

    pub fn distinguished_lines(&self) -> &[Weight] {
        match &self.shape {
            GroupShape::Semidirect { distinguished, .. } => distinguished,
            _ => &[],
        }
    }
}
