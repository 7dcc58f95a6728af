//! Map specification documents.

use serde::{Deserialize, Serialize};

use crate::ball_geometry::{BallAutomorphism, BallPoint, Domain};
use crate::error::{Error, Result};
use crate::lft_models::{HyperbolicLft, HyperbolicLftForm, ParabolicLft, ParabolicLftForm, UpperBoundPolicy};
use crate::linalg::{CMatrix, CVector, C64};
use crate::self_maps::SelfMap;
use crate::semigroups::{AffineSiegelFlow, Semigroup};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Transport {
    /// Move a Siegel-domain map to the ball.
    Cayley,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MapSpec {
    LftHyperbolic {
        #[serde(flatten)]
        form: HyperbolicLftForm,
        #[serde(default)]
        upper_bound: UpperBoundPolicy,
        #[serde(default)]
        transport: Option<Transport>,
    },
    LftParabolic {
        #[serde(flatten)]
        form: ParabolicLftForm,
        #[serde(default)]
        transport: Option<Transport>,
    },
    BallAutomorphism {
        center: Vec<C64>,
        /// Identity when omitted.
        #[serde(default)]
        unitary: Option<Vec<Vec<C64>>>,
    },
    /// Applied in order: `maps[0]` first.
    Composition {
        maps: Vec<MapSpec>,
        #[serde(default)]
        transport: Option<Transport>,
    },
    SemigroupAffineSiegel {
        #[serde(flatten)]
        flow: AffineSiegelFlow,
        /// Time used when the semigroup stands in for a single map.
        #[serde(default = "one")]
        t: f64,
        #[serde(default)]
        transport: Option<Transport>,
    },
}

fn one() -> f64 {
    1.0
}

/// A validated normal form, when the spec is one.
pub enum NormalForm {
    Hyperbolic(HyperbolicLft),
    Parabolic(ParabolicLft),
}

impl MapSpec {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("map spec: {e}")))
    }

    fn transport(&self) -> Option<Transport> {
        match self {
            MapSpec::LftHyperbolic { transport, .. }
            | MapSpec::LftParabolic { transport, .. }
            | MapSpec::Composition { transport, .. }
            | MapSpec::SemigroupAffineSiegel { transport, .. } => *transport,
            MapSpec::BallAutomorphism { .. } => None,
        }
    }

    pub fn normal_form(&self) -> Result<Option<NormalForm>> {
        Ok(match self {
            MapSpec::LftHyperbolic { form, upper_bound, .. } => Some(NormalForm::Hyperbolic(form.validate(*upper_bound)?)),
            MapSpec::LftParabolic { form, .. } => Some(NormalForm::Parabolic(form.validate()?)),
            _ => None,
        })
    }

    pub fn semigroup(&self) -> Result<Option<Semigroup>> {
        match self {
            MapSpec::SemigroupAffineSiegel { flow, .. } => Semigroup::affine_siegel(flow.clone()).map(Some),
            _ => Ok(None),
        }
    }

    /// The map in its native coordinates, ignoring any transport.
    fn native(&self) -> Result<SelfMap> {
        match self {
            MapSpec::LftHyperbolic { form, upper_bound, .. } => form.validate(*upper_bound)?.to_self_map(),
            MapSpec::LftParabolic { form, .. } => form.validate()?.to_self_map(),
            MapSpec::BallAutomorphism { center, unitary } => {
                let w = BallPoint::from_slice(center)?;
                let q = center.len();
                let u = match unitary {
                    None => CMatrix::identity(q, q),
                    Some(rows) => {
                        if rows.len() != q || rows.iter().any(|r| r.len() != q) {
                            return Err(Error::InvalidInput(format!("unitary must be {q}x{q}")));
                        }
                        CMatrix::from_fn(q, q, |i, j| rows[i][j])
                    }
                };
                Ok(SelfMap::ball_automorphism(BallAutomorphism::new(&w, u)?))
            }
            MapSpec::Composition { maps, .. } => {
                let parts = maps.iter().map(|m| m.build()).collect::<Result<Vec<_>>>()?;
                SelfMap::compose(parts)
            }
            MapSpec::SemigroupAffineSiegel { flow, t, .. } => Semigroup::affine_siegel(flow.clone())?.at(*t),
        }
    }

    /// The map described by the spec, transport applied.
    pub fn build(&self) -> Result<SelfMap> {
        let map = self.native()?;
        match self.transport() {
            None => Ok(map),
            Some(Transport::Cayley) => {
                if map.domain() != Domain::Siegel {
                    return Err(Error::InvalidInput("Cayley transport applies to Siegel-domain maps".into()));
                }
                SelfMap::cayley_transport(map)
            }
        }
    }

    /// The map on the ball; Siegel maps are Cayley-transported.
    pub fn ball_map(&self) -> Result<SelfMap> {
        let map = self.build()?;
        match map.domain() {
            Domain::Ball => Ok(map),
            Domain::Siegel => SelfMap::cayley_transport(map),
        }
    }
}

/// Parses `[[re, im], ...]`.
pub fn parse_point(text: &str) -> Result<CVector> {
    let pairs: Vec<C64> = serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("point: {e}")))?;
    if pairs.is_empty() {
        return Err(Error::InvalidInput("point has no coordinates".into()));
    }
    Ok(CVector::from_vec(pairs))
}

pub fn point_pairs(z: &CVector) -> Vec<[f64; 2]> {
    z.iter().map(|x| [x.re, x.im]).collect()
}
