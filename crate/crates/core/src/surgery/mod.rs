//! Connected sums of surface flows: exact index bookkeeping for the four
//! ways a pair of removed equilibria can be glued, a numeric tube construction
//! for the equilibrium-free case, and the 3-manifold analogue.

mod inventory;
mod sum3;
mod tube;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::flowlab::{sector_index, FlowError};

pub use inventory::{connect_inventories, verify_inventory, IndexRow, InventoryReport, SumMode, SumPlan, SurfaceInventory};
pub use sum3::{sum3_check, SpecialSet, Sum3Inventory};
pub use tube::{numeric_connected_sum, Disc, TubeField, TubeOptions, TubeSum};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SurgeryError {
    #[error("plan mismatch: {0}")]
    PlanMismatch(String),
    #[error("inventory {which} has no equilibrium {spec}")]
    MissingEquilibrium { which: usize, spec: String },
    #[error("inventory {which} is invalid: {reason}")]
    InvalidInventory { which: usize, reason: String },
    #[error("removed 3D indices {a} and {b} do not cancel")]
    NotInverse { a: i64, b: i64 },
    #[error("disc {which} contains a zero of its field near ({re}, {im})")]
    DiscContainsZero { which: usize, re: f64, im: f64 },
    #[error("blended field has |F| = {value:e} on the tube boundary at ({re}, {im})")]
    BlendDegenerate { re: f64, im: f64, value: f64 },
    #[error("invalid tube: {0}")]
    InvalidTube(String),
    #[error(transparent)]
    Flow(#[from] FlowError),
}

/// An equilibrium described by its sector counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "SpecRepr", into = "SpecRepr")]
pub struct EquilibriumSpec {
    pub n_e: u32,
    pub n_h: u32,
}

impl EquilibriumSpec {
    pub const fn new(n_e: u32, n_h: u32) -> Self {
        Self { n_e, n_h }
    }

    /// Hyperbolic saddle, index -1.
    pub const SADDLE: Self = Self::new(0, 4);
    /// Centre: no sectors, closed orbits only, index +1.
    pub const CENTRE: Self = Self::new(0, 0);

    pub fn index(&self) -> Ratio<i64> {
        sector_index(self.n_e, self.n_h).value
    }

    /// The spec with elliptic and hyperbolic counts exchanged.
    pub fn dual(&self) -> Self {
        Self::new(self.n_h, self.n_e)
    }
}

impl std::fmt::Display for EquilibriumSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.n_e, self.n_h)
    }
}

#[derive(Serialize, Deserialize)]
struct SpecRepr {
    n_e: u32,
    n_h: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    index: Option<String>,
}

impl TryFrom<SpecRepr> for EquilibriumSpec {
    type Error = String;

    fn try_from(r: SpecRepr) -> Result<Self, String> {
        let spec = EquilibriumSpec::new(r.n_e, r.n_h);
        if let Some(s) = r.index {
            let given: Ratio<i64> = s.trim().parse().map_err(|_| format!("bad index {s:?}"))?;
            if given != spec.index() {
                return Err(format!("index {s} disagrees with sectors {spec}, which give {}", spec.index()));
            }
        }
        Ok(spec)
    }
}

impl From<EquilibriumSpec> for SpecRepr {
    fn from(s: EquilibriumSpec) -> Self {
        SpecRepr {
            n_e: s.n_e,
            n_h: s.n_h,
            index: Some(s.index().to_string()),
        }
    }
}

pub(crate) mod ratio_str {
    use num_rational::Ratio;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Ratio<i64>, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&r.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Ratio<i64>, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_json_round_trip() {
        let s = EquilibriumSpec::new(3, 1);
        let j = serde_json::to_string(&s).unwrap();
        assert_eq!(j, r#"{"n_e":3,"n_h":1,"index":"2"}"#);
        assert_eq!(serde_json::from_str::<EquilibriumSpec>(&j).unwrap(), s);
        let half: EquilibriumSpec = serde_json::from_str(r#"{"n_e":1,"n_h":0,"index":"3/2"}"#).unwrap();
        assert_eq!(half.index(), Ratio::new(3, 2));
        assert!(serde_json::from_str::<EquilibriumSpec>(r#"{"n_e":0,"n_h":4}"#).is_ok());
        assert!(serde_json::from_str::<EquilibriumSpec>(r#"{"n_e":0,"n_h":4,"index":"1"}"#).is_err());
    }

    #[test]
    fn dual_indices_sum_to_two() {
        // I(p2) = 2 - I(p1) for dual sector structures
        let p1 = EquilibriumSpec::new(3, 1);
        let p2 = EquilibriumSpec::new(1, 3);
        assert_eq!(p1.dual(), p2);
        assert_eq!(p1.index(), Ratio::from_integer(2));
        assert_eq!(p2.index(), Ratio::from_integer(0));
        assert_eq!(p1.index() + p2.index(), Ratio::from_integer(2));
    }
}
