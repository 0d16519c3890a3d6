use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::{ratio_str, EquilibriumSpec, SurgeryError};

/// Equilibria declared on a closed surface of genus `genus` (crosscap count
/// when not orientable).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurfaceInventory {
    pub genus: u32,
    pub orientable: bool,
    #[serde(default)]
    pub equilibria: Vec<EquilibriumSpec>,
}

impl SurfaceInventory {
    pub fn new(genus: u32, orientable: bool, equilibria: Vec<EquilibriumSpec>) -> Self {
        Self { genus, orientable, equilibria }
    }

    /// Euler characteristic; `None` for a nonorientable surface with no
    /// crosscaps, which does not exist.
    pub fn chi(&self) -> Option<i64> {
        let g = i64::from(self.genus);
        match (self.orientable, g) {
            (true, _) => Some(2 - 2 * g),
            (false, 0) => None,
            (false, _) => Some(2 - g),
        }
    }

    pub fn index_sum(&self) -> Ratio<i64> {
        self.equilibria.iter().map(EquilibriumSpec::index).sum()
    }

    fn check(&self, which: usize) -> Result<i64, SurgeryError> {
        let invalid = |reason: String| SurgeryError::InvalidInventory { which, reason };
        let chi = self
            .chi()
            .ok_or_else(|| invalid("nonorientable surface needs at least one crosscap".into()))?;
        let sum = self.index_sum();
        if sum != Ratio::from_integer(chi) {
            return Err(invalid(format!("index sum {sum} differs from Euler characteristic {chi}")));
        }
        Ok(chi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SumMode {
    /// Discs free of equilibria; two saddles appear on the tube.
    NoEquilibria,
    /// Removed equilibria have exchanged sector counts; nothing appears.
    Dual,
    /// Removed equilibria are identical; one centre per elliptic sector and
    /// one saddle per hyperbolic sector appear.
    SameStructure,
    /// `n11` elliptic and `n21` hyperbolic sectors of the first equilibrium
    /// meet the same structure, the rest meet their duals.
    Split,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SumPlan {
    pub mode: SumMode,
    #[serde(default)]
    pub removed1: Option<EquilibriumSpec>,
    #[serde(default)]
    pub removed2: Option<EquilibriumSpec>,
    #[serde(default)]
    pub n11: Option<u32>,
    #[serde(default)]
    pub n21: Option<u32>,
}

impl SumPlan {
    pub fn no_equilibria() -> Self {
        Self::with(SumMode::NoEquilibria, None, None)
    }

    pub fn dual(removed1: EquilibriumSpec, removed2: EquilibriumSpec) -> Self {
        Self::with(SumMode::Dual, Some(removed1), Some(removed2))
    }

    pub fn same_structure(removed1: EquilibriumSpec, removed2: EquilibriumSpec) -> Self {
        Self::with(SumMode::SameStructure, Some(removed1), Some(removed2))
    }

    pub fn split(removed1: EquilibriumSpec, removed2: EquilibriumSpec, n11: u32, n21: u32) -> Self {
        Self {
            n11: Some(n11),
            n21: Some(n21),
            ..Self::with(SumMode::Split, Some(removed1), Some(removed2))
        }
    }

    fn with(mode: SumMode, removed1: Option<EquilibriumSpec>, removed2: Option<EquilibriumSpec>) -> Self {
        Self {
            mode,
            removed1,
            removed2,
            n11: None,
            n21: None,
        }
    }

    /// The equilibria the gluing must create, or why the plan is
    /// inconsistent.
    fn created(&self) -> Result<Vec<EquilibriumSpec>, SurgeryError> {
        let mismatch = |s: String| Err(SurgeryError::PlanMismatch(s));
        if self.mode != SumMode::Split && (self.n11.is_some() || self.n21.is_some()) {
            return mismatch("split counts given outside split mode".into());
        }
        let pair = match (self.mode, self.removed1, self.removed2) {
            (SumMode::NoEquilibria, None, None) => None,
            (SumMode::NoEquilibria, _, _) => return mismatch("no-equilibria mode removes nothing".into()),
            (_, Some(a), Some(b)) => Some((a, b)),
            _ => return mismatch("both removed equilibria are required".into()),
        };
        let spawn = |centres: u32, saddles: u32| {
            let mut v = vec![EquilibriumSpec::CENTRE; centres as usize];
            v.extend(std::iter::repeat_n(EquilibriumSpec::SADDLE, saddles as usize));
            v
        };
        match (self.mode, pair) {
            (SumMode::NoEquilibria, _) => Ok(spawn(0, 2)),
            (SumMode::Dual, Some((a, b))) => {
                if b != a.dual() {
                    return mismatch(format!("{b} is not dual to {a}"));
                }
                Ok(Vec::new())
            }
            (SumMode::SameStructure, Some((a, b))) => {
                if a != b {
                    return mismatch(format!("{a} and {b} differ"));
                }
                Ok(spawn(a.n_e, a.n_h))
            }
            (SumMode::Split, Some((a, b))) => {
                let (Some(n11), Some(n21)) = (self.n11, self.n21) else {
                    return mismatch("split mode needs n11 and n21".into());
                };
                if n11 > a.n_e || n21 > a.n_h {
                    return mismatch(format!("split ({n11}, {n21}) exceeds the sectors of {a}"));
                }
                let n12 = a.n_e - n11;
                let n22 = a.n_h - n21;
                let want = EquilibriumSpec::new(n11 + n22, n21 + n12);
                if b != want {
                    return mismatch(format!("split requires the second equilibrium to be {want}, got {b}"));
                }
                Ok(spawn(n11, n21))
            }
            _ => unreachable!("pair is present for every mode but no-equilibria"),
        }
    }
}

fn take(list: &mut Vec<EquilibriumSpec>, spec: EquilibriumSpec, which: usize) -> Result<(), SurgeryError> {
    let pos = list
        .iter()
        .position(|s| *s == spec)
        .ok_or(SurgeryError::MissingEquilibrium {
            which,
            spec: spec.to_string(),
        })?;
    list.remove(pos);
    Ok(())
}

/// Inventory of the connected sum. Orientable inputs add genera; any
/// nonorientable input makes the result nonorientable with `2 - χ`
/// crosscaps, where `χ = χ1 + χ2 - 2`.
pub fn connect_inventories(
    inv1: &SurfaceInventory,
    inv2: &SurfaceInventory,
    plan: &SumPlan,
) -> Result<SurfaceInventory, SurgeryError> {
    let chi1 = inv1.check(1)?;
    let chi2 = inv2.check(2)?;
    let created = plan.created()?;

    let mut first = inv1.equilibria.clone();
    let mut second = inv2.equilibria.clone();
    if let (Some(a), Some(b)) = (plan.removed1, plan.removed2) {
        take(&mut first, a, 1)?;
        take(&mut second, b, 2)?;
    }
    first.extend(second);
    first.extend(created);

    let chi = chi1 + chi2 - 2;
    let (genus, orientable) = if inv1.orientable && inv2.orientable {
        (inv1.genus + inv2.genus, true)
    } else {
        ((2 - chi) as u32, false)
    };
    let out = SurfaceInventory::new(genus, orientable, first);
    debug_assert_eq!(out.index_sum(), Ratio::from_integer(chi));
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexRow {
    pub n_e: u32,
    pub n_h: u32,
    #[serde(with = "ratio_str")]
    pub index: Ratio<i64>,
    pub integral: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InventoryReport {
    #[serde(with = "ratio_str")]
    pub index_sum: Ratio<i64>,
    /// Absent when the inventory does not describe a surface.
    pub chi: Option<i64>,
    pub pass: bool,
    pub table: Vec<IndexRow>,
}

/// Poincaré–Hopf audit of a declared inventory.
pub fn verify_inventory(inv: &SurfaceInventory) -> InventoryReport {
    let index_sum = inv.index_sum();
    let chi = inv.chi();
    InventoryReport {
        index_sum,
        chi,
        pass: chi.is_some_and(|c| Ratio::from_integer(c) == index_sum),
        table: inv
            .equilibria
            .iter()
            .map(|s| IndexRow {
                n_e: s.n_e,
                n_h: s.n_h,
                index: s.index(),
                integral: s.index().is_integer(),
            })
            .collect(),
    }
}
