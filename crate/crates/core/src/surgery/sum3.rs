use serde::{Deserialize, Serialize};

use super::SurgeryError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpecialSet {
    #[default]
    None,
    CircleOfEquilibria,
    LimitCycle,
}

/// Isolated equilibria of a flow on a closed 3-manifold, plus any
/// non-isolated invariant set created by gluing.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Sum3Inventory {
    pub equilibria3d: Vec<i64>,
    #[serde(default)]
    pub marker: SpecialSet,
}

impl Sum3Inventory {
    pub fn new(equilibria3d: Vec<i64>) -> Self {
        Self {
            equilibria3d,
            marker: SpecialSet::None,
        }
    }

    pub fn index_sum(&self) -> i64 {
        self.equilibria3d.iter().sum()
    }
}

/// Connected sum of two 3-manifold flows along 3-cells.
///
/// With `removed = None` the cells hold no equilibria and the gluing sphere
/// carries a circle of equilibria, or a limit cycle when the cells are
/// twisted. Otherwise `removed = (i, j)` names one equilibrium from each side;
/// they must satisfy `i = -j`.
pub fn sum3_check(
    a: &Sum3Inventory,
    b: &Sum3Inventory,
    removed: Option<(i64, i64)>,
    twist: bool,
) -> Result<Sum3Inventory, SurgeryError> {
    for (which, inv) in [(1, a), (2, b)] {
        if inv.index_sum() != 0 {
            return Err(SurgeryError::InvalidInventory {
                which,
                reason: format!("3D index sum is {}, not 0", inv.index_sum()),
            });
        }
    }
    let mut first = a.equilibria3d.clone();
    let mut second = b.equilibria3d.clone();
    let marker = match removed {
        None if twist => SpecialSet::LimitCycle,
        None => SpecialSet::CircleOfEquilibria,
        Some((i, j)) => {
            if i != -j {
                return Err(SurgeryError::NotInverse { a: i, b: j });
            }
            for (which, list, idx) in [(1, &mut first, i), (2, &mut second, j)] {
                let pos = list.iter().position(|&x| x == idx).ok_or(SurgeryError::MissingEquilibrium {
                    which,
                    spec: idx.to_string(),
                })?;
                list.remove(pos);
            }
            if a.marker != SpecialSet::None { a.marker } else { b.marker }
        }
    };
    first.extend(second);
    Ok(Sum3Inventory {
        equilibria3d: first,
        marker,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn empty_twisted_gives_limit_cycle() {
        let e = Sum3Inventory::default();
        let out = sum3_check(&e, &e, None, true).unwrap();
        assert_eq!(out.marker, SpecialSet::LimitCycle);
        assert_eq!(out.index_sum(), 0);
        assert_eq!(sum3_check(&e, &e, None, false).unwrap().marker, SpecialSet::CircleOfEquilibria);
    }

    #[test]
    fn cancelling_pair() {
        let a = Sum3Inventory::new(vec![1, -1]);
        let out = sum3_check(&a, &a, Some((1, -1)), false).unwrap();
        assert_eq!(out.index_sum(), 0);
        assert_eq!(out.equilibria3d.len(), 2);
        assert_eq!(sum3_check(&a, &a, Some((1, 1)), false), Err(SurgeryError::NotInverse { a: 1, b: 1 }));
    }

    #[test]
    fn bad_inputs() {
        let a = Sum3Inventory::new(vec![1]);
        let z = Sum3Inventory::new(vec![2, -2]);
        assert!(matches!(sum3_check(&a, &z, None, false), Err(SurgeryError::InvalidInventory { which: 1, .. })));
        assert!(matches!(
            sum3_check(&z, &z, Some((1, -1)), false),
            Err(SurgeryError::MissingEquilibrium { which: 1, .. })
        ));
    }

    #[test]
    fn json_names() {
        let out = sum3_check(&Sum3Inventory::default(), &Sum3Inventory::default(), None, true).unwrap();
        assert_eq!(serde_json::to_string(&out).unwrap(), r#"{"equilibria3d":[],"marker":"limit-cycle"}"#);
    }

    proptest! {
        #[test]
        fn sum_stays_zero(xs in prop::collection::vec(-3i64..=3, 0..6), ys in prop::collection::vec(-3i64..=3, 0..6), pick in 0usize..6) {
            let close = |v: Vec<i64>| { let s: i64 = v.iter().sum(); let mut v = v; v.push(-s); v };
            let a = Sum3Inventory::new(close(xs));
            let b = Sum3Inventory::new(close(ys));
            let i = a.equilibria3d[pick % a.equilibria3d.len()];
            let b = Sum3Inventory::new([b.equilibria3d.clone(), vec![-i, i]].concat());
            let out = sum3_check(&a, &b, Some((i, -i)), false).unwrap();
            prop_assert_eq!(out.index_sum(), 0);
            prop_assert_eq!(out.equilibria3d.len(), a.equilibria3d.len() + b.equilibria3d.len() - 2);
        }
    }
}
