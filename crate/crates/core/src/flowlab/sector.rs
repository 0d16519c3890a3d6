use num_rational::Ratio;
use serde::{Deserialize, Serialize};

/// Index of an equilibrium from its sector structure, `1 + (n_e - n_h)/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectorIndex {
    pub value: Ratio<i64>,
    /// False for half-integer results, which no isolated planar
    /// equilibrium can have.
    pub integral: bool,
}

pub fn sector_index(n_e: u32, n_h: u32) -> SectorIndex {
    let value = Ratio::new(2 + i64::from(n_e) - i64::from(n_h), 2);
    SectorIndex {
        value,
        integral: value.is_integer(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(sector_index(0, 4).value, Ratio::from_integer(-1));
        assert_eq!(sector_index(2, 0).value, Ratio::from_integer(2));
        assert_eq!(sector_index(0, 0).value, Ratio::from_integer(1));
        for n in 0..10 {
            assert_eq!(sector_index(n, n).value, Ratio::from_integer(1));
        }
    }

    #[test]
    fn half_integers_flagged() {
        let s = sector_index(1, 0);
        assert!(!s.integral);
        assert_eq!(s.value, Ratio::new(3, 2));
        assert!(sector_index(3, 1).integral);
    }
}
