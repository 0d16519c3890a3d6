use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::HeegaardError;

/// Largest index set accepted by [`feasible_genera`].
pub const MAX_EQUILIBRIA: usize = 25;

/// Indices of the equilibria on an invariant surface, and how many of them
/// are hyperbolic.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct IndexSet {
    pub indices: Vec<i64>,
    #[serde(default)]
    pub hyperbolic: usize,
}

impl IndexSet {
    pub fn new(indices: Vec<i64>, hyperbolic: usize) -> Result<Self, HeegaardError> {
        if hyperbolic > indices.len() {
            return Err(HeegaardError::InvalidIndexSet(format!(
                "{hyperbolic} hyperbolic points among {} equilibria",
                indices.len()
            )));
        }
        Ok(Self { indices, hyperbolic })
    }

    /// Every index-(-1) point counted as hyperbolic.
    pub fn from_indices(indices: Vec<i64>) -> Self {
        let hyperbolic = indices.iter().filter(|&&i| i == -1).count();
        Self { indices, hyperbolic }
    }
}

/// Genus a Heegaard surface needs for its equilibria to have index sum `s`.
fn genus_for_sum(s: i64) -> Option<u32> {
    if s % 2 != 0 || s > 2 {
        return None;
    }
    u32::try_from(1 - s / 2).ok()
}

/// Nonempty-subset sums, each with the first subset found that reaches it.
fn subset_sums(indices: &[i64]) -> BTreeMap<i64, Vec<usize>> {
    let mut sums: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for (k, &x) in indices.iter().enumerate() {
        let extended: Vec<(i64, Vec<usize>)> = sums
            .iter()
            .map(|(s, w)| (s + x, w.iter().copied().chain([k]).collect()))
            .collect();
        sums.entry(x).or_insert_with(|| vec![k]);
        for (s, w) in extended {
            sums.entry(s).or_insert(w);
        }
    }
    sums
}

/// Genera `p` of Heegaard splittings compatible with the equilibria: `p = 1`
/// always (no equilibria needed), any other `p` needs a nonempty subset of
/// indices summing to `2(1 - p)`.
pub fn feasible_genera(s: &IndexSet) -> Result<BTreeSet<u32>, HeegaardError> {
    if s.indices.len() > MAX_EQUILIBRIA {
        return Err(HeegaardError::TooManyEquilibria {
            count: s.indices.len(),
            max: MAX_EQUILIBRIA,
        });
    }
    let mut out: BTreeSet<u32> = subset_sums(&s.indices).into_keys().filter_map(genus_for_sum).collect();
    out.insert(1);
    Ok(out)
}

/// Positions of a subset of indices realizing genus `p`; empty for `p = 1`.
pub fn witness(s: &IndexSet, p: u32) -> Option<Vec<usize>> {
    if p == 1 {
        return Some(Vec::new());
    }
    let target = 2 * (1 - i64::from(p));
    subset_sums(&s.indices).remove(&target)
}

/// A genus-`p` splitting needs at least `2(p - 1)` hyperbolic points.
pub fn corollary_check(s: &IndexSet, p: u32) -> bool {
    s.hyperbolic as i64 >= 2 * (i64::from(p) - 1)
}
