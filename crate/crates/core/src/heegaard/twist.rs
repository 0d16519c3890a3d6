use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::HeegaardError;

/// Lickorish's curves on the genus-`g` surface.
///
/// | curve | homology class        |
/// |-------|-----------------------|
/// | `a_i` | `α_i`                 |
/// | `b_i` | `β_i`                 |
/// | `g_i` | `β_i - β_{i+1}`, `i < g` |
///
/// Basis order is `(α_1, β_1, …, α_g, β_g)` with `⟨α_i, β_i⟩ = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CurveId {
    Alpha(u32),
    Beta(u32),
    Gamma(u32),
}

impl CurveId {
    pub fn valid_for(&self, genus: u32) -> bool {
        match *self {
            CurveId::Alpha(i) | CurveId::Beta(i) => (1..=genus).contains(&i),
            CurveId::Gamma(i) => i >= 1 && i < genus,
        }
    }

    /// Homology class in the standard basis.
    pub fn class(&self, genus: u32) -> Result<Vec<i64>, HeegaardError> {
        if !self.valid_for(genus) {
            return Err(HeegaardError::InvalidCurve {
                curve: self.to_string(),
                genus,
            });
        }
        let mut c = vec![0; 2 * genus as usize];
        match *self {
            CurveId::Alpha(i) => c[2 * (i as usize - 1)] = 1,
            CurveId::Beta(i) => c[2 * (i as usize - 1) + 1] = 1,
            CurveId::Gamma(i) => {
                c[2 * (i as usize - 1) + 1] = 1;
                c[2 * i as usize + 1] = -1;
            }
        }
        Ok(c)
    }
}

impl fmt::Display for CurveId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurveId::Alpha(i) => write!(f, "a{i}"),
            CurveId::Beta(i) => write!(f, "b{i}"),
            CurveId::Gamma(i) => write!(f, "g{i}"),
        }
    }
}

impl FromStr for CurveId {
    type Err = HeegaardError;

    fn from_str(s: &str) -> Result<Self, HeegaardError> {
        let err = || HeegaardError::Parse(s.to_string());
        let mut chars = s.chars();
        let kind = chars.next().ok_or_else(err)?;
        let i: u32 = chars.as_str().parse().map_err(|_| err())?;
        match kind {
            'a' => Ok(CurveId::Alpha(i)),
            'b' => Ok(CurveId::Beta(i)),
            'g' => Ok(CurveId::Gamma(i)),
            _ => Err(err()),
        }
    }
}

/// A twist or its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Letter {
    pub curve: CurveId,
    /// `1` or `-1`.
    pub exponent: i8,
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponent == 1 {
            write!(f, "{}", self.curve)
        } else {
            write!(f, "{}^{}", self.curve, self.exponent)
        }
    }
}

/// Parses a whitespace-separated word such as `a1 b1^-1 g1 a2`.
pub fn parse_word(s: &str) -> Result<Vec<Letter>, HeegaardError> {
    s.split_whitespace()
        .map(|tok| {
            let (name, exponent) = match tok.split_once('^') {
                None => (tok, 1),
                Some((name, "1")) => (name, 1),
                Some((name, "-1")) => (name, -1),
                Some(_) => return Err(HeegaardError::Parse(tok.to_string())),
            };
            Ok(Letter {
                curve: name.parse()?,
                exponent,
            })
        })
        .collect()
}

/// Integer `2g × 2g` matrix acting on `H_1` of the Heegaard surface.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GluingMatrix {
    pub genus: u32,
    pub entries: Vec<Vec<i64>>,
}

impl GluingMatrix {
    pub fn identity(genus: u32) -> Result<Self, HeegaardError> {
        if genus == 0 {
            return Err(HeegaardError::ZeroGenus);
        }
        let n = 2 * genus as usize;
        let entries = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
        Ok(Self { genus, entries })
    }

    pub fn dim(&self) -> usize {
        2 * self.genus as usize
    }

    /// `self · other`, failing on overflow.
    pub fn mul(&self, other: &Self) -> Result<Self, HeegaardError> {
        let n = self.dim();
        let mut entries = vec![vec![0i64; n]; n];
        for (i, row) in entries.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                let mut acc: i64 = 0;
                for k in 0..n {
                    acc = self.entries[i][k]
                        .checked_mul(other.entries[k][j])
                        .and_then(|p| acc.checked_add(p))
                        .ok_or(HeegaardError::Overflow)?;
                }
                *e = acc;
            }
        }
        Ok(Self {
            genus: self.genus,
            entries,
        })
    }

    pub fn apply(&self, x: &[i64]) -> Vec<i64> {
        self.entries
            .iter()
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `MᵀJM = J`, evaluated in 128-bit arithmetic.
    pub fn is_symplectic(&self) -> bool {
        let n = self.dim();
        let j = symplectic_form(self.genus);
        let m = |i: usize, k: usize| i128::from(self.entries[i][k]);
        for a in 0..n {
            for b in 0..n {
                // (MᵀJM)_{ab} = Σ_{k,l} M_{ka} J_{kl} M_{lb}; J is sparse
                let mut s: i128 = 0;
                for k in 0..n {
                    let l = k ^ 1;
                    s += m(k, a) * i128::from(j[k][l]) * m(l, b);
                }
                if s != i128::from(j[a][b]) {
                    return false;
                }
            }
        }
        true
    }
}

/// `J` with blocks `[[0, 1], [-1, 0]]`, so `⟨x, y⟩ = xᵀJy` and `⟨α_i, β_i⟩ = 1`.
pub fn symplectic_form(genus: u32) -> Vec<Vec<i64>> {
    let n = 2 * genus as usize;
    let mut j = vec![vec![0; n]; n];
    for i in 0..genus as usize {
        j[2 * i][2 * i + 1] = 1;
        j[2 * i + 1][2 * i] = -1;
    }
    j
}

/// Action of the Dehn twist about `curve` (or its inverse) on homology:
/// `x ↦ x ± ⟨c, x⟩ c` for the curve's class `c`.
pub fn twist_matrix(curve: CurveId, genus: u32, exponent: i8) -> Result<GluingMatrix, HeegaardError> {
    let c = curve.class(genus)?;
    let j = symplectic_form(genus);
    let n = c.len();
    // row vector cᵀJ
    let cj: Vec<i64> = (0..n).map(|col| (0..n).map(|k| c[k] * j[k][col]).sum()).collect();
    let mut m = GluingMatrix::identity(genus)?;
    let sign = i64::from(exponent.signum());
    for (i, row) in m.entries.iter_mut().enumerate() {
        for (col, e) in row.iter_mut().enumerate() {
            *e += sign * c[i] * cj[col];
        }
    }
    Ok(m)
}

/// The gluing map of a word, letters applied left to right: for
/// `w = l_1 … l_k` the matrix is `M_k ⋯ M_1`.
pub fn compose_word(word: &[Letter], genus: u32) -> Result<GluingMatrix, HeegaardError> {
    let mut m = GluingMatrix::identity(genus)?;
    for l in word {
        if l.exponent.abs() != 1 {
            return Err(HeegaardError::Parse(l.to_string()));
        }
        m = twist_matrix(l.curve, genus, l.exponent)?.mul(&m)?;
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn letter(curve: CurveId, exponent: i8) -> Letter {
        Letter { curve, exponent }
    }

    #[test]
    fn alpha_twist_genus_one() {
        let m = twist_matrix(CurveId::Alpha(1), 1, 1).unwrap();
        assert_eq!(m.entries, vec![vec![1, 1], vec![0, 1]]);
        let b = twist_matrix(CurveId::Beta(1), 1, 1).unwrap();
        assert_eq!(b.entries, vec![vec![1, 0], vec![-1, 1]]);
    }

    #[test]
    fn power_oracle() {
        for n in 0..10 {
            let m = compose_word(&vec![letter(CurveId::Alpha(1), 1); n], 1).unwrap();
            assert_eq!(m.entries, vec![vec![1, n as i64], vec![0, 1]]);
        }
    }

    #[test]
    fn twist_fixes_own_class() {
        for g in 1..4 {
            for c in all_curves(g) {
                let m = twist_matrix(c, g, 1).unwrap();
                let class = c.class(g).unwrap();
                assert_eq!(m.apply(&class), class);
            }
        }
    }

    #[test]
    fn gamma_class_and_invalid_curves() {
        assert_eq!(CurveId::Gamma(1).class(2).unwrap(), vec![0, 1, 0, -1]);
        assert!(CurveId::Gamma(2).class(2).is_err());
        assert!(CurveId::Alpha(0).class(2).is_err());
        assert!(CurveId::Beta(3).class(2).is_err());
    }

    #[test]
    fn parsing() {
        let w = parse_word("a1 b1^-1 g1 a2").unwrap();
        assert_eq!(
            w,
            vec![
                letter(CurveId::Alpha(1), 1),
                letter(CurveId::Beta(1), -1),
                letter(CurveId::Gamma(1), 1),
                letter(CurveId::Alpha(2), 1),
            ]
        );
        assert_eq!(w.iter().map(ToString::to_string).collect::<Vec<_>>().join(" "), "a1 b1^-1 g1 a2");
        assert!(parse_word("").unwrap().is_empty());
        for bad in ["x1", "a", "a1^2", "a-1", "b1^"] {
            assert!(parse_word(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn empty_word_is_identity() {
        assert_eq!(compose_word(&[], 3).unwrap(), GluingMatrix::identity(3).unwrap());
        assert_eq!(GluingMatrix::identity(0), Err(HeegaardError::ZeroGenus));
    }

    fn all_curves(g: u32) -> Vec<CurveId> {
        let mut v: Vec<CurveId> = (1..=g).flat_map(|i| [CurveId::Alpha(i), CurveId::Beta(i)]).collect();
        v.extend((1..g).map(CurveId::Gamma));
        v
    }

    fn word(g: u32, len: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<Letter>> {
        let curves = all_curves(g);
        prop::collection::vec((0..curves.len(), any::<bool>()), len)
            .prop_map(move |v| v.into_iter().map(|(k, inv)| letter(curves[k], if inv { -1 } else { 1 })).collect())
    }

    proptest! {
        #[test]
        fn composed_words_are_symplectic((g, w) in (1u32..=4).prop_flat_map(|g| (Just(g), word(g, 30..=30)))) {
            prop_assert!(compose_word(&w, g).unwrap().is_symplectic());
        }

        #[test]
        fn word_then_reverse_inverse(w in word(3, 0..=20)) {
            let inv: Vec<Letter> = w.iter().rev().map(|l| letter(l.curve, -l.exponent)).collect();
            let full: Vec<Letter> = w.iter().chain(&inv).copied().collect();
            prop_assert_eq!(compose_word(&full, 3).unwrap(), GluingMatrix::identity(3).unwrap());
        }
    }
}
