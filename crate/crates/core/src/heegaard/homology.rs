use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::{GluingMatrix, HeegaardError};

/// `Z^rank ⊕ Z/t_1 ⊕ … ⊕ Z/t_k` with `t_i | t_{i+1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbelianGroup {
    pub rank: usize,
    pub torsion: Vec<i64>,
}

impl AbelianGroup {
    /// Group presented by an integer matrix (one relation per column).
    pub fn from_presentation(rows: usize, diagonal: &[i64]) -> Self {
        let nonzero: Vec<i64> = diagonal.iter().copied().filter(|&d| d != 0).collect();
        AbelianGroup {
            rank: rows - nonzero.len(),
            torsion: nonzero.into_iter().filter(|&d| d > 1).collect(),
        }
    }

    pub fn order_of_torsion(&self) -> i64 {
        self.torsion.iter().product()
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.torsion.iter().map(|t| format!("Z/{t}")));
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Diagonal of the Smith normal form: nonnegative, each entry dividing the
/// next, zeros last; length `min(rows, cols)`.
pub fn smith_diagonal(m: &[Vec<i64>]) -> Vec<i64> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut a: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&x| i128::from(x)).collect()).collect();

    for t in 0..rows.min(cols) {
        loop {
            // smallest nonzero entry of the trailing block becomes the pivot
            let Some((pi, pj)) = (t..rows)
                .flat_map(|i| (t..cols).map(move |j| (i, j)))
                .filter(|&(i, j)| a[i][j] != 0)
                .min_by_key(|&(i, j)| a[i][j].abs())
            else {
                return finish(&a, rows.min(cols));
            };
            a.swap(t, pi);
            for row in a.iter_mut() {
                row.swap(t, pj);
            }

            let p = a[t][t];
            let mut dirty = false;
            for i in t + 1..rows {
                let q = Integer::div_floor(&a[i][t], &p);
                if q != 0 {
                    for j in t..cols {
                        a[i][j] -= q * a[t][j];
                    }
                }
                dirty |= a[i][t] != 0;
            }
            for j in t + 1..cols {
                let q = Integer::div_floor(&a[t][j], &p);
                if q != 0 {
                    for row in a.iter_mut().skip(t) {
                        row[j] -= q * row[t];
                    }
                }
                dirty |= a[t][j] != 0;
            }
            if dirty {
                continue;
            }
            // pivot must divide the rest of the block; fold offending rows in
            if let Some(i) = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| a[i][j] % p != 0)) {
                for j in t..cols {
                    a[t][j] += a[i][j];
                }
                continue;
            }
            break;
        }
    }
    finish(&a, rows.min(cols))
}

fn finish(a: &[Vec<i128>], n: usize) -> Vec<i64> {
    let mut d: Vec<i64> = (0..n)
        .map(|i| i64::try_from(a[i][i].abs()).expect("Smith entries stay within i64"))
        .collect();
    // zeros sort last; nonzero entries are already a divisibility chain
    d.sort_by_key(|&x| if x == 0 { i64::MAX } else { x });
    d
}

/// `g × g` block giving the `α` coordinates of the images of the meridians
/// `β_1 … β_g`: row `α_i`, column `β_j` of the gluing matrix.
pub fn presentation_block(m: &GluingMatrix) -> Vec<Vec<i64>> {
    let g = m.genus as usize;
    (0..g)
        .map(|i| (0..g).map(|j| m.entries[2 * i][2 * j + 1]).collect())
        .collect()
}

/// First homology of the closed manifold obtained by gluing two genus-`g`
/// handlebodies along `m`.
pub fn h1_from_gluing(m: &GluingMatrix) -> Result<AbelianGroup, HeegaardError> {
    if !m.is_symplectic() {
        return Err(HeegaardError::NotSymplectic);
    }
    let p = presentation_block(m);
    Ok(AbelianGroup::from_presentation(p.len(), &smith_diagonal(&p)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heegaard::{compose_word, parse_word};
    use num_integer::Integer;
    use proptest::prelude::*;

    /// Invariant factors from determinantal divisors: `d_k` is the gcd of all
    /// `k × k` minors and `s_k = d_k / d_{k-1}`.
    fn determinantal(m: &[Vec<i64>]) -> Vec<i64> {
        let rows = m.len();
        let cols = m.first().map_or(0, Vec::len);
        let mut out = Vec::new();
        let mut prev = 1i64;
        for k in 1..=rows.min(cols) {
            let mut d = 0i64;
            for rs in subsets(rows, k) {
                for cs in subsets(cols, k) {
                    let sub: Vec<Vec<i64>> = rs.iter().map(|&i| cs.iter().map(|&j| m[i][j]).collect()).collect();
                    d = d.gcd(&det(&sub));
                }
            }
            if d == 0 {
                out.extend(std::iter::repeat_n(0, rows.min(cols) - k + 1));
                break;
            }
            out.push(d / prev);
            prev = d;
        }
        out
    }

    fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
        (0u32..1 << n)
            .filter(|m| m.count_ones() as usize == k)
            .map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect())
            .collect()
    }

    fn det(m: &[Vec<i64>]) -> i64 {
        if m.len() == 1 {
            return m[0][0];
        }
        (0..m.len())
            .map(|j| {
                let minor: Vec<Vec<i64>> = m[1..]
                    .iter()
                    .map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &x)| x).collect())
                    .collect();
                let sign = if j % 2 == 0 { 1 } else { -1 };
                sign * m[0][j] * det(&minor)
            })
            .sum()
    }

    #[test]
    fn known_forms() {
        assert_eq!(smith_diagonal(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]), vec![2, 6, 12]);
        assert_eq!(smith_diagonal(&[vec![0]]), vec![0]);
        assert_eq!(smith_diagonal(&[vec![6, 0], vec![0, 4]]), vec![2, 12]);
        assert_eq!(smith_diagonal(&[vec![0, 0], vec![0, 3]]), vec![3, 0]);
        assert_eq!(smith_diagonal(&[vec![1, 2, 3], vec![4, 5, 6]]), vec![1, 3]);
    }

    #[test]
    fn lens_family() {
        let g = |w: &str| h1_from_gluing(&compose_word(&parse_word(w).unwrap(), 1).unwrap()).unwrap();
        assert_eq!(g("").to_string(), "Z");
        assert_eq!(g("a1").to_string(), "0");
        assert_eq!(g("a1 a1 a1 a1 a1").to_string(), "Z/5");
        assert_eq!(g("a1^-1 a1^-1 a1^-1").to_string(), "Z/3");
        for n in 1..=12 {
            let word = vec!["a1"; n].join(" ");
            assert_eq!(g(&word).order_of_torsion(), n as i64);
        }
    }

    #[test]
    fn genus_two_block_sum() {
        let m = compose_word(&parse_word("a1 a1 a1 a2 a2").unwrap(), 2).unwrap();
        assert_eq!(h1_from_gluing(&m).unwrap(), AbelianGroup { rank: 0, torsion: vec![6] });
        let m = compose_word(&parse_word("a1 a1").unwrap(), 2).unwrap();
        assert_eq!(h1_from_gluing(&m).unwrap().to_string(), "Z + Z/2");
        let m = compose_word(&parse_word("a1 a1 a2 a2").unwrap(), 2).unwrap();
        assert_eq!(h1_from_gluing(&m).unwrap().to_string(), "Z/2 + Z/2");
        assert_eq!(h1_from_gluing(&GluingMatrix::identity(3).unwrap()).unwrap().to_string(), "Z^3");
    }

    #[test]
    fn non_symplectic_rejected() {
        let m = GluingMatrix { genus: 1, entries: vec![vec![2, 0], vec![0, 1]] };
        assert_eq!(h1_from_gluing(&m), Err(HeegaardError::NotSymplectic));
    }

    fn matrix(n: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
        prop::collection::vec(prop::collection::vec(-6i64..=6, n), n)
    }

    /// Product of random elementary integer operations.
    fn unimodular(n: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
        prop::collection::vec((0..n, 0..n, -2i64..=2, any::<bool>()), 0..12).prop_map(move |ops| {
            let mut u: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
            for (i, j, k, swap) in ops {
                if swap {
                    u.swap(i, j);
                } else if i != j {
                    for c in 0..n {
                        u[i][c] += k * u[j][c];
                    }
                }
            }
            u
        })
    }

    fn mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
        (0..a.len())
            .map(|i| (0..b[0].len()).map(|j| (0..b.len()).map(|k| a[i][k] * b[k][j]).sum()).collect())
            .collect()
    }

    proptest! {
        #[test]
        fn agrees_with_determinantal_divisors(m in (1usize..=4).prop_flat_map(matrix)) {
            prop_assert_eq!(smith_diagonal(&m), determinantal(&m));
        }

        #[test]
        fn rectangular_agrees((r, c) in (1usize..=4, 1usize..=4), seed in prop::collection::vec(-5i64..=5, 16)) {
            let m: Vec<Vec<i64>> = (0..r).map(|i| (0..c).map(|j| seed[i * 4 + j]).collect()).collect();
            prop_assert_eq!(smith_diagonal(&m), determinantal(&m));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn invariant_under_unimodular_change(
            (m, u, v) in (1usize..=4).prop_flat_map(|n| (matrix(n), unimodular(n), unimodular(n)))
        ) {
            prop_assert_eq!(smith_diagonal(&mul(&mul(&u, &m), &v)), smith_diagonal(&m));
        }
    }
}
