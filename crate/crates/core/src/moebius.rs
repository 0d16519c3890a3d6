//! Fractional-linear maps `z ↦ (az+b)/(cz+d)` and bounded enumeration of the
//! group they generate.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::ops::Mul;

use num_complex::Complex;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::scalar::Scalar;

/// Default tolerance on `|cz + d|` below which a point is treated as the pole.
pub const POLE_TOL: f64 = 1e-12;
/// Default max-coefficient distance under which two normalized maps coincide.
pub const DEDUP_TOL: f64 = 1e-9;
/// Default cap on the number of elements of an enumerated ball.
pub const BALL_CAP: usize = 200_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MoebiusError {
    #[error("singular coefficients: ad - bc = 0")]
    Singular,
    #[error("evaluation point is a pole of the map (|cz+d| = {0:e})")]
    PoleHit(f64),
    #[error("generator index {0} out of range")]
    UnknownGenerator(usize),
    #[error("group ball exceeds the cap of {cap} elements at radius {radius}")]
    BallTooLarge { cap: usize, radius: usize },
}

/// A Möbius transformation with complex coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoebiusMap<T> {
    a: Complex<T>,
    b: Complex<T>,
    c: Complex<T>,
    d: Complex<T>,
}

impl<T: Scalar> MoebiusMap<T> {
    pub fn new(
        a: Complex<T>,
        b: Complex<T>,
        c: Complex<T>,
        d: Complex<T>,
    ) -> Result<Self, MoebiusError> {
        let m = Self { a, b, c, d };
        let scale = [a, b, c, d]
            .iter()
            .map(|x| x.norm())
            .fold(T::zero(), T::max);
        let det = m.det().norm();
        if !det.is_finite() || det <= T::epsilon() * scale * scale || scale.is_zero() {
            return Err(MoebiusError::Singular);
        }
        Ok(m)
    }

    /// Map with real coefficients.
    pub fn real(a: f64, b: f64, c: f64, d: f64) -> Result<Self, MoebiusError> {
        let r = |x: f64| Complex::new(T::lit(x), T::zero());
        Self::new(r(a), r(b), r(c), r(d))
    }

    pub fn identity() -> Self {
        Self {
            a: Complex::one(),
            b: Complex::zero(),
            c: Complex::zero(),
            d: Complex::one(),
        }
    }

    pub fn coefficients(&self) -> [Complex<T>; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn det(&self) -> Complex<T> {
        self.a * self.d - self.b * self.c
    }

    /// `z ↦ self(other(z))`.
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            a: self.a * other.a + self.b * other.c,
            b: self.a * other.b + self.b * other.d,
            c: self.c * other.a + self.d * other.c,
            d: self.c * other.b + self.d * other.d,
        }
    }

    pub fn inverse(&self) -> Self {
        Self {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    /// `cz + d`; the map is singular where this vanishes.
    #[inline]
    pub fn denominator(&self, z: Complex<T>) -> Complex<T> {
        self.c * z + self.d
    }

    pub fn apply(&self, z: Complex<T>) -> Result<Complex<T>, MoebiusError> {
        self.apply_with(z, T::lit(POLE_TOL))
    }

    pub fn apply_with(&self, z: Complex<T>, pole_tol: T) -> Result<Complex<T>, MoebiusError> {
        let den = self.checked_denominator(z, pole_tol)?;
        Ok((self.a * z + self.b) / den)
    }

    /// The multiplier `(ad - bc)/(cz + d)^2`.
    pub fn derivative(&self, z: Complex<T>) -> Result<Complex<T>, MoebiusError> {
        self.derivative_with(z, T::lit(POLE_TOL))
    }

    pub fn derivative_with(&self, z: Complex<T>, pole_tol: T) -> Result<Complex<T>, MoebiusError> {
        let den = self.checked_denominator(z, pole_tol)?;
        Ok(self.det() / (den * den))
    }

    fn checked_denominator(&self, z: Complex<T>, pole_tol: T) -> Result<Complex<T>, MoebiusError> {
        let den = self.denominator(z);
        if den.norm() < pole_tol {
            return Err(MoebiusError::PoleHit(den.norm().as_f64()));
        }
        Ok(den)
    }

    /// Representative with determinant one, sign fixed so that the first
    /// nonzero coefficient in `(a, b, c, d)` has positive real part, or zero
    /// real part and positive imaginary part.
    pub fn normalized(&self) -> Self {
        let k = self.det().sqrt().inv();
        let n = Self {
            a: self.a * k,
            b: self.b * k,
            c: self.c * k,
            d: self.d * k,
        };
        let coeffs = n.coefficients();
        let scale = coeffs.iter().map(|x| x.norm()).fold(T::zero(), T::max);
        let tiny = T::epsilon().sqrt() * scale;
        let flip = coeffs
            .iter()
            .find(|x| x.norm() > tiny)
            .map(|x| x.re < -tiny || (x.re.abs() <= tiny && x.im < T::zero()))
            .unwrap_or(false);
        if flip {
            Self {
                a: -n.a,
                b: -n.b,
                c: -n.c,
                d: -n.d,
            }
        } else {
            n
        }
    }

    /// Max coefficient distance between normalized representatives.
    pub fn distance(&self, other: &Self) -> T {
        let p = self.normalized().coefficients();
        let q = other.normalized().coefficients();
        p.iter()
            .zip(q.iter())
            .map(|(x, y)| (*x - *y).norm())
            .fold(T::zero(), T::max)
    }

    /// Same element of PGL(2, C) up to `tol`.
    pub fn same_as(&self, other: &Self, tol: T) -> bool {
        self.distance(other) < tol
    }
}

impl<T: Scalar> Mul for MoebiusMap<T> {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        self.compose(&rhs)
    }
}

/// One letter of a group word: generator `generator` (1-based) to the power
/// `exponent` = ±1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Letter {
    pub generator: usize,
    pub exponent: i8,
}

impl Letter {
    pub fn new(generator: usize, exponent: i8) -> Self {
        debug_assert!(exponent == 1 || exponent == -1);
        Self { generator, exponent }
    }

    pub fn inverse(self) -> Self {
        Self {
            generator: self.generator,
            exponent: -self.exponent,
        }
    }

    fn key(&self) -> (usize, u8) {
        (self.generator, if self.exponent > 0 { 0 } else { 1 })
    }
}

impl Ord for Letter {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

impl PartialOrd for Letter {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Freely reduced word in the generators and their inverses.
///
/// Ordered by length, then lexicographically with `T_i < T_i^-1 < T_{i+1}`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct GroupWord {
    letters: Vec<Letter>,
}

impl GroupWord {
    pub fn identity() -> Self {
        Self::default()
    }

    /// Builds a word, cancelling adjacent inverse pairs.
    pub fn reduced(letters: impl IntoIterator<Item = Letter>) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Self { letters: out }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_reduced(&self) -> bool {
        self.letters.windows(2).all(|w| w[0] != w[1].inverse())
    }

    /// Composes the letters left to right as maps: `T_{l1} ∘ T_{l2} ∘ …`.
    pub fn evaluate<T: Scalar>(
        &self,
        generators: &[MoebiusMap<T>],
    ) -> Result<MoebiusMap<T>, MoebiusError> {
        self.letters.iter().try_fold(MoebiusMap::identity(), |acc, l| {
            let g = generators
                .get(l.generator.wrapping_sub(1))
                .ok_or(MoebiusError::UnknownGenerator(l.generator))?;
            let g = if l.exponent > 0 { *g } else { g.inverse() };
            Ok(acc.compose(&g))
        })
    }

    fn pushed(&self, l: Letter) -> Self {
        let mut letters = self.letters.clone();
        letters.push(l);
        Self { letters }
    }
}

impl Ord for GroupWord {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.letters.cmp(&other.letters))
    }
}

impl PartialOrd for GroupWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "id");
        }
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "T{}", l.generator)?;
            if l.exponent < 0 {
                write!(f, "^-1")?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct BallOptions {
    pub dedup_tol: f64,
    pub cap: usize,
}

impl Default for BallOptions {
    fn default() -> Self {
        Self {
            dedup_tol: DEDUP_TOL,
            cap: BALL_CAP,
        }
    }
}

/// Elements of the group represented by words of length at most `radius`,
/// one canonical word per distinct map.
#[derive(Debug, Clone)]
pub struct GroupBall<T> {
    generators: Vec<MoebiusMap<T>>,
    radius: usize,
    elements: Vec<(GroupWord, MoebiusMap<T>)>,
}

impl<T: Scalar> GroupBall<T> {
    pub fn generators(&self) -> &[MoebiusMap<T>] {
        &self.generators
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    /// Elements in canonical order (word length, then lexicographic word).
    pub fn elements(&self) -> &[(GroupWord, MoebiusMap<T>)] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn maps(&self) -> impl Iterator<Item = &MoebiusMap<T>> {
        self.elements.iter().map(|(_, m)| m)
    }
}

/// Spatial hash over normalized maps, keyed on one fixed linear projection of
/// the eight real coordinates; neighbouring buckets are scanned so that two
/// maps within `tol` are always compared.
struct DedupIndex<T> {
    tol: T,
    width: T,
    buckets: HashMap<i64, Vec<MoebiusMap<T>>>,
}

const PROJECTION: [f64; 8] = [
    1.0,
    std::f64::consts::FRAC_1_SQRT_2,
    0.577_350_269,
    0.447_213_595,
    0.377_964_473,
    0.316_227_766,
    0.267_261_242,
    0.235_702_260,
];

impl<T: Scalar> DedupIndex<T> {
    fn new(tol: T) -> Self {
        let weight: f64 = PROJECTION.iter().sum();
        Self {
            tol,
            width: tol * T::lit(weight),
            buckets: HashMap::new(),
        }
    }

    fn key(&self, n: &MoebiusMap<T>) -> i64 {
        let c = n.coefficients();
        let coords = [
            c[0].re, c[0].im, c[1].re, c[1].im, c[2].re, c[2].im, c[3].re, c[3].im,
        ];
        let p = coords
            .iter()
            .zip(PROJECTION.iter())
            .fold(T::zero(), |acc, (x, w)| acc + *x * T::lit(*w));
        (p / self.width).floor().to_i64().unwrap_or(i64::MAX)
    }

    /// Inserts `m` unless an equal map is present; returns whether it was new.
    fn insert(&mut self, m: &MoebiusMap<T>) -> bool {
        let n = m.normalized();
        let k = self.key(&n);
        for kk in [k.saturating_sub(1), k, k.saturating_add(1)] {
            if let Some(bucket) = self.buckets.get(&kk) {
                let hit = bucket.iter().any(|o| {
                    let p = o.coefficients();
                    let q = n.coefficients();
                    p.iter()
                        .zip(q.iter())
                        .map(|(x, y)| (*x - *y).norm())
                        .fold(T::zero(), T::max)
                        < self.tol
                });
                if hit {
                    return false;
                }
            }
        }
        self.buckets.entry(k).or_default().push(n);
        true
    }
}

/// All distinct group elements given by freely reduced words of length
/// `<= radius`, each paired with its shortest, lexicographically least word.
pub fn enumerate_ball<T: Scalar>(
    generators: &[MoebiusMap<T>],
    radius: usize,
    opts: BallOptions,
) -> Result<GroupBall<T>, MoebiusError> {
    let mut letters: Vec<(Letter, MoebiusMap<T>)> = Vec::with_capacity(2 * generators.len());
    for (i, g) in generators.iter().enumerate() {
        letters.push((Letter::new(i + 1, 1), *g));
        letters.push((Letter::new(i + 1, -1), g.inverse()));
    }

    let mut index = DedupIndex::new(T::lit(opts.dedup_tol));
    let id = MoebiusMap::identity();
    index.insert(&id);
    let mut elements = vec![(GroupWord::identity(), id)];
    let mut frontier = 0..1;

    for _ in 0..radius {
        let start = elements.len();
        // Parents are visited in canonical order and extended by letters in
        // letter order, so each new layer comes out lexicographically sorted.
        for parent in frontier.clone() {
            let (word, map) = elements[parent].clone();
            for (l, g) in &letters {
                if word.letters().last() == Some(&l.inverse()) {
                    continue;
                }
                let m = map.compose(g);
                if index.insert(&m) {
                    elements.push((word.pushed(*l), m));
                    if elements.len() > opts.cap {
                        return Err(MoebiusError::BallTooLarge {
                            cap: opts.cap,
                            radius,
                        });
                    }
                }
            }
        }
        frontier = start..elements.len();
    }

    Ok(GroupBall {
        generators: generators.to_vec(),
        radius,
        elements,
    })
}

/// The four generators of the genus-2 example group.
pub fn paper_generators<T: Scalar>() -> Vec<MoebiusMap<T>> {
    [
        (-2.0, -13.0, 1.0, 6.0),
        (0.0, -1.0, 1.0, 4.0),
        (6.0, -13.0, 1.0, -2.0),
        (7.0, -28.0, 0.0, 1.0),
    ]
    .iter()
    .map(|&(a, b, c, d)| MoebiusMap::real(a, b, c, d).expect("nonsingular generator"))
    .collect()
}
