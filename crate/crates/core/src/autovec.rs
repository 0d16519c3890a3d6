//! Evaluable vector fields.
//!
//! A planar vector field is represented as a map `C → C`: the point `x + iy`
//! moves with velocity `u + iv`. The automorphic fields are ratios of two
//! truncated Poincaré theta series of consecutive weights; the planar fields
//! (pendulum, saddle, node, centre, dipole, ...) serve as index oracles and
//! demo systems.

use std::sync::Arc;

use num_complex::Complex;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::moebius::{enumerate_ball, paper_generators, BallOptions, GroupBall, MoebiusError, MoebiusMap};
use crate::scalar::{cplx, is_finite, Scalar};

/// Distance to any singularity of a series term below which evaluation fails.
pub const POLE_GUARD: f64 = 1e-6;
/// Offset in the denominator of the relative equivariance residual.
pub const RESIDUAL_EPS: f64 = 1e-9;
/// Denominator series smaller than this fraction of its absolute term mass
/// is treated as vanishing.
pub const DENOMINATOR_REL_TOL: f64 = 1e-12;
/// Default base point of the weight kernel, in the lower half-plane.
pub const KERNEL_POLE: (f64, f64) = (0.0, -4.0);
/// Default truncation radius of the theta series.
pub const DEFAULT_RADIUS: usize = 4;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FieldError {
    #[error("evaluation point ({re}, {im}) is within the pole guard of a singularity")]
    NearPole { re: f64, im: f64 },
    #[error("denominator series vanishes at ({re}, {im}); the field has a pole there")]
    DenominatorVanishes { re: f64, im: f64 },
    #[error("field value is not finite at ({re}, {im})")]
    NonFinite { re: f64, im: f64 },
}

impl FieldError {
    pub(crate) fn near_pole<T: Scalar>(z: Complex<T>) -> Self {
        FieldError::NearPole {
            re: z.re.as_f64(),
            im: z.im.as_f64(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AutovecError {
    #[error("theta series weight must be at least 2, got {0}")]
    WeightTooSmall(u32),
    #[error("seed pole must be finite")]
    NonFiniteSeed,
    #[error("kernel base point must lie strictly in the lower half-plane")]
    KernelInUpperHalfPlane,
    #[error("pendulum constant must be positive, got {0}")]
    NonPositiveConstant(f64),
    #[error("numerator and denominator must share one group ball")]
    BallMismatch,
    #[error(transparent)]
    Moebius(#[from] MoebiusError),
}

/// Anything that can be evaluated as a planar vector field.
pub trait VectorField<T: Scalar>: Sync {
    fn eval(&self, z: Complex<T>) -> Result<Complex<T>, FieldError>;
}

impl<T: Scalar, F> VectorField<T> for F
where
    F: Fn(Complex<T>) -> Result<Complex<T>, FieldError> + Sync,
{
    fn eval(&self, z: Complex<T>) -> Result<Complex<T>, FieldError> {
        self(z)
    }
}

/// `H(z) = 1/(z - s)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RationalSeed<T> {
    pub pole: Complex<T>,
}

impl<T: Scalar> RationalSeed<T> {
    pub fn new(pole: Complex<T>) -> Result<Self, AutovecError> {
        if !is_finite(pole) {
            return Err(AutovecError::NonFiniteSeed);
        }
        Ok(Self { pole })
    }

    pub fn eval(&self, z: Complex<T>) -> Complex<T> {
        (z - self.pole).inv()
    }
}

/// Truncated Poincaré series of weight `m`:
///
/// `Θ(z) = Σ_T H(Tz) · (K(Tz) · T'(z))^m`, with `K(w) = (w - q)^-2`.
///
/// The kernel `K` is the half-plane image of the unit-disc Poincaré series;
/// with `q` in the lower half-plane it supplies the decay at infinity the
/// rational seed lacks, so the sum converges when infinity is a limit point
/// of the group. `Θ(Sz)·S'(z)^m = Θ(z)` holds for the full (untruncated) sum.
#[derive(Debug, Clone)]
pub struct ThetaSeries<T> {
    seed: RationalSeed<T>,
    weight: u32,
    kernel_pole: Complex<T>,
    ball: Arc<GroupBall<T>>,
    pole_guard: T,
}

impl<T: Scalar> ThetaSeries<T> {
    pub fn new(seed: RationalSeed<T>, weight: u32, ball: Arc<GroupBall<T>>) -> Result<Self, AutovecError> {
        Self::with_kernel(seed, weight, cplx(KERNEL_POLE.0, KERNEL_POLE.1), ball)
    }

    pub fn with_kernel(
        seed: RationalSeed<T>,
        weight: u32,
        kernel_pole: Complex<T>,
        ball: Arc<GroupBall<T>>,
    ) -> Result<Self, AutovecError> {
        if weight < 2 {
            return Err(AutovecError::WeightTooSmall(weight));
        }
        if !(kernel_pole.im < T::zero()) || !is_finite(kernel_pole) {
            return Err(AutovecError::KernelInUpperHalfPlane);
        }
        Ok(Self {
            seed,
            weight,
            kernel_pole,
            ball,
            pole_guard: T::lit(POLE_GUARD),
        })
    }

    pub fn with_pole_guard(mut self, guard: T) -> Self {
        self.pole_guard = guard;
        self
    }

    pub fn seed(&self) -> &RationalSeed<T> {
        &self.seed
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn kernel_pole(&self) -> Complex<T> {
        self.kernel_pole
    }

    pub fn ball(&self) -> &Arc<GroupBall<T>> {
        &self.ball
    }

    /// One series term for the group element `t`.
    fn term(&self, t: &MoebiusMap<T>, z: Complex<T>) -> Result<Complex<T>, FieldError> {
        let den = t.denominator(z);
        if den.norm() < self.pole_guard {
            return Err(FieldError::near_pole(z));
        }
        let [a, b, _, _] = t.coefficients();
        let tz = (a * z + b) / den;
        let from_seed = tz - self.seed.pole;
        let from_kernel = tz - self.kernel_pole;
        if from_seed.norm() < self.pole_guard || from_kernel.norm() < self.pole_guard {
            return Err(FieldError::near_pole(z));
        }
        let slope = t.det() / (den * den * from_kernel * from_kernel);
        Ok(slope.powi(self.weight as i32) / from_seed)
    }

    /// Sum of the series and the sum of the absolute values of its terms.
    pub fn eval_with_mass(&self, z: Complex<T>) -> Result<(Complex<T>, T), FieldError> {
        let mut sum = Complex::zero();
        let mut mass = T::zero();
        for t in self.ball.maps() {
            let term = self.term(t, z)?;
            sum = sum + term;
            mass = mass + term.norm();
        }
        Ok((sum, mass))
    }

    pub fn eval(&self, z: Complex<T>) -> Result<Complex<T>, FieldError> {
        self.eval_with_mass(z).map(|(s, _)| s)
    }
}

/// `F = Θ_m[H₁] / Θ_{m+1}[H₂]`, a meromorphic field with
/// `F(Tz) = T'(z)·F(z)` for every group element `T`.
#[derive(Debug, Clone)]
pub struct AutomorphicField<T> {
    numerator: ThetaSeries<T>,
    denominator: ThetaSeries<T>,
}

impl<T: Scalar> AutomorphicField<T> {
    pub fn new(numerator: ThetaSeries<T>, denominator: ThetaSeries<T>) -> Result<Self, AutovecError> {
        if !Arc::ptr_eq(numerator.ball(), denominator.ball()) {
            return Err(AutovecError::BallMismatch);
        }
        if denominator.weight() != numerator.weight() + 1 {
            return Err(AutovecError::WeightTooSmall(denominator.weight()));
        }
        Ok(Self { numerator, denominator })
    }

    /// Builds the field from generators, the two seed poles, the numerator
    /// weight and a truncation radius.
    pub fn build(
        generators: &[MoebiusMap<T>],
        numerator_pole: Complex<T>,
        denominator_pole: Complex<T>,
        weight: u32,
        radius: usize,
        kernel_pole: Complex<T>,
        ball_opts: BallOptions,
    ) -> Result<Self, AutovecError> {
        let ball = Arc::new(enumerate_ball(generators, radius, ball_opts)?);
        let num = ThetaSeries::with_kernel(RationalSeed::new(numerator_pole)?, weight, kernel_pole, ball.clone())?;
        let den = ThetaSeries::with_kernel(RationalSeed::new(denominator_pole)?, weight + 1, kernel_pole, ball)?;
        Self::new(num, den)
    }

    /// The genus-2 example: the four example generators with
    /// `H₁(z) = 1/(z+2-3i)`, `H₂(z) = 1/(z-2-3i)`, weights (2, 3).
    pub fn paper(radius: usize) -> Result<Self, AutovecError> {
        Self::build(
            &paper_generators(),
            cplx(-2.0, 3.0),
            cplx(2.0, 3.0),
            2,
            radius,
            cplx(KERNEL_POLE.0, KERNEL_POLE.1),
            BallOptions::default(),
        )
    }

    pub fn with_pole_guard(mut self, guard: T) -> Self {
        self.numerator = self.numerator.with_pole_guard(guard);
        self.denominator = self.denominator.with_pole_guard(guard);
        self
    }

    pub fn numerator(&self) -> &ThetaSeries<T> {
        &self.numerator
    }

    pub fn denominator(&self) -> &ThetaSeries<T> {
        &self.denominator
    }

    pub fn ball(&self) -> &Arc<GroupBall<T>> {
        self.numerator.ball()
    }

    pub fn field_eval(&self, z: Complex<T>) -> Result<Complex<T>, FieldError> {
        let num = self.numerator.eval(z)?;
        let (den, mass) = self.denominator.eval_with_mass(z)?;
        if den.norm() <= T::lit(DENOMINATOR_REL_TOL) * mass {
            return Err(FieldError::DenominatorVanishes {
                re: z.re.as_f64(),
                im: z.im.as_f64(),
            });
        }
        let f = num / den;
        if !is_finite(f) {
            return Err(FieldError::NonFinite {
                re: z.re.as_f64(),
                im: z.im.as_f64(),
            });
        }
        Ok(f)
    }

    /// `|F(mz) - m'(z)F(z)| / (|F(z)| + ε)`.
    pub fn equivariance_residual(&self, m: &MoebiusMap<T>, z: Complex<T>) -> Result<T, FieldError> {
        let guard = self.numerator.pole_guard;
        let mz = m.apply_with(z, guard).map_err(|_| FieldError::near_pole(z))?;
        let slope = m.derivative_with(z, guard).map_err(|_| FieldError::near_pole(z))?;
        let fz = self.field_eval(z)?;
        let fmz = self.field_eval(mz)?;
        Ok((fmz - slope * fz).norm() / (fz.norm() + T::lit(RESIDUAL_EPS)))
    }
}

impl<T: Scalar> VectorField<T> for AutomorphicField<T> {
    fn eval(&self, z: Complex<T>) -> Result<Complex<T>, FieldError> {
        self.field_eval(z)
    }
}

/// Fixed residual sample: `x ∈ {-3, -1.5, 0, 1.5, 3}`, `y ∈ {1.5, 2.5, 3.5, 4.5}`.
pub fn residual_sample<T: Scalar>() -> Vec<Complex<T>> {
    let mut v = Vec::with_capacity(20);
    for i in 0..5 {
        for y in [1.5, 2.5, 3.5, 4.5] {
            v.push(cplx(-3.0 + 1.5 * f64::from(i), y));
        }
    }
    v
}

/// Median of the equivariance residual of `m` over `points`.
pub fn median_residual<T: Scalar>(
    field: &AutomorphicField<T>,
    m: &MoebiusMap<T>,
    points: &[Complex<T>],
) -> Result<T, FieldError> {
    let mut r = points
        .iter()
        .map(|&z| field.equivariance_residual(m, z))
        .collect::<Result<Vec<T>, _>>()?;
    if r.is_empty() {
        return Ok(T::zero());
    }
    r.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let n = r.len();
    Ok(if n % 2 == 1 { r[n / 2] } else { (r[n / 2 - 1] + r[n / 2]) / T::lit(2.0) })
}

/// Closed-form planar fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PlanarField<T> {
    /// `(θ, ω) ↦ (ω, -k sin θ)`.
    Pendulum { k: T },
    /// `(x, y) ↦ (x, -y)`
    Saddle,
    /// `(x, y) ↦ (x, y)`
    Node,
    /// `(x, y) ↦ (-y, x)`
    Center,
    /// `z ↦ z²`
    Dipole,
    /// Uniform flow.
    Constant { value: Complex<T> },
    /// `z ↦ Σ c_k z^k`, coefficients in increasing degree.
    Polynomial { coefficients: Vec<Complex<T>> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CanonicalKind {
    Saddle,
    Node,
    Center,
    Dipole,
}

pub fn pendulum_field<T: Scalar>(k: T) -> Result<PlanarField<T>, AutovecError> {
    if !(k > T::zero()) || !k.is_finite() {
        return Err(AutovecError::NonPositiveConstant(k.as_f64()));
    }
    Ok(PlanarField::Pendulum { k })
}

pub fn canonical_field<T: Scalar>(kind: CanonicalKind) -> PlanarField<T> {
    match kind {
        CanonicalKind::Saddle => PlanarField::Saddle,
        CanonicalKind::Node => PlanarField::Node,
        CanonicalKind::Center => PlanarField::Center,
        CanonicalKind::Dipole => PlanarField::Dipole,
    }
}

impl<T: Scalar> PlanarField<T> {
    pub fn value(&self, z: Complex<T>) -> Complex<T> {
        match self {
            PlanarField::Pendulum { k } => Complex::new(z.im, -*k * z.re.sin()),
            PlanarField::Saddle => z.conj(),
            PlanarField::Node => z,
            PlanarField::Center => Complex::new(-z.im, z.re),
            PlanarField::Dipole => z * z,
            PlanarField::Constant { value } => *value,
            PlanarField::Polynomial { coefficients } => coefficients
                .iter()
                .rev()
                .fold(Complex::zero(), |acc, c| acc * z + *c),
        }
    }

    /// A polynomial field with the given simple zeros, `Π (z - r_i)`.
    pub fn with_roots(roots: &[Complex<T>]) -> Self {
        let mut coefficients = vec![Complex::<T>::one()];
        for r in roots {
            let mut next = vec![Complex::zero(); coefficients.len() + 1];
            for (i, c) in coefficients.iter().enumerate() {
                next[i + 1] = next[i + 1] + *c;
                next[i] = next[i] - *c * *r;
            }
            coefficients = next;
        }
        PlanarField::Polynomial { coefficients }
    }
}

impl<T: Scalar> VectorField<T> for PlanarField<T> {
    fn eval(&self, z: Complex<T>) -> Result<Complex<T>, FieldError> {
        let v = self.value(z);
        if !is_finite(v) {
            return Err(FieldError::NonFinite {
                re: z.re.as_f64(),
                im: z.im.as_f64(),
            });
        }
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    type C = Complex<f64>;

    fn identity_field(s1: C, s2: C) -> AutomorphicField<f64> {
        AutomorphicField::build(&[], s1, s2, 2, 0, cplx(KERNEL_POLE.0, KERNEL_POLE.1), BallOptions::default())
            .unwrap()
    }

    #[test]
    fn weight_below_two_rejected() {
        let ball = Arc::new(enumerate_ball::<f64>(&[], 0, BallOptions::default()).unwrap());
        let seed = RationalSeed::new(cplx(0.0, 1.0)).unwrap();
        assert_eq!(ThetaSeries::new(seed, 1, ball).unwrap_err(), AutovecError::WeightTooSmall(1));
        assert_eq!(
            RationalSeed::<f64>::new(cplx(f64::NAN, 0.0)).unwrap_err(),
            AutovecError::NonFiniteSeed
        );
    }

    #[test]
    fn one_term_series_is_weighted_seed() {
        let ball = Arc::new(enumerate_ball::<f64>(&[], 0, BallOptions::default()).unwrap());
        let s = cplx(-2.0, 3.0);
        let q: C = cplx(KERNEL_POLE.0, KERNEL_POLE.1);
        let th = ThetaSeries::new(RationalSeed::new(s).unwrap(), 2, ball).unwrap();
        let z: C = cplx(0.0, 0.0);
        // H(0) = 1/(2 - 3i), K(0)^2 = q^-4
        let want = C::new(2.0, -3.0).inv() * (z - q).powi(-4);
        assert!((th.eval(z).unwrap() - want).norm() < 1e-15);
    }

    #[test]
    fn one_term_field_is_rational() {
        let s1 = cplx(-2.0, 3.0);
        let s2 = cplx(2.0, 3.0);
        let q: C = cplx(KERNEL_POLE.0, KERNEL_POLE.1);
        let f = identity_field(s1, s2);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..100 {
            let z = C::new(rng.gen_range(-5.0..5.0), rng.gen_range(0.1..6.0));
            // simplified by hand: [H₁ K²] / [H₂ K³] = (z - s₂)(z - q)² / (z - s₁)
            let want = (z - s2) * (z - q) * (z - q) / (z - s1);
            let got = f.field_eval(z).unwrap();
            assert!((got - want).norm() <= 1e-12 * want.norm().max(1.0), "{z}: {got} vs {want}");
        }
    }

    #[test]
    fn identity_residual_is_exactly_zero() {
        let f = AutomorphicField::<f64>::paper(2).unwrap();
        let id = MoebiusMap::identity();
        for z in [cplx(0.5, 2.0), cplx(-1.0, 1.5), cplx(3.0, 4.0)] {
            assert_eq!(f.equivariance_residual(&id, z).unwrap(), 0.0);
        }
        let g = identity_field(cplx(-2.0, 3.0), cplx(2.0, 3.0));
        assert_eq!(g.equivariance_residual(&id, cplx(0.3, 0.7)).unwrap(), 0.0);
    }

    #[test]
    fn truncation_increments_shrink() {
        let z = cplx(0.5, 2.0);
        let v: Vec<C> = (1..=4)
            .map(|l| AutomorphicField::<f64>::paper(l).unwrap().numerator().eval(z).unwrap())
            .collect();
        let d23 = (v[2] - v[1]).norm();
        let d34 = (v[3] - v[2]).norm();
        assert!(d34 < d23, "{d23} -> {d34}");
    }

    #[test]
    fn residual_decreases_with_radius_for_t4() {
        let t4 = paper_generators::<f64>()[3];
        let z = cplx(0.0, 1.0);
        let r: Vec<f64> = (1..=3)
            .map(|l| AutomorphicField::paper(l).unwrap().equivariance_residual(&t4, z).unwrap())
            .collect();
        assert!(r[1] < r[0] && r[2] < r[1], "{r:?}");
    }

    #[test]
    fn residual_sample_grid() {
        let s = residual_sample::<f64>();
        assert_eq!(s.len(), 20);
        assert_eq!((s[0], s[19]), (cplx(-3.0, 1.5), cplx(3.0, 4.5)));
        assert!(s.iter().all(|z| z.im > 0.0));
    }

    #[test]
    fn median_of_pointwise_residuals() {
        let f = AutomorphicField::<f64>::paper(2).unwrap();
        let t2 = paper_generators::<f64>()[1];
        let pts = [cplx(0.5, 2.0), cplx(-1.0, 1.5), cplx(3.0, 4.0), cplx(1.0, 1.0)];
        let mut r: Vec<f64> = pts.iter().map(|&z| f.equivariance_residual(&t2, z).unwrap()).collect();
        r.sort_by(f64::total_cmp);
        assert_eq!(median_residual(&f, &t2, &pts).unwrap(), (r[1] + r[2]) / 2.0);
        assert_eq!(median_residual(&f, &t2, &pts[..3]).unwrap(), {
            let mut odd = r.clone();
            odd.retain(|&x| x != f.equivariance_residual(&t2, pts[3]).unwrap());
            odd[1]
        });
        assert_eq!(median_residual(&f, &t2, &[]).unwrap(), 0.0);
    }

    #[test]
    fn evaluation_is_deterministic() {
        let f = AutomorphicField::<f64>::paper(3).unwrap();
        let z = cplx(0.25, 1.75);
        let a = f.field_eval(z).unwrap();
        let b = f.field_eval(z).unwrap();
        assert_eq!(a.re.to_bits(), b.re.to_bits());
        assert_eq!(a.im.to_bits(), b.im.to_bits());
    }

    #[test]
    fn near_pole_reported() {
        let f = AutomorphicField::<f64>::paper(1).unwrap();
        assert!(matches!(
            f.field_eval(cplx(-2.0, 3.0)),
            Err(FieldError::NearPole { .. })
        ));
        // T2 has its pole at z = -4
        assert!(matches!(
            f.field_eval(cplx(-4.0, 0.0)),
            Err(FieldError::NearPole { .. })
        ));
    }

    #[test]
    fn pendulum_values() {
        let p = pendulum_field(1.0).unwrap();
        assert_eq!(p.value(cplx(0.0, 0.0)), cplx(0.0, 0.0));
        let at_pi = p.value(cplx(PI, 0.0));
        assert!(at_pi.norm() < 1e-15);
        assert!((p.value(cplx(PI / 2.0, 1.0)) - cplx(1.0, -1.0)).norm() < 1e-15);
        assert!(pendulum_field(0.0).is_err());
        assert!(pendulum_field(-1.0).is_err());
    }

    #[test]
    fn canonical_values() {
        let one: C = cplx(1.0, 1.0);
        assert_eq!(canonical_field::<f64>(CanonicalKind::Saddle).value(one), cplx(1.0, -1.0));
        assert_eq!(canonical_field::<f64>(CanonicalKind::Node).value(one), one);
        assert_eq!(canonical_field::<f64>(CanonicalKind::Center).value(cplx(1.0, 0.0)), cplx(0.0, 1.0));
        assert_eq!(canonical_field::<f64>(CanonicalKind::Dipole).value(cplx(1.0, 0.0)), cplx(1.0, 0.0));
    }

    #[test]
    fn polynomial_from_roots() {
        let roots = [cplx(1.0, 0.0), cplx(0.0, 2.0)];
        let p = PlanarField::<f64>::with_roots(&roots);
        for r in roots {
            assert!(p.value(r).norm() < 1e-14);
        }
        let z = cplx(0.3, -0.2);
        let want = (z - roots[0]) * (z - roots[1]);
        assert!((p.value(z) - want).norm() < 1e-14);
    }
}
