use num_complex::Complex;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::HeegaardError;
use crate::autovec::FieldError;
use crate::flowlab::{find_zeros, FlowError, Rect, ZeroOptions};
use crate::scalar::Scalar;

/// Holomorphic vector field on the Riemann sphere, `ż = c0 + c1 z + c2 z²`
/// in the chart `z` (stereographic from the north pole); in the chart
/// `w = 1/z` it reads `ẇ = -(c0 w² + c1 w + c2)`. Every holomorphic field on
/// the sphere has this form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphereField<T> {
    pub coefficients: [Complex<T>; 3],
}

type Vec3<T> = [T; 3];

fn norm3<T: Scalar>(v: &Vec3<T>) -> T {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

impl<T: Scalar> SphereField<T> {
    pub fn new(c0: Complex<T>, c1: Complex<T>, c2: Complex<T>) -> Self {
        Self {
            coefficients: [c0, c1, c2],
        }
    }

    /// `ż = z²`: a single double zero at the south pole.
    pub fn dipole() -> Self {
        Self::new(Complex::zero(), Complex::zero(), Complex::new(T::one(), T::zero()))
    }

    /// `ż = i z`: rotation about the polar axis.
    pub fn rotation() -> Self {
        Self::new(Complex::zero(), Complex::new(T::zero(), T::one()), Complex::zero())
    }

    pub fn zero() -> Self {
        Self::new(Complex::zero(), Complex::zero(), Complex::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.iter().all(|c| c.is_zero())
    }

    /// Velocity in the `z` chart.
    pub fn chart_z(&self, z: Complex<T>) -> Complex<T> {
        let [c0, c1, c2] = self.coefficients;
        c0 + z * (c1 + z * c2)
    }

    /// Velocity in the `w` chart.
    pub fn chart_w(&self, w: Complex<T>) -> Complex<T> {
        let [c0, c1, c2] = self.coefficients;
        -(c2 + w * (c1 + w * c0))
    }

    /// Tangent vector at the unit vector `u`.
    pub fn tangent(&self, u: Vec3<T>) -> Vec3<T> {
        let two = T::lit(2.0);
        let four = T::lit(4.0);
        if u[2] <= T::zero() {
            let z = to_z(u);
            let (x, y) = (z.re, z.im);
            let s = T::one() + x * x + y * y;
            let s2 = s * s;
            let v = self.chart_z(z);
            let dx = [two / s - four * x * x / s2, -four * x * y / s2, four * x / s2];
            let dy = [-four * x * y / s2, two / s - four * y * y / s2, four * y / s2];
            [0, 1, 2].map(|k| dx[k] * v.re + dy[k] * v.im)
        } else {
            let w = to_w(u);
            let (x, y) = (w.re, w.im);
            let s = T::one() + x * x + y * y;
            let s2 = s * s;
            let v = self.chart_w(w);
            let dx = [two / s - four * x * x / s2, four * x * y / s2, -four * x / s2];
            let dy = [-four * x * y / s2, -two / s + four * y * y / s2, -four * y / s2];
            [0, 1, 2].map(|k| dx[k] * v.re + dy[k] * v.im)
        }
    }

    /// Zeros on the unit sphere, from the roots of the chart polynomials.
    /// `None` for the zero field.
    pub fn zeros(&self) -> Option<Vec<Vec3<T>>> {
        if self.is_zero() {
            return None;
        }
        let [c0, c1, c2] = self.coefficients;
        let mut out = Vec::new();
        if c2.is_zero() {
            out.push(north());
            if !c1.is_zero() {
                out.push(from_z(-c0 / c1));
            }
        } else {
            let disc = (c1 * c1 - c0 * c2 * T::lit(4.0)).sqrt();
            let two = T::lit(2.0);
            for r in [(-c1 + disc) / (c2 * two), (-c1 - disc) / (c2 * two)] {
                out.push(from_z(r));
            }
            if disc.is_zero() {
                out.pop();
            }
        }
        Some(out)
    }
}

fn north<T: Scalar>() -> Vec3<T> {
    [T::zero(), T::zero(), T::one()]
}

fn to_z<T: Scalar>(u: Vec3<T>) -> Complex<T> {
    Complex::new(u[0], u[1]) / (T::one() - u[2])
}

fn to_w<T: Scalar>(u: Vec3<T>) -> Complex<T> {
    Complex::new(u[0], -u[1]) / (T::one() + u[2])
}

fn from_z<T: Scalar>(z: Complex<T>) -> Vec3<T> {
    let s = T::one() + z.norm_sqr();
    let two = T::lit(2.0);
    [two * z.re / s, two * z.im / s, T::one() - two / s]
}

fn from_w<T: Scalar>(w: Complex<T>) -> Vec3<T> {
    let s = T::one() + w.norm_sqr();
    let two = T::lit(2.0);
    [two * w.re / s, -two * w.im / s, (T::one() - w.norm_sqr()) / s]
}

/// Radial profile `r ↦ Σ c_k r^k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Profile<T> {
    pub coefficients: Vec<T>,
}

impl<T: Scalar> Profile<T> {
    pub fn new(coefficients: Vec<T>) -> Self {
        Self { coefficients }
    }

    pub fn eval(&self, r: T) -> T {
        self.coefficients.iter().rev().fold(T::zero(), |acc, c| acc * r + *c)
    }
}

/// `V(r u) = a(r)·X(u) + b(r)·u` on the closed unit ball, for a sphere field
/// `X`: the sphere flow shrunk onto concentric spheres plus a radial part
/// vanishing at the centre and on the boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallExtensionField<T> {
    pub surface: SphereField<T>,
    pub a: Profile<T>,
    pub b: Profile<T>,
}

impl<T: Scalar> BallExtensionField<T> {
    /// Default profiles `a(r) = r`, `b(r) = r(1 - r)`.
    pub fn new(surface: SphereField<T>) -> Self {
        Self {
            surface,
            a: Profile::new(vec![T::zero(), T::one()]),
            b: Profile::new(vec![T::zero(), T::one(), -T::one()]),
        }
    }

    /// Checks `a(0) = 0`, `b(0) = b(1) = 0` and `b > 0` on a grid of `(0, 1)`.
    pub fn with_profiles(surface: SphereField<T>, a: Profile<T>, b: Profile<T>) -> Result<Self, HeegaardError> {
        let bad = |s: String| Err(HeegaardError::InvalidProfile(s));
        let tiny = T::lit(1e-12);
        if a.eval(T::zero()).abs() > tiny {
            return bad("a(0) must vanish".into());
        }
        if b.eval(T::zero()).abs() > tiny || b.eval(T::one()).abs() > tiny {
            return bad("b must vanish at 0 and 1".into());
        }
        const GRID: usize = 1000;
        for k in 1..GRID {
            let r = T::from_usize(k).unwrap() / T::from_usize(GRID).unwrap();
            if !(b.eval(r) > T::zero()) {
                return bad(format!("b({}) is not positive", r.as_f64()));
            }
        }
        Ok(Self { surface, a, b })
    }
}

/// Value of the extended field at `x`, `|x| ≤ 1`.
pub fn extend_to_ball<T: Scalar>(f: &BallExtensionField<T>, x: [T; 3]) -> Result<[T; 3], HeegaardError> {
    let r = norm3(&x);
    if r > T::one() + T::lit(1e-12) {
        return Err(HeegaardError::OutsideBall);
    }
    if r == T::zero() {
        return Ok([T::zero(); 3]);
    }
    let u = x.map(|c| c / r);
    let t = f.surface.tangent(u);
    let (a, b) = (f.a.eval(r), f.b.eval(r));
    Ok([0, 1, 2].map(|k| a * t[k] + b * u[k]))
}

/// Equilibria of the extended handlebody flow: one at the centre and one
/// inside each handle.
pub fn handle_equilibria(g: u32) -> u64 {
    1 + u64::from(g)
}

#[derive(Debug, Clone, Copy)]
pub struct SampleOptions {
    pub samples: usize,
    pub seed: u64,
    /// `|V|` below this counts as a zero.
    pub zero_tol: f64,
    /// Zeros closer than this to the centre are expected.
    pub origin_radius: f64,
    pub shards: usize,
}

impl Default for SampleOptions {
    fn default() -> Self {
        Self {
            samples: 100_000,
            seed: 0,
            zero_tol: 1e-9,
            origin_radius: 1e-3,
            shards: 16,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryCheck {
    pub expected: Vec<[f64; 3]>,
    pub found: Vec<[f64; 3]>,
    /// Largest distance from a zero in either list to the nearest zero in
    /// the other.
    pub max_mismatch: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtensionReport {
    pub samples: usize,
    pub seed: u64,
    pub origin_radius: f64,
    pub zero_tol: f64,
    /// Sampled points outside the origin ball where `|V| < zero_tol`.
    pub interior_hits: usize,
    pub hit_points: Vec<[f64; 3]>,
    /// Smallest `|V|` seen outside the origin ball.
    pub min_norm: Option<f64>,
    /// `None` when the surface field vanishes identically.
    pub boundary: Option<BoundaryCheck>,
}

fn uniform_in_ball(rng: &mut ChaCha8Rng) -> [f64; 3] {
    loop {
        let p: [f64; 3] = [0, 1, 2].map(|_| rng.gen_range(-1.0..1.0));
        if p.iter().map(|c| c * c).sum::<f64>() <= 1.0 {
            return p;
        }
    }
}

/// Uniform interior sampling of `|V|`. Shard `k` draws its points from a
/// generator seeded with `(seed, k)`, so results do not depend on thread
/// scheduling.
pub fn sample_interior(f: &BallExtensionField<f64>, opts: &SampleOptions) -> Result<ExtensionReport, HeegaardError> {
    let shards = opts.shards.max(1);
    let per = opts.samples.div_ceil(shards);
    let results: Vec<(Vec<[f64; 3]>, Option<f64>)> = (0..shards)
        .into_par_iter()
        .map(|k| {
            let mut seed = [0u8; 32];
            seed[..8].copy_from_slice(&opts.seed.to_le_bytes());
            seed[8..16].copy_from_slice(&(k as u64).to_le_bytes());
            let mut rng = ChaCha8Rng::from_seed(seed);
            let count = per.min(opts.samples.saturating_sub(k * per));
            let mut hits = Vec::new();
            let mut min: Option<f64> = None;
            for _ in 0..count {
                let x = uniform_in_ball(&mut rng);
                if norm3(&x) <= opts.origin_radius {
                    continue;
                }
                let v = norm3(&extend_to_ball(f, x)?);
                min = Some(min.map_or(v, |m| m.min(v)));
                if v < opts.zero_tol {
                    hits.push(x);
                }
            }
            Ok((hits, min))
        })
        .collect::<Result<_, HeegaardError>>()?;

    let hit_points: Vec<[f64; 3]> = results.iter().flat_map(|(h, _)| h.iter().copied()).collect();
    let min_norm = results.iter().filter_map(|(_, m)| *m).reduce(f64::min);
    Ok(ExtensionReport {
        samples: opts.samples,
        seed: opts.seed,
        origin_radius: opts.origin_radius,
        zero_tol: opts.zero_tol,
        interior_hits: hit_points.len(),
        hit_points,
        min_norm,
        boundary: boundary_check(f)?,
    })
}

/// Zeros of the extended field on the unit sphere, located numerically by
/// pulling `V` back to both stereographic charts.
pub fn sphere_zeros_numeric(f: &BallExtensionField<f64>) -> Result<Vec<[f64; 3]>, FlowError> {
    let opts = ZeroOptions::default();
    let square = Rect::new(-1.2, 1.2, -1.2, 1.2)?;
    let mut out: Vec<[f64; 3]> = Vec::new();
    // chart coordinates of V; the stereographic differential is conformal
    // with factor 2/(1+|z|²)
    let pulled = |embed: fn(Complex<f64>) -> [f64; 3]| {
        move |z: Complex<f64>| -> Result<Complex<f64>, FieldError> {
            let h = 1e-7;
            let p = embed(z);
            let v = extend_to_ball(f, p).map_err(|_| FieldError::NonFinite { re: z.re, im: z.im })?;
            let ex = embed(z + h).map(|c| c / h);
            let ey = embed(z + Complex::new(0.0, h)).map(|c| c / h);
            let (ex, ey) = ([0, 1, 2].map(|k| ex[k] - p[k] / h), [0, 1, 2].map(|k| ey[k] - p[k] / h));
            let dot = |a: [f64; 3], b: [f64; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
            let scale = dot(ex, ex);
            Ok(Complex::new(dot(v, ex) / scale, dot(v, ey) / scale))
        }
    };
    for embed in [from_z as fn(Complex<f64>) -> [f64; 3], from_w] {
        let field = pulled(embed);
        let scan = find_zeros(&field, &square, 48, &opts)?;
        for z in scan.zeros {
            let p = embed(polish(&field, z.location));
            if !out.iter().any(|q| dist(q, &p) < 1e-4) {
                out.push(p);
            }
        }
    }
    Ok(out)
}

/// Plain Newton steps past the zero finder's tolerance, so that multiple
/// zeros (where convergence is only linear) are pinned down too.
fn polish<F: Fn(Complex<f64>) -> Result<Complex<f64>, FieldError>>(f: &F, mut z: Complex<f64>) -> Complex<f64> {
    let Ok(mut fz) = f(z) else { return z };
    for _ in 0..200 {
        if fz.norm() < 1e-300 {
            break;
        }
        let h = 1e-3 * z.norm().clamp(1e-12, 1e-6);
        let (Ok(a), Ok(b), Ok(c), Ok(d)) = (
            f(z + Complex::new(h, 0.0)),
            f(z - Complex::new(h, 0.0)),
            f(z + Complex::new(0.0, h)),
            f(z - Complex::new(0.0, h)),
        ) else {
            break;
        };
        let dx = (a - b) / (2.0 * h);
        let dy = (c - d) / (2.0 * h);
        let det = dx.re * dy.im - dy.re * dx.im;
        if det == 0.0 {
            break;
        }
        let step = Complex::new((dy.im * fz.re - dy.re * fz.im) / det, (-dx.im * fz.re + dx.re * fz.im) / det);
        let next = z - step;
        match f(next) {
            Ok(fn_) if fn_.norm() < fz.norm() => {
                z = next;
                fz = fn_;
            }
            _ => break,
        }
    }
    z
}

fn dist(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    norm3(&[a[0] - b[0], a[1] - b[1], a[2] - b[2]])
}

fn boundary_check(f: &BallExtensionField<f64>) -> Result<Option<BoundaryCheck>, HeegaardError> {
    let Some(expected) = f.surface.zeros() else {
        return Ok(None);
    };
    let found = sphere_zeros_numeric(f).map_err(|e| HeegaardError::InvalidProfile(e.to_string()))?;
    let nearest = |p: &[f64; 3], set: &[[f64; 3]]| set.iter().map(|q| dist(p, q)).fold(f64::INFINITY, f64::min);
    let max_mismatch = expected
        .iter()
        .map(|p| nearest(p, &found))
        .chain(found.iter().map(|p| nearest(p, &expected)))
        .fold(0.0, f64::max);
    Ok(Some(BoundaryCheck {
        pass: max_mismatch <= 1e-6,
        expected,
        found,
        max_mismatch,
    }))
}
