use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::{winding_index, FlowError, Rect, WindingOptions, ZERO_TOL};
use crate::autovec::VectorField;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    /// Index -1.
    HyperbolicLike,
    /// Index +1: elliptic sectors and centres are not told apart.
    EllipticLike,
    /// |index| >= 2.
    Higher,
    Unclassified,
}

impl Classification {
    pub fn from_index(index: i64) -> Self {
        match index {
            -1 => Classification::HyperbolicLike,
            1 => Classification::EllipticLike,
            i if i.abs() >= 2 => Classification::Higher,
            _ => Classification::Unclassified,
        }
    }
}

/// A located equilibrium.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroRecord<T> {
    pub location: Complex<T>,
    pub winding_index: i64,
    /// `|field|` at `location`.
    pub residual: T,
    pub classification: Classification,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ZeroScan<T> {
    pub zeros: Vec<ZeroRecord<T>>,
    /// Dropped candidates and other non-fatal events.
    pub diagnostics: Vec<String>,
}

impl<T: Scalar> ZeroScan<T> {
    /// CSV with header `x,y,index,residual`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("x,y,index,residual\n");
        for z in &self.zeros {
            s.push_str(&format!(
                "{},{},{},{}\n",
                z.location.re.as_f64(),
                z.location.im.as_f64(),
                z.winding_index,
                z.residual.as_f64()
            ));
        }
        s
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ZeroOptions {
    pub zero_tol: f64,
    pub newton_max: usize,
    pub damping: f64,
    pub winding: WindingOptions,
}

impl Default for ZeroOptions {
    fn default() -> Self {
        Self {
            zero_tol: ZERO_TOL,
            newton_max: 50,
            damping: 0.5,
            winding: WindingOptions::default(),
        }
    }
}

fn jacobian<T: Scalar, F: VectorField<T> + ?Sized>(
    field: &F,
    z: Complex<T>,
    h: T,
) -> Option<[[T; 2]; 2]> {
    let two = T::lit(2.0);
    let dx = (field.eval(z + Complex::new(h, T::zero())).ok()? - field.eval(z - Complex::new(h, T::zero())).ok()?)
        / (two * h);
    let dy = (field.eval(z + Complex::new(T::zero(), h)).ok()? - field.eval(z - Complex::new(T::zero(), h)).ok()?)
        / (two * h);
    Some([[dx.re, dy.re], [dx.im, dy.im]])
}

/// Damped Newton iteration on the real 2×2 system.
fn newton<T: Scalar, F: VectorField<T> + ?Sized>(
    field: &F,
    start: Complex<T>,
    bounds: &Rect<T>,
    opts: &ZeroOptions,
) -> Result<(Complex<T>, T), String> {
    let tol = T::lit(opts.zero_tol);
    let damping = T::lit(opts.damping);
    let mut z = start;
    let mut f = field.eval(z).map_err(|e| e.to_string())?;
    let mut converged_at = None;
    for it in 0..opts.newton_max {
        if f.norm() < tol {
            // a couple of extra iterations tighten the location well below tol
            match converged_at {
                Some(k) if it >= k + 2 => break,
                None => converged_at = Some(it),
                _ => {}
            }
        }
        let h = T::lit(1e-7) * (T::one() + z.norm());
        let j = jacobian(field, z, h).ok_or("jacobian not evaluable")?;
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det == T::zero() || !det.is_finite() {
            if f.norm() < tol {
                break;
            }
            return Err("singular jacobian".into());
        }
        let step = Complex::new(
            (j[1][1] * f.re - j[0][1] * f.im) / det,
            (-j[1][0] * f.re + j[0][0] * f.im) / det,
        );
        let mut lambda = T::one();
        let mut accepted = false;
        for _ in 0..40 {
            let cand = z - step * lambda;
            if let Ok(fc) = field.eval(cand) {
                if fc.norm() < f.norm() || fc.norm() < tol {
                    z = cand;
                    f = fc;
                    accepted = true;
                    break;
                }
            }
            lambda = lambda * damping;
        }
        if !accepted {
            if f.norm() < tol {
                break;
            }
            return Err("no descent along the Newton direction".into());
        }
        if !bounds.contains(z) {
            return Err("iterate left the search window".into());
        }
    }
    if f.norm() < tol {
        Ok((z, f.norm()))
    } else {
        Err(format!("residual {:e} after {} iterations", f.norm().as_f64(), opts.newton_max))
    }
}

/// Equilibria in `region`: cells of an `n × n` grid on which both field
/// components change sign are refined by damped Newton iteration,
/// deduplicated, and given a winding index.
pub fn find_zeros<T: Scalar, F: VectorField<T> + ?Sized>(
    field: &F,
    region: &Rect<T>,
    n: usize,
    opts: &ZeroOptions,
) -> Result<ZeroScan<T>, FlowError> {
    find_zeros_masked(field, region, n, opts, |_| true)
}

/// As [`find_zeros`], restricted to cells whose centre satisfies `mask` and
/// to zeros inside `mask`.
pub fn find_zeros_masked<T, F, M>(
    field: &F,
    region: &Rect<T>,
    n: usize,
    opts: &ZeroOptions,
    mask: M,
) -> Result<ZeroScan<T>, FlowError>
where
    T: Scalar,
    F: VectorField<T> + ?Sized,
    M: Fn(Complex<T>) -> bool,
{
    if n < 8 {
        return Err(FlowError::InvalidArgument("grid resolution must be at least 8".into()));
    }
    let nf = T::from_usize(n).unwrap();
    let dx = region.width() / nf;
    let dy = region.height() / nf;
    let vertex = |i: usize, j: usize| {
        Complex::new(
            region.x0 + dx * T::from_usize(i).unwrap(),
            region.y0 + dy * T::from_usize(j).unwrap(),
        )
    };
    let values: Vec<Option<Complex<T>>> = (0..=n)
        .flat_map(|j| (0..=n).map(move |i| (i, j)))
        .map(|(i, j)| field.eval(vertex(i, j)).ok())
        .collect();
    let at = |i: usize, j: usize| values[j * (n + 1) + i];

    let cell = dx.min(dy);
    let dedup = cell * T::lit(0.25);
    let half = T::lit(0.5);
    let slack = Rect {
        x0: region.x0 - dx,
        x1: region.x1 + dx,
        y0: region.y0 - dy,
        y1: region.y1 + dy,
    };
    let mut diagnostics = Vec::new();
    let mut found: Vec<(Complex<T>, T)> = Vec::new();

    for j in 0..n {
        for i in 0..n {
            let center = vertex(i, j) + Complex::new(dx * half, dy * half);
            if !mask(center) {
                continue;
            }
            let corners = [at(i, j), at(i + 1, j), at(i, j + 1), at(i + 1, j + 1)];
            if corners.iter().any(|c| c.is_none()) {
                continue;
            }
            let corners: Vec<Complex<T>> = corners.iter().map(|c| c.unwrap()).collect();
            let straddles = |pick: fn(&Complex<T>) -> T| {
                let lo = corners.iter().map(pick).fold(T::infinity(), T::min);
                let hi = corners.iter().map(pick).fold(T::neg_infinity(), T::max);
                lo <= T::zero() && hi >= T::zero()
            };
            if !(straddles(|c| c.re) && straddles(|c| c.im)) {
                continue;
            }
            match newton(field, center, &slack, opts) {
                Ok((z, res)) => {
                    if !region.contains(z) || !mask(z) {
                        continue;
                    }
                    if found.iter().all(|(w, _)| (*w - z).norm() > dedup) {
                        found.push((z, res));
                    }
                }
                Err(why) => diagnostics.push(format!(
                    "newton diverged from cell ({i}, {j}) at ({}, {}): {why}",
                    center.re.as_f64(),
                    center.im.as_f64()
                )),
            }
        }
    }

    let mut zeros = Vec::with_capacity(found.len());
    for (k, &(z, residual)) in found.iter().enumerate() {
        let nearest = found
            .iter()
            .enumerate()
            .filter(|(m, _)| *m != k)
            .map(|(_, (w, _))| (*w - z).norm())
            .fold(T::infinity(), T::min);
        let mut radius = (cell * half).min(nearest * T::lit(0.4));
        let mut index = None;
        for _ in 0..6 {
            match winding_index(field, z, radius, &opts.winding) {
                Ok(w) => {
                    index = Some(w);
                    break;
                }
                Err(_) => radius = radius * half,
            }
        }
        let (winding_index, classification) = match index {
            Some(w) => (w, Classification::from_index(w)),
            None => {
                diagnostics.push(format!(
                    "no stable winding number at ({}, {})",
                    z.re.as_f64(),
                    z.im.as_f64()
                ));
                (0, Classification::Unclassified)
            }
        };
        zeros.push(ZeroRecord {
            location: z,
            winding_index,
            residual,
            classification,
        });
    }
    Ok(ZeroScan { zeros, diagnostics })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PoincareHopfReport {
    pub index_sum: i64,
    pub chi: i64,
    pub distinct: bool,
    pub pass: bool,
}

/// Compares the total winding index of `zeros` with the Euler
/// characteristic `chi`.
pub fn poincare_hopf_check<T: Scalar>(zeros: &[ZeroRecord<T>], chi: i64) -> PoincareHopfReport {
    let index_sum = zeros.iter().map(|z| z.winding_index).sum();
    let distinct = zeros.iter().enumerate().all(|(i, a)| {
        zeros[..i]
            .iter()
            .all(|b| (a.location - b.location).norm() > T::lit(ZERO_TOL))
    });
    PoincareHopfReport {
        index_sum,
        chi,
        distinct,
        pass: distinct && index_sum == chi,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::autovec::{canonical_field, pendulum_field, CanonicalKind, PlanarField};
    use crate::flowlab::rect_winding;
    use crate::scalar::cplx;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    type C = Complex<f64>;

    #[test]
    fn pendulum_zeros() {
        let f = pendulum_field(1.0).unwrap();
        let r = Rect::new(-4.0, 4.0, -3.0, 3.0).unwrap();
        let scan = find_zeros(&f, &r, 40, &ZeroOptions::default()).unwrap();
        let mut got: Vec<(f64, i64)> = scan.zeros.iter().map(|z| (z.location.re, z.winding_index)).collect();
        got.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        assert_eq!(got.len(), 3);
        let want = [(-PI, -1), (0.0, 1), (PI, -1)];
        for ((x, w), (xe, we)) in got.iter().zip(want) {
            assert!((x - xe).abs() < 1e-6);
            assert_eq!(*w, we);
        }
        for z in &scan.zeros {
            assert!(z.location.im.abs() < 1e-6);
            assert!(z.residual < ZERO_TOL);
        }
    }

    #[test]
    fn saddle_has_single_zero() {
        let f = canonical_field::<f64>(CanonicalKind::Saddle);
        let r = Rect::new(-1.0, 1.0, -1.0, 1.0).unwrap();
        let scan = find_zeros(&f, &r, 16, &ZeroOptions::default()).unwrap();
        assert_eq!(scan.zeros.len(), 1);
        assert!(scan.zeros[0].location.norm() < 1e-9);
        assert_eq!(scan.zeros[0].classification, Classification::HyperbolicLike);
    }

    #[test]
    fn center_off_origin_has_none() {
        let f = canonical_field::<f64>(CanonicalKind::Center);
        let r = Rect::new(0.5, 1.5, 0.5, 1.5).unwrap();
        assert!(find_zeros(&f, &r, 16, &ZeroOptions::default()).unwrap().zeros.is_empty());
    }

    #[test]
    fn coarse_grid_rejected() {
        let f = canonical_field::<f64>(CanonicalKind::Center);
        let r = Rect::new(0.5, 1.5, 0.5, 1.5).unwrap();
        assert!(find_zeros(&f, &r, 4, &ZeroOptions::default()).is_err());
    }

    #[test]
    fn poincare_hopf_examples() {
        let f = pendulum_field(1.0).unwrap();
        // one period: [-pi/2, 3pi/2) holds (0,0) and (pi,0)
        let r = Rect::new(-PI / 2.0, 1.5 * PI, -2.0, 2.0).unwrap();
        let scan = find_zeros(&f, &r, 32, &ZeroOptions::default()).unwrap();
        assert_eq!(scan.zeros.len(), 2);
        assert!(poincare_hopf_check(&scan.zeros, 0).pass);

        let d = canonical_field::<f64>(CanonicalKind::Dipole);
        let r = Rect::new(-1.0, 1.0, -1.0, 1.0).unwrap();
        let scan = find_zeros(&d, &r, 16, &ZeroOptions::default()).unwrap();
        assert_eq!(scan.zeros.len(), 1);
        assert!(poincare_hopf_check(&scan.zeros, 2).pass);

        assert!(poincare_hopf_check::<f64>(&[], 0).pass);
    }

    #[test]
    fn dipole_has_no_zero_at_infinity() {
        // chart w = 1/z: ẇ = -w² ż(1/w) = -1, nonvanishing
        let at_infinity = |w: C| -> Result<C, crate::autovec::FieldError> {
            let _ = w;
            Ok(cplx(-1.0, 0.0))
        };
        let o = WindingOptions::default();
        assert_eq!(winding_index(&at_infinity, C::new(0.0, 0.0), 0.5, &o).unwrap(), 0);
    }

    #[test]
    fn duplicate_zeros_fail_audit() {
        let z = ZeroRecord {
            location: cplx::<f64>(0.0, 0.0),
            winding_index: 1,
            residual: 0.0,
            classification: Classification::EllipticLike,
        };
        let report = poincare_hopf_check(&[z.clone(), z], 2);
        assert!(!report.distinct);
        assert!(!report.pass);
    }

    #[test]
    fn winding_additivity_on_random_polynomials() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let o = ZeroOptions::default();
        for _ in 0..10 {
            let k = rng.gen_range(1..4);
            let roots: Vec<C> = (0..k)
                .map(|_| C::new(rng.gen_range(-0.8..0.8), rng.gen_range(-0.8..0.8)))
                .collect();
            let f = PlanarField::with_roots(&roots);
            let r = Rect::new(-1.0, 1.0, -1.0, 1.0).unwrap();
            let scan = find_zeros(&f, &r, 64, &o).unwrap();
            let sum: i64 = scan.zeros.iter().map(|z| z.winding_index).sum();
            let boundary = rect_winding(&f, &r, &o.winding).unwrap();
            assert_eq!(sum, boundary);
            // complex-analytic: boundary winding counts roots with multiplicity
            assert_eq!(boundary, k as i64);
        }
    }
}
