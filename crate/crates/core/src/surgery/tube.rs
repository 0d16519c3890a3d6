use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::SurgeryError;
use crate::autovec::{FieldError, VectorField};
use crate::flowlab::{find_zeros_masked, winding_index, FlowError, Rect, ZeroOptions, ZeroRecord};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Disc<T> {
    pub center: Complex<T>,
    pub radius: T,
}

impl<T: Scalar> Disc<T> {
    pub fn new(center: Complex<T>, radius: T) -> Self {
        Self { center, radius }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct TubeOptions {
    /// The neck is the annulus `neck·ρ1 < |z - c1| < ρ1`.
    pub neck: f64,
    /// Blend transition width as a fraction of `ρ1`.
    pub width: f64,
    /// Zero-search grid over the tube's bounding square.
    pub grid: usize,
    /// Zero-search grid used to check that the discs are regular.
    pub disc_grid: usize,
    /// Smallest `|F|` tolerated on the tube boundary.
    pub blend_tol: f64,
    pub zeros: ZeroOptions,
}

impl Default for TubeOptions {
    fn default() -> Self {
        Self {
            neck: 0.4,
            width: 0.3,
            grid: 96,
            disc_grid: 32,
            blend_tol: 1e-6,
            zeros: ZeroOptions::default(),
        }
    }
}

/// The glued field in the chart of the first surface.
///
/// A point `z` with `u = z - c1` in the neck corresponds to
/// `w = c2 + k/u` on the second surface, `k = neck·ρ1·ρ2`; the inversion maps
/// the neck onto the matching annulus of the second disc and swaps its
/// boundary circles. The second field is pushed forward as
/// `X2(w)·(-u²/k)` and blended with the first by a C¹ smoothstep in `|u|`.
#[derive(Debug, Clone, Copy)]
pub struct TubeField<'a, T, F1: ?Sized, F2: ?Sized> {
    field1: &'a F1,
    field2: &'a F2,
    disc1: Disc<T>,
    disc2: Disc<T>,
    k: T,
    inner: T,
    outer: T,
    blend_from: T,
    width: T,
}

impl<'a, T: Scalar, F1: VectorField<T> + ?Sized, F2: VectorField<T> + ?Sized> TubeField<'a, T, F1, F2> {
    pub fn new(
        field1: &'a F1,
        disc1: Disc<T>,
        field2: &'a F2,
        disc2: Disc<T>,
        opts: &TubeOptions,
    ) -> Result<Self, SurgeryError> {
        let bad = |s: &str| Err(SurgeryError::InvalidTube(s.into()));
        if !(disc1.radius > T::zero()) || !(disc2.radius > T::zero()) {
            return bad("disc radii must be positive");
        }
        if !(opts.neck > 0.0 && opts.neck < 1.0) {
            return bad("neck ratio must lie in (0, 1)");
        }
        if !(opts.width > 0.0 && opts.width < 1.0 - opts.neck) {
            return bad("blend width must fit inside the neck");
        }
        let rho = disc1.radius;
        let neck = T::lit(opts.neck);
        let width = T::lit(opts.width) * rho;
        let mid = (T::one() + neck) / T::lit(2.0) * rho;
        Ok(Self {
            field1,
            field2,
            disc1,
            disc2,
            k: neck * rho * disc2.radius,
            inner: neck * rho,
            outer: rho,
            blend_from: mid - width / T::lit(2.0),
            width,
        })
    }

    /// Weight of the first field at distance `r` from `c1`.
    pub fn blend(&self, r: T) -> T {
        let s = ((r - self.blend_from) / self.width).max(T::zero()).min(T::one());
        s * s * (T::lit(3.0) - T::lit(2.0) * s)
    }

    /// Radii of the neck's boundary circles about `c1`.
    pub fn neck(&self) -> (T, T) {
        (self.inner, self.outer)
    }

    pub fn in_neck(&self, z: Complex<T>) -> bool {
        let r = (z - self.disc1.center).norm();
        r > self.inner && r < self.outer
    }

    /// Point of the second surface glued to `z`.
    pub fn partner(&self, z: Complex<T>) -> Option<Complex<T>> {
        let u = z - self.disc1.center;
        if u.norm() == T::zero() {
            return None;
        }
        Some(self.disc2.center + u.inv() * self.k)
    }
}

impl<T: Scalar, F1: VectorField<T> + ?Sized, F2: VectorField<T> + ?Sized> VectorField<T> for TubeField<'_, T, F1, F2> {
    fn eval(&self, z: Complex<T>) -> Result<Complex<T>, FieldError> {
        let u = z - self.disc1.center;
        let beta = self.blend(u.norm());
        let first = || self.field1.eval(z);
        let second = || -> Result<Complex<T>, FieldError> {
            let w = self.partner(z).ok_or(FieldError::NearPole { re: z.re.as_f64(), im: z.im.as_f64() })?;
            Ok(self.field2.eval(w)? * (-(u * u) / self.k))
        };
        if beta == T::one() {
            first()
        } else if beta == T::zero() {
            second()
        } else {
            Ok(first()? * beta + second()? * (T::one() - beta))
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TubeSum<T> {
    /// Equilibria found inside the neck.
    pub zeros: Vec<ZeroRecord<T>>,
    pub diagnostics: Vec<String>,
    pub inner_winding: i64,
    pub outer_winding: i64,
    /// Winding along the neck's oriented boundary, `outer - inner`.
    pub boundary_winding: i64,
}

impl<T> TubeSum<T> {
    pub fn index_sum(&self) -> i64 {
        self.zeros.iter().map(|z| z.winding_index).sum()
    }
}

fn check_disc<T: Scalar, F: VectorField<T> + ?Sized>(
    field: &F,
    disc: &Disc<T>,
    which: usize,
    opts: &TubeOptions,
) -> Result<(), SurgeryError> {
    let scan = find_zeros_masked(field, &Rect::around(disc.center, disc.radius), opts.disc_grid, &opts.zeros, |z| {
        (z - disc.center).norm() <= disc.radius
    })?;
    match scan.zeros.first() {
        Some(z) => Err(SurgeryError::DiscContainsZero {
            which,
            re: z.location.re.as_f64(),
            im: z.location.im.as_f64(),
        }),
        None => Ok(()),
    }
}

/// Glues two flows along regular discs and counts the equilibria created
/// in the neck.
#[allow(clippy::type_complexity)]
pub fn numeric_connected_sum<'a, T, F1, F2>(
    field1: &'a F1,
    disc1: Disc<T>,
    field2: &'a F2,
    disc2: Disc<T>,
    opts: &TubeOptions,
) -> Result<(TubeField<'a, T, F1, F2>, TubeSum<T>), SurgeryError>
where
    T: Scalar,
    F1: VectorField<T> + ?Sized,
    F2: VectorField<T> + ?Sized,
{
    let tube = TubeField::new(field1, disc1, field2, disc2, opts)?;
    check_disc(field1, &disc1, 1, opts)?;
    check_disc(field2, &disc2, 2, opts)?;

    let tol = T::lit(opts.blend_tol);
    let c = disc1.center;
    let (inner, outer) = tube.neck();
    const RING: usize = 720;
    for r in [inner, outer] {
        for k in 0..RING {
            let z = c + Complex::from_polar(r, T::TAU() * T::from_usize(k).unwrap() / T::from_usize(RING).unwrap());
            let v = tube.eval(z).map_err(|e| FlowError::near_pole(z, e))?;
            if v.norm() < tol {
                return Err(SurgeryError::BlendDegenerate {
                    re: z.re.as_f64(),
                    im: z.im.as_f64(),
                    value: v.norm().as_f64(),
                });
            }
        }
    }
    let inner_winding = winding_index(&tube, c, inner, &opts.zeros.winding)?;
    let outer_winding = winding_index(&tube, c, outer, &opts.zeros.winding)?;

    let scan = find_zeros_masked(&tube, &Rect::around(c, outer), opts.grid, &opts.zeros, |z| tube.in_neck(z))?;
    Ok((
        tube,
        TubeSum {
            zeros: scan.zeros,
            diagnostics: scan.diagnostics,
            inner_winding,
            outer_winding,
            boundary_winding: outer_winding - inner_winding,
        },
    ))
}
