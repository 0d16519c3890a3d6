use num_complex::Complex;

use super::{FlowError, Rect, ZERO_TOL};
use crate::autovec::VectorField;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy)]
pub struct WindingOptions {
    pub samples: usize,
    pub max_samples: usize,
    /// Successive doublings must agree this closely.
    pub agree: f64,
    /// Largest accepted distance of the estimate from an integer.
    pub integer_tol: f64,
    pub zero_tol: f64,
}

impl Default for WindingOptions {
    fn default() -> Self {
        Self {
            samples: 1024,
            max_samples: 1 << 16,
            agree: 0.01,
            integer_tol: 0.05,
            zero_tol: ZERO_TOL,
        }
    }
}

fn winding_at<T, F, P>(field: &F, curve: &P, n: usize, zero_tol: T) -> Result<T, FlowError>
where
    T: Scalar,
    F: VectorField<T> + ?Sized,
    P: Fn(T) -> Complex<T>,
{
    let eval = |k: usize| -> Result<Complex<T>, FlowError> {
        let z = curve(T::from_usize(k).unwrap() / T::from_usize(n).unwrap());
        let v = field.eval(z).map_err(|e| FlowError::near_pole(z, e))?;
        if v.norm() < zero_tol {
            return Err(FlowError::ZeroOnContour {
                re: z.re.as_f64(),
                im: z.im.as_f64(),
            });
        }
        Ok(v)
    };
    let first = eval(0)?;
    let mut prev = first;
    let mut total = T::zero();
    for k in 1..=n {
        let v = if k == n { first } else { eval(k)? };
        total = total + (v * prev.conj()).arg();
        prev = v;
    }
    Ok(total / T::TAU())
}

/// Unrounded winding number of the field along the closed curve
/// `curve: [0, 1) → C`, with adaptive doubling of the sample count until two
/// successive estimates agree.
pub fn winding_number<T, F, P>(field: &F, curve: P, opts: &WindingOptions) -> Result<T, FlowError>
where
    T: Scalar,
    F: VectorField<T> + ?Sized,
    P: Fn(T) -> Complex<T>,
{
    if opts.samples < 64 {
        return Err(FlowError::InvalidArgument("winding needs at least 64 samples".into()));
    }
    let tol = T::lit(opts.zero_tol);
    let mut n = opts.samples;
    let mut w = winding_at(field, &curve, n, tol)?;
    while n < opts.max_samples {
        let w2 = winding_at(field, &curve, 2 * n, tol)?;
        n *= 2;
        let settled = (w2 - w).abs() < T::lit(opts.agree);
        w = w2;
        if settled {
            return Ok(w);
        }
    }
    Err(FlowError::NonIntegerWinding { value: w.as_f64() })
}

fn rounded<T: Scalar>(w: T, opts: &WindingOptions) -> Result<i64, FlowError> {
    let r = w.round();
    if (w - r).abs() > T::lit(opts.integer_tol) {
        return Err(FlowError::NonIntegerWinding { value: w.as_f64() });
    }
    Ok(r.to_i64().unwrap_or(0))
}

/// Index of the field along the circle of `radius` about `center`.
pub fn winding_index<T: Scalar, F: VectorField<T> + ?Sized>(
    field: &F,
    center: Complex<T>,
    radius: T,
    opts: &WindingOptions,
) -> Result<i64, FlowError> {
    if !(radius > T::zero()) {
        return Err(FlowError::InvalidArgument("radius must be positive".into()));
    }
    let w = winding_number(
        field,
        |s: T| center + Complex::from_polar(radius, T::TAU() * s),
        opts,
    )?;
    rounded(w, opts)
}

/// Winding of the field along the counter-clockwise boundary of `rect`.
pub fn rect_winding<T: Scalar, F: VectorField<T> + ?Sized>(
    field: &F,
    rect: &Rect<T>,
    opts: &WindingOptions,
) -> Result<i64, FlowError> {
    let (w, h) = (rect.width(), rect.height());
    let per = (w + h) * T::lit(2.0);
    let corner = Complex::new(rect.x0, rect.y0);
    let w = winding_number(
        field,
        |s: T| {
            let mut d = s * per;
            if d < w {
                return corner + Complex::new(d, T::zero());
            }
            d = d - w;
            if d < h {
                return corner + Complex::new(w, d);
            }
            d = d - h;
            if d < w {
                return corner + Complex::new(w - d, h);
            }
            d = d - w;
            corner + Complex::new(T::zero(), h - d)
        },
        opts,
    )?;
    rounded(w, opts)
}
