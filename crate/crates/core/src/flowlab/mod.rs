//! Numerical flow analysis: trajectories, equilibria and their indices,
//! Poincaré–Hopf audits, flow-box charts and group covariance of orbits.

mod covariance;
mod integrate;
mod rectify;
mod sector;
mod winding;
mod zeros;

use num_complex::Complex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::autovec::{FieldError, VectorField};
use crate::scalar::Scalar;

pub use covariance::{covariance_check, CovarianceReport};
pub use integrate::{flow_to, integrate, IntegratorOptions, Termination, Trajectory};
pub use rectify::{rectify, ChartSample, FlowBoxChart, RectifyOptions};
pub use sector::{sector_index, SectorIndex};
pub use winding::{rect_winding, winding_index, winding_number, WindingOptions};
pub use zeros::{
    find_zeros, find_zeros_masked, poincare_hopf_check, Classification, PoincareHopfReport, ZeroOptions,
    ZeroRecord, ZeroScan,
};

/// Default acceptance tolerance on `|field|` at a located zero.
pub const ZERO_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FlowError {
    #[error("start point ({re}, {im}) is not evaluable: {source}")]
    NearPole { re: f64, im: f64, source: FieldError },
    #[error("field vanishes on the winding contour near ({re}, {im})")]
    ZeroOnContour { re: f64, im: f64 },
    #[error("winding number {value} is not close to an integer; sampling too coarse")]
    NonIntegerWinding { value: f64 },
    #[error("flow box around ({re}, {im}) contains or touches an equilibrium")]
    EquilibriumInBox { re: f64, im: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

impl FlowError {
    pub(crate) fn near_pole<T: Scalar>(z: Complex<T>, source: FieldError) -> Self {
        FlowError::NearPole {
            re: z.re.as_f64(),
            im: z.im.as_f64(),
            source,
        }
    }
}

/// Axis-aligned rectangle `[x0, x1] × [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect<T> {
    pub x0: T,
    pub x1: T,
    pub y0: T,
    pub y1: T,
}

impl<T: Scalar> Rect<T> {
    pub fn new(x0: T, x1: T, y0: T, y1: T) -> Result<Self, FlowError> {
        if !(x1 > x0) || !(y1 > y0) {
            return Err(FlowError::InvalidArgument("degenerate rectangle".into()));
        }
        Ok(Self { x0, x1, y0, y1 })
    }

    /// Square of half-width `half` around `c`.
    pub fn around(c: Complex<T>, half: T) -> Self {
        Self {
            x0: c.re - half,
            x1: c.re + half,
            y0: c.im - half,
            y1: c.im + half,
        }
    }

    pub fn contains(&self, z: Complex<T>) -> bool {
        z.re >= self.x0 && z.re <= self.x1 && z.im >= self.y0 && z.im <= self.y1
    }

    pub fn width(&self) -> T {
        self.x1 - self.x0
    }

    pub fn height(&self) -> T {
        self.y1 - self.y0
    }

    pub fn center(&self) -> Complex<T> {
        let two = T::lit(2.0);
        Complex::new((self.x0 + self.x1) / two, (self.y0 + self.y1) / two)
    }
}

/// The direction field `F/|F|`: same orbits, parametrised by arc length.
pub struct Normalized<'a, F: ?Sized>(pub &'a F);

impl<T: Scalar, F: VectorField<T> + ?Sized> VectorField<T> for Normalized<'_, F> {
    fn eval(&self, z: Complex<T>) -> Result<Complex<T>, FieldError> {
        let v = self.0.eval(z)?;
        let n = v.norm();
        if n > T::zero() {
            Ok(v / n)
        } else {
            Ok(v)
        }
    }
}
