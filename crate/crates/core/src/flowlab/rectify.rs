use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::{flow_to, rect_winding, FlowError, IntegratorOptions, Rect, Termination, WindingOptions};
use crate::autovec::VectorField;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy)]
pub struct RectifyOptions {
    /// Chart nodes per side.
    pub grid: usize,
    /// `|field|` below this anywhere in the box means an equilibrium.
    pub zero_tol: f64,
    pub h0: f64,
    pub integrator: IntegratorOptions,
}

impl Default for RectifyOptions {
    fn default() -> Self {
        Self {
            grid: 11,
            zero_tol: 1e-6,
            h0: 1e-3,
            integrator: IntegratorOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChartSample<T> {
    pub t: T,
    pub s: T,
    pub point: Complex<T>,
}

/// Local chart `(t, s) ↦ φ_t(q(s))` in which the flow reads `ṫ = 1, ṡ = 0`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FlowBoxChart<T> {
    pub base: Complex<T>,
    pub transversal: (Complex<T>, Complex<T>),
    /// `|field(base)|`, the constant speed of the straightened flow.
    pub speed: T,
    pub samples: Vec<ChartSample<T>>,
    /// Max over interior chart nodes of `|pushforward - (1, 0)|`.
    pub residual: T,
}

/// Builds a flow-box chart of spatial size `size` at the regular point `p`.
///
/// The transversal is the segment through `p` orthogonal to `field(p)`; the
/// chart coordinate `t` is flow time from it. The residual compares the
/// field, pulled back through finite-difference chart Jacobians, with the
/// unit horizontal field.
pub fn rectify<T: Scalar, F: VectorField<T> + ?Sized>(
    field: &F,
    p: Complex<T>,
    size: T,
    opts: &RectifyOptions,
) -> Result<FlowBoxChart<T>, FlowError> {
    if !(size > T::zero()) || opts.grid < 3 {
        return Err(FlowError::InvalidArgument("box size must be positive and grid >= 3".into()));
    }
    let in_box = || FlowError::EquilibriumInBox {
        re: p.re.as_f64(),
        im: p.im.as_f64(),
    };
    let tol = T::lit(opts.zero_tol);
    let v = field.eval(p).map_err(|e| FlowError::near_pole(p, e))?;
    let speed = v.norm();
    if speed < tol {
        return Err(in_box());
    }
    // Any zero within the chart's reach shows up as a nonzero index of the
    // surrounding square, or as a vanishing value on it.
    let wopts = WindingOptions {
        zero_tol: opts.zero_tol,
        ..WindingOptions::default()
    };
    match rect_winding(field, &Rect::around(p, size * T::lit(1.5)), &wopts) {
        Ok(0) => {}
        Ok(_) | Err(FlowError::ZeroOnContour { .. }) => return Err(in_box()),
        Err(e) => return Err(e),
    }

    let normal = Complex::new(-v.im, v.re) / speed;
    let n = opts.grid;
    let nf = T::from_usize(n - 1).unwrap();
    let ds = size / nf;
    let dt = size / speed / nf;
    let half = size / T::lit(2.0);
    let h0 = T::lit(opts.h0).min(dt);

    // nodes -1..=n along both axes; the outer ring only feeds differences
    let idx = |k: usize| T::from_usize(k).unwrap() - T::one();
    let mut phi = vec![vec![Complex::new(T::zero(), T::zero()); n + 2]; n + 2];
    for (j, row) in phi.iter_mut().enumerate() {
        let s = idx(j) * ds - half;
        let start = p + normal * s;
        let (back, why) = flow_to(field, start, -dt, h0, &opts.integrator)?;
        if why != Termination::TimeLimit {
            return Err(in_box());
        }
        row[0] = back;
        row[1] = start;
        let mut z = start;
        for cell in row.iter_mut().skip(2) {
            let (next, why) = flow_to(field, z, dt, h0, &opts.integrator)?;
            if why != Termination::TimeLimit {
                return Err(in_box());
            }
            z = next;
            *cell = z;
        }
    }

    let mut samples = Vec::with_capacity(n * n);
    let mut residual = T::zero();
    let two = T::lit(2.0);
    for j in 1..=n {
        for i in 1..=n {
            let z = phi[j][i];
            let f = field.eval(z).map_err(|e| FlowError::near_pole(z, e))?;
            if f.norm() < tol {
                return Err(in_box());
            }
            let d_t = (phi[j][i + 1] - phi[j][i - 1]) / (two * dt);
            let d_s = (phi[j + 1][i] - phi[j - 1][i]) / (two * ds);
            let det = d_t.re * d_s.im - d_s.re * d_t.im;
            if det == T::zero() {
                return Err(in_box());
            }
            let wt = (d_s.im * f.re - d_s.re * f.im) / det;
            let ws = (-d_t.im * f.re + d_t.re * f.im) / det;
            residual = residual.max(Complex::new(wt - T::one(), ws).norm());
            samples.push(ChartSample {
                t: idx(i) * dt,
                s: idx(j) * ds - half,
                point: z,
            });
        }
    }

    Ok(FlowBoxChart {
        base: p,
        transversal: (p - normal * half, p + normal * half),
        speed,
        samples,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::autovec::{canonical_field, pendulum_field, CanonicalKind, PlanarField};
    use crate::scalar::cplx;

    #[test]
    fn constant_field_is_already_straight() {
        let f = PlanarField::Constant { value: cplx::<f64>(1.0, 0.0) };
        let chart = rectify(&f, cplx(0.0, 0.0), 0.5, &RectifyOptions::default()).unwrap();
        assert!(chart.residual < 1e-9, "{}", chart.residual);
        assert_eq!(chart.samples.len(), 121);
        assert_eq!(chart.speed, 1.0);
    }

    #[test]
    fn pendulum_chart() {
        let f = pendulum_field(1.0).unwrap();
        let chart = rectify(&f, cplx::<f64>(0.0, 1.0), 0.1, &RectifyOptions::default()).unwrap();
        assert!(chart.residual < 1e-3, "{}", chart.residual);
        // transversal is orthogonal to the field (1, 0) at (0, 1)
        let (a, b) = chart.transversal;
        assert!((b - a).re.abs() < 1e-12);
    }

    #[test]
    fn equilibrium_rejected() {
        let f = pendulum_field(1.0).unwrap();
        assert!(matches!(
            rectify(&f, cplx(0.0, 0.0), 0.1, &RectifyOptions::default()),
            Err(FlowError::EquilibriumInBox { .. })
        ));
        // regular base point, but the saddle sits inside the box
        let s = canonical_field::<f64>(CanonicalKind::Saddle);
        assert!(matches!(
            rectify(&s, cplx(0.02, 0.01), 0.1, &RectifyOptions::default()),
            Err(FlowError::EquilibriumInBox { .. })
        ));
    }

    #[test]
    fn canonical_fields_rectify() {
        for kind in [CanonicalKind::Saddle, CanonicalKind::Node, CanonicalKind::Center, CanonicalKind::Dipole] {
            let f = canonical_field::<f64>(kind);
            for p in [cplx(1.0, 0.5), cplx(-0.7, 1.2)] {
                let chart = rectify(&f, p, 0.1, &RectifyOptions::default()).unwrap();
                assert!(chart.residual < 1e-3, "{kind:?} at {p}: {}", chart.residual);
            }
        }
    }
}
