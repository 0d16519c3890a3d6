use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::{FlowError, Rect};
use crate::autovec::{FieldError, VectorField};
use crate::scalar::Scalar;

/// Why an integration stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    TimeLimit,
    PoleProximity,
    RegionExit,
    StepLimit,
}

#[derive(Debug, Clone, Copy)]
pub struct IntegratorOptions {
    /// Largest accepted displacement of a single step.
    pub max_disp: f64,
    /// Step size below which halving gives up (treated as a pole).
    pub min_step: f64,
    pub max_steps: usize,
    pub region: Option<Rect<f64>>,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        Self {
            max_disp: 0.05,
            min_step: 1e-10,
            max_steps: 2_000_000,
            region: None,
        }
    }
}

/// Sampled orbit. Times are strictly monotone in the direction of
/// integration (decreasing for reverse-time runs).
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub samples: Vec<(T, Complex<T>)>,
    pub termination: Termination,
}

impl<T: Scalar> Trajectory<T> {
    pub fn end(&self) -> (T, Complex<T>) {
        *self.samples.last().expect("trajectory has at least one sample")
    }

    /// CSV with header `t,x,y`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,x,y\n");
        for (t, z) in &self.samples {
            s.push_str(&format!("{},{},{}\n", t.as_f64(), z.re.as_f64(), z.im.as_f64()));
        }
        s
    }
}

fn rk4<T: Scalar, F: VectorField<T> + ?Sized>(
    field: &F,
    z: Complex<T>,
    k1: Complex<T>,
    h: T,
) -> Result<Complex<T>, FieldError> {
    let two = T::lit(2.0);
    let six = T::lit(6.0);
    let k2 = field.eval(z + k1 * (h / two))?;
    let k3 = field.eval(z + k2 * (h / two))?;
    let k4 = field.eval(z + k3 * h)?;
    Ok((k1 + k2 * two + k3 * two + k4) * (h / six))
}

/// Classical fourth-order integration from `z0` over `[0, t_end]` (or
/// `[t_end, 0]`) with initial step `h0`, halving the step whenever a step
/// moves further than `max_disp`, touches a singularity, or ends where the
/// field points against its direction at the start (a pole was crossed).
pub fn integrate<T: Scalar, F: VectorField<T> + ?Sized>(
    field: &F,
    z0: Complex<T>,
    t_end: T,
    h0: T,
    opts: &IntegratorOptions,
) -> Result<Trajectory<T>, FlowError> {
    if !(h0 > T::zero()) {
        return Err(FlowError::InvalidArgument("initial step must be positive".into()));
    }
    let mut k1 = field.eval(z0).map_err(|e| FlowError::near_pole(z0, e))?;

    let mut samples = vec![(T::zero(), z0)];
    if t_end == T::zero() {
        return Ok(Trajectory {
            samples,
            termination: Termination::TimeLimit,
        });
    }
    let dir = t_end.signum();
    let max_disp = T::lit(opts.max_disp);
    let min_step = T::lit(opts.min_step);
    let region = opts.region.map(|r| Rect {
        x0: T::lit(r.x0),
        x1: T::lit(r.x1),
        y0: T::lit(r.y0),
        y1: T::lit(r.y1),
    });

    let mut t = T::zero();
    let mut z = z0;
    let mut h = h0;
    let mut steps = 0usize;
    let termination = loop {
        let remaining = (t_end - t) * dir;
        if remaining <= T::zero() {
            break Termination::TimeLimit;
        }
        if steps >= opts.max_steps {
            break Termination::StepLimit;
        }
        let last = h >= remaining;
        let step = if last { remaining } else { h };
        let accepted = match rk4(field, z, k1, step * dir) {
            Ok(dz) if dz.norm() <= max_disp && dz.re.is_finite() && dz.im.is_finite() => {
                match field.eval(z + dz) {
                    Ok(k) if (k * k1.conj()).re >= T::zero() => Some((dz, k)),
                    _ => None,
                }
            }
            _ => None,
        };
        let Some((dz, k_next)) = accepted else {
            h = step / T::lit(2.0);
            if h < min_step {
                break Termination::PoleProximity;
            }
            continue;
        };
        steps += 1;
        t = if last { t_end } else { t + step * dir };
        z = z + dz;
        k1 = k_next;
        samples.push((t, z));
        if let Some(r) = &region {
            if !r.contains(z) {
                break Termination::RegionExit;
            }
        }
        if dz.norm() < max_disp / T::lit(4.0) && h < h0 {
            h = (h * T::lit(2.0)).min(h0);
        }
    };

    Ok(Trajectory { samples, termination })
}

/// Endpoint of the flow after time `t`.
pub fn flow_to<T: Scalar, F: VectorField<T> + ?Sized>(
    field: &F,
    z0: Complex<T>,
    t: T,
    h0: T,
    opts: &IntegratorOptions,
) -> Result<(Complex<T>, Termination), FlowError> {
    let tr = integrate(field, z0, t, h0, opts)?;
    Ok((tr.end().1, tr.termination))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::autovec::{CanonicalKind, PlanarField, canonical_field, pendulum_field};
    use crate::scalar::cplx;
    use std::f64::consts::PI;

    type C = Complex<f64>;

    fn opts() -> IntegratorOptions {
        IntegratorOptions::default()
    }

    #[test]
    fn center_orbit_closes() {
        let f = canonical_field::<f64>(CanonicalKind::Center);
        let tr = integrate(&f, cplx(1.0, 0.0), 2.0 * PI, 0.01, &opts()).unwrap();
        assert_eq!(tr.termination, Termination::TimeLimit);
        let (t, z) = tr.end();
        assert_eq!(t, 2.0 * PI);
        assert!((z - cplx(1.0, 0.0)).norm() < 1e-4);
    }

    #[test]
    fn node_grows_exponentially() {
        let f = canonical_field::<f64>(CanonicalKind::Node);
        let (z, _) = flow_to(&f, cplx(1.0, 0.0), 1.0, 0.01, &opts()).unwrap();
        assert!((z - cplx(std::f64::consts::E, 0.0)).norm() < 1e-6);
    }

    #[test]
    fn zero_time_is_single_sample() {
        let f = canonical_field::<f64>(CanonicalKind::Saddle);
        let tr = integrate(&f, cplx(0.3, 0.2), 0.0, 0.1, &opts()).unwrap();
        assert_eq!(tr.samples, vec![(0.0, cplx(0.3, 0.2))]);
    }

    #[test]
    fn times_monotone_and_steps_bounded() {
        let f = pendulum_field(1.0).unwrap();
        for t_end in [5.0f64, -5.0] {
            let tr = integrate(&f, cplx(0.5, 1.2), t_end, 0.2, &opts()).unwrap();
            for w in tr.samples.windows(2) {
                assert!((w[1].0 - w[0].0) * t_end.signum() > 0.0);
                assert!((w[1].1 - w[0].1).norm() <= 0.05 + 1e-15);
            }
        }
    }

    #[test]
    fn reverse_time_returns() {
        let fields: Vec<PlanarField<f64>> = vec![
            canonical_field(CanonicalKind::Saddle),
            canonical_field(CanonicalKind::Center),
            canonical_field(CanonicalKind::Dipole),
            pendulum_field(1.0).unwrap(),
        ];
        let z0 = cplx(0.3, 0.4);
        for f in &fields {
            let (z1, _) = flow_to(f, z0, 1.0, 0.001, &opts()).unwrap();
            let (back, _) = flow_to(f, z1, -1.0, 0.001, &opts()).unwrap();
            assert!((back - z0).norm() < 1e-6, "{f:?}: {back}");
        }
    }

    #[test]
    fn pole_terminates() {
        // ż = -1/(z - 1) reaches the pole at z = 1 in finite time from z = 0
        let f = |z: C| {
            if (z - 1.0).norm() < 1e-12 {
                Err(FieldError::NearPole { re: z.re, im: z.im })
            } else {
                Ok(-(z - 1.0).inv())
            }
        };
        let tr = integrate(&f, cplx(0.0, 0.0), 10.0, 0.01, &opts()).unwrap();
        assert_eq!(tr.termination, Termination::PoleProximity);
        assert!((tr.end().1 - 1.0).norm() < 0.1);
    }

    #[test]
    fn start_at_pole_is_error() {
        let f = |z: C| -> Result<C, FieldError> { Err(FieldError::NearPole { re: z.re, im: z.im }) };
        assert!(matches!(
            integrate(&f, cplx(0.0, 0.0), 1.0, 0.1, &opts()),
            Err(FlowError::NearPole { .. })
        ));
    }

    #[test]
    fn region_exit() {
        let f = canonical_field::<f64>(CanonicalKind::Node);
        let o = IntegratorOptions {
            region: Some(Rect::new(-2.0, 2.0, -2.0, 2.0).unwrap()),
            ..opts()
        };
        let tr = integrate(&f, cplx(1.0, 0.0), 10.0, 0.01, &o).unwrap();
        assert_eq!(tr.termination, Termination::RegionExit);
        assert!(tr.end().1.re > 2.0);
    }

    #[test]
    fn csv_format() {
        let f = canonical_field::<f64>(CanonicalKind::Node);
        let tr = integrate(&f, cplx(1.0, 0.0), 0.0, 0.1, &opts()).unwrap();
        assert_eq!(tr.to_csv(), "t,x,y\n0,1,0\n");
    }
}
