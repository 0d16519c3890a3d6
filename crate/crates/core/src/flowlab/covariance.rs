use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::{flow_to, FlowError, IntegratorOptions, Termination};
use crate::autovec::VectorField;
use crate::moebius::MoebiusMap;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CovarianceReport<T> {
    /// Max over compared times of `|m(φ_t(z0)) - φ_t(m(z0))|`.
    pub max_deviation: T,
    /// Last time at which both orbits were available.
    pub compared_until: T,
    /// True when an orbit hit a pole before `t_end`.
    pub truncated: bool,
}

/// Checks that `m` carries the orbit of `z0` onto the orbit of `m(z0)`,
/// sampling both at `samples` equally spaced times in `[0, t_end]`.
pub fn covariance_check<T: Scalar, F: VectorField<T> + ?Sized>(
    field: &F,
    m: &MoebiusMap<T>,
    z0: Complex<T>,
    t_end: T,
    samples: usize,
    h0: T,
    opts: &IntegratorOptions,
) -> Result<CovarianceReport<T>, FlowError> {
    let w0 = m
        .apply(z0)
        .map_err(|_| FlowError::InvalidArgument("start point is a pole of the map".into()))?;
    field.eval(z0).map_err(|e| FlowError::near_pole(z0, e))?;
    field.eval(w0).map_err(|e| FlowError::near_pole(w0, e))?;

    let samples = samples.max(1);
    let dt = t_end / T::from_usize(samples).unwrap();
    let (mut a, mut b) = (z0, w0);
    let mut report = CovarianceReport {
        max_deviation: T::zero(),
        compared_until: T::zero(),
        truncated: false,
    };
    for k in 1..=samples {
        let (na, ra) = flow_to(field, a, dt, h0, opts)?;
        let (nb, rb) = flow_to(field, b, dt, h0, opts)?;
        if ra != Termination::TimeLimit || rb != Termination::TimeLimit {
            report.truncated = true;
            break;
        }
        let Ok(image) = m.apply(na) else {
            report.truncated = true;
            break;
        };
        a = na;
        b = nb;
        report.max_deviation = report.max_deviation.max((image - b).norm());
        report.compared_until = dt * T::from_usize(k).unwrap();
    }
    Ok(report)
}
