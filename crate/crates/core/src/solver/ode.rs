//! Fixed-step classical Runge-Kutta integration of `d rho / dt = L rho`.

use faer::{c64, Col, Mat};

use super::blocks::components;
use super::{check_grid, TimeSeries};
use crate::error::{Error, Result};
use crate::generators::Superoperator;
use crate::hilbert::{DensityMatrix, Operator};

/// Steps must satisfy `dt <= ODE_STEP_FACTOR / scale`.
pub const ODE_STEP_FACTOR: f64 = 0.01;

const TRACE_DRIFT_TOL: f64 = 1e-10;

/// Largest admissible step for `l`, using the largest diagonal modulus of
/// `l` as the frequency scale.
pub fn step_bound(l: &Superoperator) -> f64 {
    let scale = l.diagonal_scale();
    if scale == 0.0 {
        f64::INFINITY
    } else {
        ODE_STEP_FACTOR / scale
    }
}

/// Integrates from 0 to `t_max` with `ceil(t_max / dt)` equal steps, keeping
/// every step.
pub fn evolve_ode(
    l: &Superoperator,
    rho0: &DensityMatrix,
    t_max: f64,
    dt: f64,
) -> Result<TimeSeries> {
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "t_max = {t_max} must be > 0"
        )));
    }
    if !(dt > 0.0) {
        return Err(Error::InvalidParameter(format!("dt = {dt} must be > 0")));
    }
    let n = ((t_max / dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
    let times: Vec<f64> = (0..=n).map(|k| t_max * k as f64 / n as f64).collect();
    evolve_ode_on_grid(l, rho0, &times, dt)
}

/// Integrates onto an arbitrary grid, splitting every interval into equal
/// steps no longer than `dt_max`.
pub fn evolve_ode_on_grid(
    l: &Superoperator,
    rho0: &DensityMatrix,
    times: &[f64],
    dt_max: f64,
) -> Result<TimeSeries> {
    check_grid(times)?;
    let bound = step_bound(l);
    if !(dt_max > 0.0) || dt_max > bound {
        return Err(Error::StepTooLarge { dt: dt_max, bound });
    }
    let d = l.dim();
    if rho0.dim() != d {
        return Err(Error::InvalidParameter(format!(
            "initial state has dimension {}, generator acts on {d}",
            rho0.dim()
        )));
    }

    // restrict to the invariant blocks the initial state touches
    let v0 = rho0.operator().vectorize();
    let mut active: Vec<usize> = components(l.mat())
        .into_iter()
        .filter(|block| block.iter().any(|&k| v0[k] != c64::new(0.0, 0.0)))
        .flatten()
        .collect();
    active.sort_unstable();
    let m = active.len();
    let sub = Mat::from_fn(m, m, |r, c| l.mat()[(active[r], active[c])]);
    let rhs = |x: &Col<c64>| -> Col<c64> { &sub * x };

    let mut x = Col::from_fn(m, |k| v0[active[k]]);
    let mut t = 0.0;
    let mut states = Vec::with_capacity(times.len());
    for &target in times {
        let span = target - t;
        if span > 0.0 {
            let steps = (span / dt_max).ceil().max(1.0) as usize;
            let h = span / steps as f64;
            let half = c64::new(h / 2.0, 0.0);
            let full = c64::new(h, 0.0);
            let sixth = c64::new(h / 6.0, 0.0);
            let two = c64::new(2.0, 0.0);
            for _ in 0..steps {
                let k1 = rhs(&x);
                let k2 = rhs(&(&x + &k1 * faer::Scale(half)));
                let k3 = rhs(&(&x + &k2 * faer::Scale(half)));
                let k4 = rhs(&(&x + &k3 * faer::Scale(full)));
                let incr = &k1 + &k2 * faer::Scale(two) + &k3 * faer::Scale(two) + &k4;
                x = &x + incr * faer::Scale(sixth);
            }
            t = target;
        }
        let mut v = Col::<c64>::zeros(d * d);
        for (k, &idx) in active.iter().enumerate() {
            v[idx] = x[k];
        }
        states.push(Operator::unvectorize(&v, d));
    }

    let initial = rho0.operator().trace();
    for (s, time) in states.iter().zip(times) {
        let drift = (s.trace() - initial).norm();
        if drift > TRACE_DRIFT_TOL {
            return Err(Error::Numerical(format!(
                "trace drift {drift:e} at t = {time}"
            )));
        }
    }
    TimeSeries::new(times.to_vec(), states)
}
