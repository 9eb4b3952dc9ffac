//! Time evolution and stationary states of a Lindblad generator.

mod blocks;
mod ode;
mod spectral;
mod steady;

pub use blocks::components;
pub use ode::{evolve_ode, evolve_ode_on_grid, step_bound, ODE_STEP_FACTOR};
pub use spectral::{
    damping_basis, evolve_spectral, spectrum, DampingBasis, DampingMode, PAIRING_TOL,
};
pub use steady::{gibbs_state, gibbs_tail_mass, steady_state, trace_distance};

use crate::error::{Error, Result};
use crate::hilbert::{DensityMatrix, Operator, Tolerances};

/// Tolerance applied to every state stored in a [`TimeSeries`].
pub const SERIES_TOL: f64 = 1e-8;

/// Density matrices sampled on an increasing time grid.
#[derive(Clone, Debug)]
pub struct TimeSeries {
    times: Vec<f64>,
    states: Vec<DensityMatrix>,
}

impl TimeSeries {
    pub fn new(times: Vec<f64>, states: Vec<Operator>) -> Result<Self> {
        check_grid(&times)?;
        if times.len() != states.len() {
            return Err(Error::InvalidParameter(format!(
                "{} times for {} states",
                times.len(),
                states.len()
            )));
        }
        let states = states
            .into_iter()
            .zip(&times)
            .map(|(op, t)| {
                DensityMatrix::new(op, Tolerances::uniform(SERIES_TOL)).map_err(|e| match e {
                    Error::NotDensityMatrix(msg) => {
                        Error::Numerical(format!("state at t = {t}: {msg}"))
                    }
                    other => other,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { times, states })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Largest entrywise modulus of `rho_self(t) - rho_other(t)` over a shared grid.
    pub fn max_entrywise_diff(&self, other: &TimeSeries) -> Result<f64> {
        if self.times != other.times {
            return Err(Error::InvalidParameter("time grids differ".into()));
        }
        Ok(self
            .states
            .iter()
            .zip(&other.states)
            .map(|(a, b)| (a.operator() - b.operator()).max_abs())
            .fold(0.0, f64::max))
    }
}

/// Times must be finite, non-negative and strictly increasing.
pub fn check_grid(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::InvalidParameter("empty time grid".into()));
    }
    if times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(Error::InvalidParameter(
            "times must be finite and >= 0".into(),
        ));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter(
            "times must be strictly increasing".into(),
        ));
    }
    Ok(())
}

/// `n` evenly spaced points from 0 to `t_max` inclusive.
pub fn linspace(t_max: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n).map(|k| t_max * k as f64 / (n - 1) as f64).collect(),
    }
}
