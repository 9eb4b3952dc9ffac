//! Stationary states, thermal reference states and the trace distance.

use faer::{c64, Mat, Side};

use super::blocks::components;
use crate::error::{Error, Result};
use crate::generators::Superoperator;
use crate::hilbert::{DensityMatrix, Operator, StateSpace, Tolerances};

/// Relative singular-value threshold for the kernel of `L`.
pub const KERNEL_TOL: f64 = 1e-10;

/// The unique unit-trace Hermitian element of `ker L`.
pub fn steady_state(l: &Superoperator) -> Result<DensityMatrix> {
    let d = l.dim();
    let mut kernel: Vec<(Vec<usize>, Vec<c64>)> = Vec::new();
    for support in components(l.mat()) {
        let m = support.len();
        let sub = Mat::from_fn(m, m, |r, c| l.mat()[(support[r], support[c])]);
        let svd = sub
            .svd()
            .map_err(|e| Error::Numerical(format!("singular value decomposition: {e:?}")))?;
        let sigma: Vec<f64> = (0..m).map(|k| svd.S()[k].re).collect();
        let largest = sigma.iter().copied().fold(0.0, f64::max);
        let tol = KERNEL_TOL * largest.max(1.0);
        for (k, &s) in sigma.iter().enumerate() {
            if s < tol {
                let v: Vec<c64> = (0..m).map(|i| svd.V()[(i, k)]).collect();
                kernel.push((support.clone(), v));
            }
        }
    }
    if kernel.len() != 1 {
        return Err(Error::KernelMultiplicity(kernel.len()));
    }
    let (support, v) = kernel.pop().expect("one kernel vector");
    let mut op = Operator::zeros(d);
    for (&k, &x) in support.iter().zip(&v) {
        op.set(k % d, k / d, x);
    }
    let trace = op.trace();
    if trace.norm() < 1e-12 {
        return Err(Error::Numerical(
            "stationary kernel element is traceless".into(),
        ));
    }
    let rho = op.scale(trace.inv()).hermitian_part();
    DensityMatrix::new(rho, Tolerances::default())
}

/// `exp(-H / T) / Z`; at `T = 0` the uniform mixture over the ground space.
pub fn gibbs_state(h: &Operator, temperature: f64) -> Result<DensityMatrix> {
    if !(temperature >= 0.0 && temperature.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "temperature = {temperature} must be >= 0"
        )));
    }
    let eig = h
        .hermitian_part()
        .mat()
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Numerical(format!("hermitian eigensolver: {e:?}")))?;
    let d = h.dim();
    let energies: Vec<f64> = (0..d).map(|k| eig.S()[k].re).collect();
    let e_min = energies.iter().copied().fold(f64::INFINITY, f64::min);
    let scale = energies.iter().fold(1.0f64, |a, e| a.max(e.abs()));
    let weights: Vec<f64> = energies
        .iter()
        .map(|&e| {
            if temperature == 0.0 {
                if e - e_min <= 1e-12 * scale {
                    1.0
                } else {
                    0.0
                }
            } else {
                (-(e - e_min) / temperature).exp()
            }
        })
        .collect();
    let z: f64 = weights.iter().sum();
    let u = eig.U();
    let rho = Operator::from_fn(d, |i, j| {
        (0..d)
            .map(|k| u[(i, k)] * u[(j, k)].conj() * (weights[k] / z))
            .sum()
    });
    DensityMatrix::new(rho.hermitian_part(), Tolerances::default())
}

/// `(1/2) sum |eig(a - b)|`.
pub fn trace_distance(a: &Operator, b: &Operator) -> Result<f64> {
    let diff = a - b;
    Ok(0.5
        * diff
            .hermitian_eigenvalues()?
            .iter()
            .map(|x| x.abs())
            .sum::<f64>())
}

/// Population of the highest photon level `n_max`.
pub fn gibbs_tail_mass(rho: &DensityMatrix, space: &StateSpace) -> f64 {
    let n = space.n_max();
    (0..2).map(|s| rho.get(2 * n + s, 2 * n + s).re).sum()
}
