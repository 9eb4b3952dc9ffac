//! Damping-basis solution `rho(t) = sum_l c_l exp(l t) rho_l`.
//!
//! Right eigenoperators are computed per invariant block of `L`; the left
//! ones are the rows of the inverse of the right-vector matrix, so that
//! `Tr{left_l right_m} = delta_lm` also inside (near-)degenerate clusters.

use std::sync::Arc;

use faer::linalg::solvers::Solve;
use faer::{c64, Col, Mat};

use super::blocks::components;
use super::TimeSeries;
use crate::error::{Error, Result};
use crate::generators::Superoperator;
use crate::hilbert::{DensityMatrix, Operator};

/// Eigen-residual and biorthonormality tolerance.
pub const PAIRING_TOL: f64 = 1e-10;
/// Largest accepted eigenvalue condition number `|left| |right|`.
const MAX_CONDITION: f64 = 1e7;
/// Real parts closer than this sort as equal.
const SORT_TOL: f64 = 1e-9;

const ZERO: c64 = c64 { re: 0.0, im: 0.0 };

/// One eigenvalue with its right and left eigenoperators, stored on the
/// invariant block that supports them.
#[derive(Clone, Debug)]
pub struct DampingMode {
    pub eigenvalue: c64,
    dim: usize,
    support: Arc<Vec<usize>>,
    right: Vec<c64>,
    left: Vec<c64>,
}

impl DampingMode {
    /// `rho_l` with `L rho_l = l rho_l`.
    pub fn right(&self) -> Operator {
        let d = self.dim;
        let mut op = Operator::zeros(d);
        for (&k, &x) in self.support.iter().zip(&self.right) {
            op.set(k % d, k / d, x);
        }
        op
    }

    /// The operator `check rho_l` with `Tr{check rho_l L(X)} = l Tr{check rho_l X}`.
    pub fn left(&self) -> Operator {
        let d = self.dim;
        let mut op = Operator::zeros(d);
        for (&k, &x) in self.support.iter().zip(&self.left) {
            op.set(k / d, k % d, x);
        }
        op
    }

    /// Expansion coefficient `Tr{check rho_l rho}`.
    pub fn coefficient(&self, rho: &Operator) -> c64 {
        let d = self.dim;
        self.support
            .iter()
            .zip(&self.left)
            .map(|(&k, &x)| x * rho.get(k % d, k / d))
            .sum()
    }
}

#[derive(Clone, Debug)]
pub struct DampingBasis {
    dim: usize,
    modes: Vec<DampingMode>,
}

impl DampingBasis {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Modes sorted by real part descending, then imaginary part ascending.
    pub fn modes(&self) -> &[DampingMode] {
        &self.modes
    }

    pub fn eigenvalues(&self) -> Vec<c64> {
        self.modes.iter().map(|m| m.eigenvalue).collect()
    }

    pub fn coefficients(&self, rho: &Operator) -> Vec<c64> {
        self.modes.iter().map(|m| m.coefficient(rho)).collect()
    }

    /// `sum_l c_l exp(l t) rho_l`.
    pub fn reconstruct(&self, coefficients: &[c64], t: f64) -> Operator {
        assert_eq!(coefficients.len(), self.modes.len());
        let d = self.dim;
        let mut v = Col::<c64>::zeros(d * d);
        for (m, &c) in self.modes.iter().zip(coefficients) {
            if c == ZERO {
                continue;
            }
            let w = c * (m.eigenvalue * t).exp();
            for (&k, &x) in m.support.iter().zip(&m.right) {
                v[k] += w * x;
            }
        }
        Operator::unvectorize(&v, d)
    }

    /// `max |Tr{check rho_l rho_m} - delta_lm|`. Modes on different blocks
    /// are orthogonal by construction, so only same-block pairs are checked.
    pub fn biorthonormality_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for (a, ma) in self.modes.iter().enumerate() {
            for (b, mb) in self.modes.iter().enumerate() {
                if !Arc::ptr_eq(&ma.support, &mb.support) {
                    continue;
                }
                let p: c64 = ma.left.iter().zip(&mb.right).map(|(x, y)| x * y).sum();
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((p - c64::new(target, 0.0)).norm());
            }
        }
        worst
    }

    /// Largest of `|L rho_l - l rho_l|` and `|check rho_l L - l check rho_l|`
    /// (max norms) over all modes.
    pub fn eigen_residual(&self, l: &Superoperator) -> f64 {
        let mut worst = 0.0f64;
        for m in &self.modes {
            let right = l.apply(&m.right());
            let r = (&right - &m.right().scale(m.eigenvalue)).max_abs();
            let left_vec = m.left().transpose().vectorize();
            let lt = l.mat().transpose() * &left_vec;
            let left_res = (0..lt.nrows())
                .map(|k| (lt[k] - m.eigenvalue * left_vec[k]).norm())
                .fold(0.0, f64::max);
            worst = worst.max(r).max(left_res);
        }
        worst
    }

    /// `|Im l|` of the oscillating mode contributing most to `Tr{O rho(t)}`,
    /// weighted by `|c_l Tr{O rho_l}|`. `None` if no oscillating mode
    /// contributes more than `1e-12`.
    pub fn dominant_frequency(&self, rho0: &Operator, observable: &Operator) -> Option<f64> {
        let mut best: Option<(f64, f64)> = None;
        for m in &self.modes {
            if m.eigenvalue.im.abs() <= 1e-9 {
                continue;
            }
            let c = m.coefficient(rho0);
            if c == ZERO {
                continue;
            }
            let d = self.dim;
            let weight: c64 = m
                .support
                .iter()
                .zip(&m.right)
                .map(|(&k, &x)| observable.get(k / d, k % d) * x)
                .sum();
            let amplitude = (c * weight).norm();
            if amplitude > 1e-12 && best.is_none_or(|(a, _)| amplitude > a * (1.0 + 1e-9)) {
                best = Some((amplitude, m.eigenvalue.im.abs()));
            }
        }
        best.map(|(_, f)| f)
    }

    /// Spectral solution on `times`, validated as density matrices.
    pub fn evolve(&self, rho0: &DensityMatrix, times: &[f64]) -> Result<TimeSeries> {
        if rho0.dim() != self.dim {
            return Err(Error::InvalidParameter(format!(
                "initial state has dimension {}, generator acts on {}",
                rho0.dim(),
                self.dim
            )));
        }
        let coefficients = self.coefficients(rho0.operator());
        let err = (&self.reconstruct(&coefficients, 0.0) - rho0.operator()).max_abs();
        if err > PAIRING_TOL {
            return Err(Error::Numerical(format!(
                "damping-basis expansion reproduces the initial state only to {err:e}"
            )));
        }
        let states = times
            .iter()
            .map(|&t| self.reconstruct(&coefficients, t))
            .collect();
        TimeSeries::new(times.to_vec(), states)
    }
}

fn not_diagonalizable(eigenvalue: c64, reason: String) -> Error {
    Error::NotDiagonalizable { eigenvalue, reason }
}

fn block_modes(l: &Superoperator, support: Vec<usize>) -> Result<Vec<DampingMode>> {
    let d = l.dim();
    let m = support.len();
    let sub = Mat::from_fn(m, m, |r, c| l.mat()[(support[r], support[c])]);
    let right_eig = sub
        .eigen()
        .map_err(|e| Error::Numerical(format!("eigensolver: {e:?}")))?;

    let lambdas: Vec<c64> = (0..m).map(|k| right_eig.S()[k]).collect();
    let is_diag: Vec<bool> = support.iter().map(|&k| k % (d + 1) == 0).collect();
    let mut rights: Vec<Vec<c64>> = (0..m)
        .map(|k| (0..m).map(|i| right_eig.U()[(i, k)]).collect())
        .collect();
    for r in rights.iter_mut() {
        normalize_right(r, &is_diag);
    }

    // left vectors are the rows of the inverse of the right-vector matrix
    let v = Mat::from_fn(m, m, |i, k| rights[k][i]);
    let inv = v.full_piv_lu().solve(Mat::<c64>::identity(m, m));
    let lefts: Vec<Vec<c64>> = (0..m)
        .map(|k| (0..m).map(|i| inv[(k, i)]).collect())
        .collect();
    for (k, row) in lefts.iter().enumerate() {
        if row.iter().any(|x| !x.re.is_finite() || !x.im.is_finite()) {
            return Err(not_diagonalizable(
                lambdas[k],
                "singular eigenvector matrix".into(),
            ));
        }
    }

    for k in 0..m {
        let nl = lefts[k].iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        let nr = rights[k].iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if nl * nr > MAX_CONDITION {
            return Err(not_diagonalizable(
                lambdas[k],
                format!("eigenvalue condition number {:e}", nl * nr),
            ));
        }
    }
    for a in 0..m {
        for (b, right) in rights.iter().enumerate() {
            let p: c64 = lefts[a].iter().zip(right).map(|(x, y)| x * y).sum();
            let target = if a == b { 1.0 } else { 0.0 };
            let dev = (p - c64::new(target, 0.0)).norm();
            if dev > PAIRING_TOL {
                return Err(not_diagonalizable(
                    lambdas[a],
                    format!("biorthonormality residual {dev:e}"),
                ));
            }
        }
    }
    let scale = sub.norm_max().max(1.0);
    for k in 0..m {
        let lr = &sub * Col::from_fn(m, |i| rights[k][i]);
        let nr = rights[k].iter().fold(0.0f64, |a, x| a.max(x.norm()));
        let res = (0..m)
            .map(|i| (lr[i] - lambdas[k] * rights[k][i]).norm())
            .fold(0.0, f64::max);
        if res > PAIRING_TOL * scale * nr.max(1.0) {
            return Err(not_diagonalizable(
                lambdas[k],
                format!("right residual {res:e}"),
            ));
        }
    }

    let support = Arc::new(support);
    Ok(lambdas
        .into_iter()
        .zip(rights.into_iter().zip(lefts))
        .map(|(eigenvalue, (right, left))| DampingMode {
            eigenvalue,
            dim: d,
            support: Arc::clone(&support),
            right,
            left,
        })
        .collect())
}

// Unit trace when the trace is not negligible, otherwise unit norm with the
// largest entry real and positive.
fn normalize_right(v: &mut [c64], is_diag: &[bool]) {
    let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    let trace: c64 = v
        .iter()
        .zip(is_diag)
        .filter(|(_, &d)| d)
        .map(|(x, _)| *x)
        .sum();
    let factor = if trace.norm() > 1e-6 * norm {
        trace.inv()
    } else {
        let big = v
            .iter()
            .copied()
            .max_by(|a, b| a.norm().total_cmp(&b.norm()))
            .unwrap_or(ZERO);
        if big == ZERO {
            return;
        }
        (big / big.norm()).conj() / norm
    };
    for x in v.iter_mut() {
        *x *= factor;
    }
}

fn sort_modes<T>(items: &mut [T], key: impl Fn(&T) -> c64) {
    items.sort_by(|a, b| key(b).re.total_cmp(&key(a).re));
    let mut start = 0;
    while start < items.len() {
        let mut end = start + 1;
        while end < items.len() && key(&items[end - 1]).re - key(&items[end]).re <= SORT_TOL {
            end += 1;
        }
        items[start..end].sort_by(|a, b| key(a).im.total_cmp(&key(b).im));
        start = end;
    }
}

/// Full set of `dim^2` damping modes of `l`.
pub fn damping_basis(l: &Superoperator) -> Result<DampingBasis> {
    let mut modes = Vec::with_capacity(l.size());
    for support in components(l.mat()) {
        modes.extend(block_modes(l, support)?);
    }
    sort_modes(&mut modes, |m| m.eigenvalue);
    Ok(DampingBasis {
        dim: l.dim(),
        modes,
    })
}

/// Eigenvalues of `l` in damping-basis order, without eigenvectors.
pub fn spectrum(l: &Superoperator) -> Result<Vec<c64>> {
    let mut values = Vec::with_capacity(l.size());
    for support in components(l.mat()) {
        let m = support.len();
        let sub = Mat::from_fn(m, m, |r, c| l.mat()[(support[r], support[c])]);
        let ev = sub
            .eigenvalues()
            .map_err(|e| Error::Numerical(format!("eigensolver: {e:?}")))?;
        values.extend(ev);
    }
    sort_modes(&mut values, |z| *z);
    Ok(values)
}

pub fn evolve_spectral(
    l: &Superoperator,
    rho0: &DensityMatrix,
    times: &[f64],
) -> Result<TimeSeries> {
    damping_basis(l)?.evolve(rho0, times)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{single_excitation_generator, LindbladBuilder};
    use crate::jcmodel::JCParams;

    fn close(a: c64, b: c64, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    fn single_excitation_eigenvalues(w0: f64, om: f64, ga: f64, gb: f64) -> Vec<c64> {
        let i = c64::new(0.0, 1.0);
        let r = |x: f64| c64::new(x, 0.0);
        vec![
            r(0.0),
            r(-ga / 2.0),
            r(-gb / 2.0),
            r(-(ga + gb) / 4.0) + i * 2.0 * om,
            r(-(ga + gb) / 4.0) - i * 2.0 * om,
            r(-ga / 4.0) + i * (w0 - om),
            r(-ga / 4.0) - i * (w0 - om),
            r(-gb / 4.0) + i * (w0 + om),
            r(-gb / 4.0) - i * (w0 + om),
        ]
    }

    #[test]
    fn single_excitation_spectrum() {
        let p = JCParams::new(1.0, 0.2).unwrap();
        for (ga, gb) in [(0.03, 0.05), (0.04, 0.04)] {
            let l = single_excitation_generator(&p, ga, gb).unwrap();
            let basis = damping_basis(&l).unwrap();
            let got = basis.eigenvalues();
            let mut expected = single_excitation_eigenvalues(1.0, 0.2, ga, gb);
            sort_modes(&mut expected, |z| *z);
            for (g, e) in got.iter().zip(&expected) {
                assert!(close(*g, *e, 1e-12), "{g} vs {e}");
            }
            assert!(basis.biorthonormality_residual() < 1e-12);
            assert!(basis.eigen_residual(&l) < 1e-12);
            let only = spectrum(&l).unwrap();
            for (a, b) in only.iter().zip(&got) {
                assert!(close(*a, *b, 1e-12));
            }
        }
    }

    #[test]
    fn stationary_mode_pair() {
        let p = JCParams::new(1.0, 0.2).unwrap();
        let l = single_excitation_generator(&p, 0.03, 0.05).unwrap();
        let basis = damping_basis(&l).unwrap();
        let zero = &basis.modes()[0];
        assert!(zero.eigenvalue.norm() < 1e-14);
        assert!((&zero.left() - &Operator::identity(3)).max_abs() < 1e-12);
        let mut ground = Operator::zeros(3);
        ground.set(0, 0, c64::new(1.0, 0.0));
        assert!((&zero.right() - &ground).max_abs() < 1e-12);
    }

    #[test]
    fn sorted_order() {
        let p = JCParams::new(1.0, 0.2).unwrap();
        let l = single_excitation_generator(&p, 0.03, 0.05).unwrap();
        let ev = damping_basis(&l).unwrap().eigenvalues();
        for w in ev.windows(2) {
            assert!(w[0].re >= w[1].re - SORT_TOL);
            if (w[0].re - w[1].re).abs() <= SORT_TOL {
                assert!(w[0].im <= w[1].im);
            }
        }
    }

    #[test]
    fn bell_initial_state_evolution() {
        let p = JCParams::new(1.0, 0.2).unwrap();
        let gb = 0.05;
        let l = single_excitation_generator(&p, 0.03, gb).unwrap();
        let mut plus = Operator::zeros(3);
        plus.set(2, 2, c64::new(1.0, 0.0));
        let rho0 = DensityMatrix::new(plus, Default::default()).unwrap();
        let times = [0.0, 1.0, 7.5, 40.0];
        let series = evolve_spectral(&l, &rho0, &times).unwrap();
        for (t, rho) in series.times().iter().zip(series.states()) {
            let decay = (-gb * t / 2.0).exp();
            let mut expected = Operator::zeros(3);
            expected.set(0, 0, c64::new(1.0 - decay, 0.0));
            expected.set(2, 2, c64::new(decay, 0.0));
            assert!((rho.operator() - &expected).max_abs() < 1e-12);
        }
    }

    #[test]
    fn defective_generator_is_rejected() {
        // amplitude damping with a coherent drive tuned to the exceptional
        // point: the 2x2 population/coherence block is a Jordan block
        let gamma = 1.0;
        let mut h = Operator::zeros(2);
        let drive = gamma / 8.0;
        h.set(0, 1, c64::new(drive, 0.0));
        h.set(1, 0, c64::new(drive, 0.0));
        let mut lower = Operator::zeros(2);
        lower.set(0, 1, c64::new(1.0, 0.0));
        let l = LindbladBuilder::new(2)
            .hamiltonian(&h)
            .jump(gamma, &lower)
            .unwrap()
            .build();
        match damping_basis(&l) {
            Err(Error::NotDiagonalizable { .. }) => {}
            other => panic!("expected a diagonalizability error, got {other:?}"),
        }
    }

    #[test]
    fn explicit_jordan_block_is_rejected() {
        let mut m = Mat::<c64>::zeros(4, 4);
        m[(0, 0)] = c64::new(-1.0, 0.0);
        m[(1, 1)] = c64::new(-1.0, 0.0);
        m[(0, 1)] = c64::new(1.0, 0.0);
        m[(2, 2)] = c64::new(-2.0, 0.0);
        let l = Superoperator::from_mat(2, m);
        let err = damping_basis(&l).unwrap_err();
        match err {
            Error::NotDiagonalizable { eigenvalue, .. } => {
                assert!(close(eigenvalue, c64::new(-1.0, 0.0), 1e-6))
            }
            other => panic!("{other:?}"),
        }
    }
}
