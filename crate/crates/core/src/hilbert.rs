//! Truncated atom-cavity Hilbert space.
//!
//! The product basis `|n, s>` (photon number `n <= n_max`, atomic level
//! `s in {g, e}`) is flattened as `i = 2n + s` with `s(g) = 0`, `s(e) = 1`.
//! Every operator and every file output in the crate uses this ordering.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use faer::{c64, Col, Mat, MatRef, Side};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    Ground,
    Excited,
}

impl Atom {
    pub fn index(self) -> usize {
        match self {
            Atom::Ground => 0,
            Atom::Excited => 1,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Atom::Ground => 'g',
            Atom::Excited => 'e',
        }
    }

    pub fn from_symbol(c: &str) -> Option<Self> {
        match c {
            "g" => Some(Atom::Ground),
            "e" => Some(Atom::Excited),
            _ => None,
        }
    }
}

/// Fock space truncated at `n_max` photons, tensored with a two-level atom.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct StateSpace {
    n_max: usize,
}

pub fn build_space(n_max: usize) -> StateSpace {
    StateSpace { n_max }
}

impl StateSpace {
    pub fn new(n_max: usize) -> Self {
        build_space(n_max)
    }

    /// Recovers the space from an operator dimension.
    pub fn from_dim(dim: usize) -> Result<Self> {
        if dim < 2 || !dim.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "dimension {dim} is not 2(n_max + 1)"
            )));
        }
        Ok(Self::new(dim / 2 - 1))
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn dim(&self) -> usize {
        2 * (self.n_max + 1)
    }

    pub fn index(&self, n: usize, atom: Atom) -> Result<usize> {
        if n > self.n_max {
            return Err(Error::LabelOutOfRange(format!(
                "|{n},{}> with n_max = {}",
                atom.symbol(),
                self.n_max
            )));
        }
        Ok(2 * n + atom.index())
    }

    pub fn label(&self, i: usize) -> Result<(usize, Atom)> {
        if i >= self.dim() {
            return Err(Error::LabelOutOfRange(format!(
                "flat index {i} in dimension {}",
                self.dim()
            )));
        }
        let atom = if i.is_multiple_of(2) {
            Atom::Ground
        } else {
            Atom::Excited
        };
        Ok((i / 2, atom))
    }

    /// All basis labels in flat-index order.
    pub fn basis(&self) -> impl Iterator<Item = (usize, Atom)> {
        (0..=self.n_max).flat_map(|n| [(n, Atom::Ground), (n, Atom::Excited)])
    }

    pub fn ket(&self, n: usize, atom: Atom) -> Result<Col<c64>> {
        let i = self.index(n, atom)?;
        Ok(Col::from_fn(self.dim(), |k| {
            if k == i {
                c64::new(1.0, 0.0)
            } else {
                c64::new(0.0, 0.0)
            }
        }))
    }
}

/// Dense complex square matrix acting on a finite-dimensional space.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    mat: Mat<c64>,
}

impl Operator {
    pub fn from_mat(mat: Mat<c64>) -> Self {
        assert_eq!(mat.nrows(), mat.ncols(), "operator must be square");
        Self { mat }
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_mat(Mat::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_mat(Mat::identity(dim, dim))
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> c64) -> Self {
        Self::from_mat(Mat::from_fn(dim, dim, f))
    }

    pub fn diagonal(values: &[f64]) -> Self {
        Self::from_fn(values.len(), |i, j| {
            if i == j {
                c64::new(values[i], 0.0)
            } else {
                c64::new(0.0, 0.0)
            }
        })
    }

    /// `|u><v|`
    pub fn outer(u: &Col<c64>, v: &Col<c64>) -> Self {
        assert_eq!(u.nrows(), v.nrows());
        Self::from_fn(u.nrows(), |i, j| u[i] * v[j].conj())
    }

    pub fn projector(v: &Col<c64>) -> Self {
        Self::outer(v, v)
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn mat(&self) -> MatRef<'_, c64> {
        self.mat.as_ref()
    }

    pub fn into_mat(self) -> Mat<c64> {
        self.mat
    }

    pub fn get(&self, i: usize, j: usize) -> c64 {
        self.mat[(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, value: c64) {
        self.mat[(i, j)] = value;
    }

    pub fn adjoint(&self) -> Self {
        Self::from_mat(self.mat.adjoint().to_owned())
    }

    pub fn transpose(&self) -> Self {
        Self::from_mat(self.mat.transpose().to_owned())
    }

    pub fn trace(&self) -> c64 {
        (0..self.dim()).map(|i| self.mat[(i, i)]).sum()
    }

    pub fn scale(&self, s: c64) -> Self {
        Self::from_fn(self.dim(), |i, j| s * self.mat[(i, j)])
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(c64::new(s, 0.0))
    }

    pub fn commutator(&self, other: &Operator) -> Self {
        &(self * other) - &(other * self)
    }

    pub fn anticommutator(&self, other: &Operator) -> Self {
        &(self * other) + &(other * self)
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.mat.norm_max()
    }

    pub fn apply(&self, v: &Col<c64>) -> Col<c64> {
        &self.mat * v
    }

    /// `<u|A|v>`
    pub fn matrix_element(&self, u: &Col<c64>, v: &Col<c64>) -> c64 {
        let av = self.apply(v);
        (0..u.nrows()).map(|i| u[i].conj() * av[i]).sum()
    }

    /// `max |A_ij - conj(A_ji)|`
    pub fn hermiticity_defect(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in i..d {
                worst = worst.max((self.mat[(i, j)] - self.mat[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.dim(), |i, j| {
            (self.mat[(i, j)] + self.mat[(j, i)].conj()) * 0.5
        })
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn hermitian_eigenvalues(&self) -> Result<Vec<f64>> {
        self.hermitian_part()
            .mat
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|e| Error::Numerical(format!("hermitian eigensolver: {e:?}")))
    }

    /// Column-major vectorization: entry `(i, j)` lands at `i + j * dim`.
    pub fn vectorize(&self) -> Col<c64> {
        let d = self.dim();
        Col::from_fn(d * d, |k| self.mat[(k % d, k / d)])
    }

    pub fn unvectorize(v: &Col<c64>, dim: usize) -> Self {
        assert_eq!(v.nrows(), dim * dim);
        Self::from_fn(dim, |i, j| v[i + j * dim])
    }
}

impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        Operator::from_mat(&self.mat + &rhs.mat)
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        Operator::from_mat(&self.mat - &rhs.mat)
    }
}

impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        Operator::from_mat(&self.mat * &rhs.mat)
    }
}

impl Neg for &Operator {
    type Output = Operator;
    fn neg(self) -> Operator {
        self.scale_real(-1.0)
    }
}

/// Acceptance thresholds for the three density-matrix invariants.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub herm: f64,
    pub trace: f64,
    pub pos: f64,
}

impl Tolerances {
    pub fn uniform(tol: f64) -> Self {
        Self {
            herm: tol,
            trace: tol,
            pos: tol,
        }
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            herm: 1e-12,
            trace: 1e-10,
            pos: 1e-10,
        }
    }
}

/// A Hermitian, unit-trace, positive semidefinite operator, checked on
/// construction against its tolerances.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    op: Operator,
    tol: Tolerances,
}

impl DensityMatrix {
    pub fn new(op: Operator, tol: Tolerances) -> Result<Self> {
        let herm = op.hermiticity_defect();
        if !(herm <= tol.herm) {
            return Err(Error::NotDensityMatrix(format!(
                "hermiticity defect {herm:e} > {:e}",
                tol.herm
            )));
        }
        let trace = (op.trace() - c64::new(1.0, 0.0)).norm();
        if !(trace <= tol.trace) {
            return Err(Error::NotDensityMatrix(format!(
                "trace defect {trace:e} > {:e}",
                tol.trace
            )));
        }
        let min = op.hermitian_eigenvalues()?.first().copied().unwrap_or(0.0);
        if !(min >= -tol.pos) {
            return Err(Error::NotDensityMatrix(format!(
                "minimum eigenvalue {min:e} < -{:e}",
                tol.pos
            )));
        }
        Ok(Self { op, tol })
    }

    /// `|psi><psi|` for a normalized state vector.
    pub fn pure(psi: &Col<c64>) -> Result<Self> {
        Self::new(Operator::projector(psi), Tolerances::default())
    }

    /// Identity divided by the dimension.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            op: Operator::identity(dim).scale_real(1.0 / dim as f64),
            tol: Tolerances::default(),
        }
    }

    pub fn operator(&self) -> &Operator {
        &self.op
    }

    pub fn into_operator(self) -> Operator {
        self.op
    }

    pub fn tolerances(&self) -> Tolerances {
        self.tol
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn get(&self, i: usize, j: usize) -> c64 {
        self.op.get(i, j)
    }
}

impl fmt::Display for DensityMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                let z = self.get(i, j);
                write!(f, "{:>10.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Photon annihilation and creation operators `(a, a_dag)`, hard cutoff at
/// `n_max`.
pub fn ladder_operators(space: &StateSpace) -> (Operator, Operator) {
    let mut a = Operator::zeros(space.dim());
    for n in 1..=space.n_max() {
        for atom in [Atom::Ground, Atom::Excited] {
            let from = 2 * n + atom.index();
            let to = 2 * (n - 1) + atom.index();
            a.set(to, from, c64::new((n as f64).sqrt(), 0.0));
        }
    }
    let a_dag = a.adjoint();
    (a, a_dag)
}

#[derive(Clone, Debug)]
pub struct AtomicOperators {
    pub sigma_minus: Operator,
    pub sigma_plus: Operator,
    pub sigma_z: Operator,
}

pub fn atomic_operators(space: &StateSpace) -> AtomicOperators {
    let d = space.dim();
    let mut sigma_minus = Operator::zeros(d);
    let mut sigma_z = Operator::zeros(d);
    for n in 0..=space.n_max() {
        sigma_minus.set(2 * n, 2 * n + 1, c64::new(1.0, 0.0));
        sigma_z.set(2 * n, 2 * n, c64::new(-1.0, 0.0));
        sigma_z.set(2 * n + 1, 2 * n + 1, c64::new(1.0, 0.0));
    }
    let sigma_plus = sigma_minus.adjoint();
    AtomicOperators {
        sigma_minus,
        sigma_plus,
        sigma_z,
    }
}

/// `a^dag a + (sigma_z + 1) / 2`, diagonal with eigenvalue `n + s`.
pub fn excitation_number(space: &StateSpace) -> Operator {
    let values: Vec<f64> = space
        .basis()
        .map(|(n, atom)| (n + atom.index()) as f64)
        .collect();
    Operator::diagonal(&values)
}
