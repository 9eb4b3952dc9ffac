//! Matrix representation of linear maps on operators.
//!
//! Operators are vectorized column-major, so `X_ij` sits at `i + j * dim`
//! and `vec(A X B) = (B^T kron A) vec(X)`.

use faer::{c64, Col, Mat, MatRef};

use crate::error::{Error, Result};
use crate::hilbert::Operator;

#[inline]
pub fn vec_index(i: usize, j: usize, dim: usize) -> usize {
    i + j * dim
}

/// A `dim^2 x dim^2` matrix acting on vectorized `dim x dim` operators.
#[derive(Clone, Debug, PartialEq)]
pub struct Superoperator {
    dim: usize,
    mat: Mat<c64>,
}

impl Superoperator {
    pub fn from_mat(dim: usize, mat: Mat<c64>) -> Self {
        assert_eq!(mat.nrows(), dim * dim);
        assert_eq!(mat.ncols(), dim * dim);
        Self { dim, mat }
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_mat(dim, Mat::zeros(dim * dim, dim * dim))
    }

    /// Operator dimension (the matrix is `dim^2` square).
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn size(&self) -> usize {
        self.dim * self.dim
    }

    pub fn mat(&self) -> MatRef<'_, c64> {
        self.mat.as_ref()
    }

    pub fn into_mat(self) -> Mat<c64> {
        self.mat
    }

    /// Matrix element coupling input entry `(k, l)` to output entry `(i, j)`.
    pub fn element(&self, out: (usize, usize), input: (usize, usize)) -> c64 {
        self.mat[(
            vec_index(out.0, out.1, self.dim),
            vec_index(input.0, input.1, self.dim),
        )]
    }

    pub fn apply(&self, op: &Operator) -> Operator {
        assert_eq!(op.dim(), self.dim);
        let v: Col<c64> = &self.mat * &op.vectorize();
        Operator::unvectorize(&v, self.dim)
    }

    /// `|| 1^T L ||_max`: how far the identity is from being a left null vector.
    pub fn trace_defect(&self) -> f64 {
        let d = self.dim;
        (0..self.size())
            .map(|c| {
                (0..d)
                    .map(|i| self.mat[(vec_index(i, i, d), c)])
                    .sum::<c64>()
                    .norm()
            })
            .fold(0.0, f64::max)
    }

    /// `max |L(X^dag) - L(X)^dag|` over the matrix-unit basis.
    pub fn hermiticity_defect(&self) -> f64 {
        let d = self.dim;
        let mut worst = 0.0f64;
        for k in 0..d {
            for l in 0..d {
                let c = vec_index(k, l, d);
                let c_t = vec_index(l, k, d);
                for i in 0..d {
                    for j in 0..d {
                        let lhs = self.mat[(vec_index(i, j, d), c_t)];
                        let rhs = self.mat[(vec_index(j, i, d), c)].conj();
                        worst = worst.max((lhs - rhs).norm());
                    }
                }
            }
        }
        worst
    }

    pub fn max_abs_diff(&self, other: &Superoperator) -> f64 {
        assert_eq!(self.dim, other.dim);
        (&self.mat - &other.mat).norm_max()
    }

    /// Largest diagonal modulus, a cheap proxy for the spectral radius.
    pub fn diagonal_scale(&self) -> f64 {
        (0..self.size())
            .map(|k| self.mat[(k, k)].norm())
            .fold(0.0, f64::max)
    }

    /// Representation in the orthonormal basis given by the columns of
    /// `basis`: with `X = V Y V^dag`, returns the map `Y -> V^dag L(V Y V^dag) V`.
    pub fn in_basis(&self, basis: MatRef<'_, c64>) -> Result<Superoperator> {
        check_unitary(basis)?;
        Ok(self.conjugate_by(basis))
    }

    /// Inverse of [`Superoperator::in_basis`].
    pub fn from_basis(&self, basis: MatRef<'_, c64>) -> Result<Superoperator> {
        check_unitary(basis)?;
        let inverse = basis.adjoint().to_owned();
        Ok(self.conjugate_by(inverse.as_ref()))
    }

    // U^dag S U with U = conj(V) kron V, exploiting sparsity of V.
    fn conjugate_by(&self, v: MatRef<'_, c64>) -> Superoperator {
        let d = self.dim;
        assert_eq!(v.nrows(), d);
        let n = d * d;
        let u_cols = kron_columns(v);

        let mut su = Mat::<c64>::zeros(n, n);
        for (c, entries) in u_cols.iter().enumerate() {
            for &(r, u) in entries {
                for row in 0..n {
                    su[(row, c)] += self.mat[(row, r)] * u;
                }
            }
        }
        let mut out = Mat::<c64>::zeros(n, n);
        for (c2, entries) in u_cols.iter().enumerate() {
            for &(r, u) in entries {
                let uc = u.conj();
                for c in 0..n {
                    out[(c2, c)] += uc * su[(r, c)];
                }
            }
        }
        Superoperator::from_mat(d, out)
    }

    /// Restriction to operators supported on the listed basis indices.
    pub fn restrict(&self, indices: &[usize]) -> Superoperator {
        let m = indices.len();
        let d = self.dim;
        let flat: Vec<usize> = (0..m * m)
            .map(|k| vec_index(indices[k % m], indices[k / m], d))
            .collect();
        let mat = Mat::from_fn(m * m, m * m, |r, c| self.mat[(flat[r], flat[c])]);
        Superoperator::from_mat(m, mat)
    }
}

fn check_unitary(v: MatRef<'_, c64>) -> Result<()> {
    let d = v.nrows();
    if v.ncols() != d {
        return Err(Error::InvalidParameter(
            "basis matrix must be square".into(),
        ));
    }
    let gram = v.adjoint() * v;
    let dev = (&gram - Mat::<c64>::identity(d, d)).norm_max();
    if dev > 1e-10 {
        return Err(Error::NotOrthonormal(dev));
    }
    Ok(())
}

// Nonzero entries of each column of conj(V) kron V.
fn kron_columns(v: MatRef<'_, c64>) -> Vec<Vec<(usize, c64)>> {
    let d = v.nrows();
    let nz: Vec<Vec<(usize, c64)>> = (0..d)
        .map(|k| {
            (0..d)
                .filter(|&a| v[(a, k)] != c64::new(0.0, 0.0))
                .map(|a| (a, v[(a, k)]))
                .collect()
        })
        .collect();
    let mut cols = Vec::with_capacity(d * d);
    for l in 0..d {
        for k in 0..d {
            let mut entries = Vec::with_capacity(nz[k].len() * nz[l].len());
            for &(b, vb) in &nz[l] {
                for &(a, va) in &nz[k] {
                    entries.push((vec_index(a, b, d), va * vb.conj()));
                }
            }
            cols.push(entries);
        }
    }
    cols
}

/// Accumulates `-i[H, .]` and GKSL dissipators into a superoperator.
pub struct LindbladBuilder {
    dim: usize,
    mat: Mat<c64>,
    decay: Mat<c64>,
}

impl LindbladBuilder {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            mat: Mat::zeros(dim * dim, dim * dim),
            decay: Mat::zeros(dim, dim),
        }
    }

    pub fn hamiltonian(mut self, h: &Operator) -> Self {
        let d = self.dim;
        assert_eq!(h.dim(), d);
        let minus_i = c64::new(0.0, -1.0);
        for a in 0..d {
            for b in 0..d {
                let x = h.get(a, b);
                if x == c64::new(0.0, 0.0) {
                    continue;
                }
                // H rho: (a, j) <- (b, j)
                for j in 0..d {
                    self.mat[(vec_index(a, j, d), vec_index(b, j, d))] += minus_i * x;
                }
                // rho H: (i, b) <- (i, a)
                for i in 0..d {
                    self.mat[(vec_index(i, b, d), vec_index(i, a, d))] -= minus_i * x;
                }
            }
        }
        self
    }

    /// Adds `rate * (A rho A^dag - {A^dag A, rho} / 2)`.
    pub fn jump(mut self, rate: f64, op: &Operator) -> Result<Self> {
        if !(rate >= 0.0) {
            return Err(Error::NegativeRate(rate));
        }
        let d = self.dim;
        assert_eq!(op.dim(), d);
        if rate == 0.0 {
            return Ok(self);
        }
        let nz: Vec<(usize, usize, c64)> = (0..d)
            .flat_map(|i| (0..d).map(move |k| (i, k)))
            .map(|(i, k)| (i, k, op.get(i, k)))
            .filter(|&(_, _, x)| x != c64::new(0.0, 0.0))
            .collect();
        for &(i, k, aik) in &nz {
            for &(j, l, ajl) in &nz {
                self.mat[(vec_index(i, j, d), vec_index(k, l, d))] += aik * ajl.conj() * rate;
            }
        }
        let ada = op.mat().adjoint() * op.mat();
        self.decay += ada * faer::Scale(c64::new(rate, 0.0));
        Ok(self)
    }

    pub fn build(mut self) -> Superoperator {
        let d = self.dim;
        let half = c64::new(0.5, 0.0);
        for a in 0..d {
            for b in 0..d {
                let k = self.decay[(a, b)];
                if k == c64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..d {
                    self.mat[(vec_index(a, j, d), vec_index(b, j, d))] -= half * k;
                }
                for i in 0..d {
                    self.mat[(vec_index(i, b, d), vec_index(i, a, d))] -= half * k;
                }
            }
        }
        Superoperator::from_mat(d, self.mat)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_operator(dim: usize, seed: u64) -> Operator {
        let mut s = seed;
        let mut next = move || {
            s = s
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        Operator::from_fn(dim, |_, _| c64::new(next(), next()))
    }

    // Direct evaluation of the GKSL right-hand side with matrix products.
    fn lindblad_rhs(h: &Operator, jumps: &[(f64, Operator)], rho: &Operator) -> Operator {
        let mut out = h.commutator(rho).scale(c64::new(0.0, -1.0));
        for (rate, a) in jumps {
            let ad = a.adjoint();
            let term = &(&(a * rho) * &ad) - &(&ad * a).anticommutator(rho).scale_real(0.5);
            out = &out + &term.scale_real(*rate);
        }
        out
    }

    #[test]
    fn builder_matches_direct_evaluation() {
        let d = 4;
        let h = random_operator(d, 1).hermitian_part();
        let jumps = vec![(0.3, random_operator(d, 2)), (1.7, random_operator(d, 3))];
        let mut b = LindbladBuilder::new(d).hamiltonian(&h);
        for (rate, a) in &jumps {
            b = b.jump(*rate, a).unwrap();
        }
        let l = b.build();
        for seed in 10..14 {
            let rho = random_operator(d, seed);
            let diff = &l.apply(&rho) - &lindblad_rhs(&h, &jumps, &rho);
            assert!(diff.max_abs() < 1e-13);
        }
        assert!(l.trace_defect() < 1e-13);
        assert!(l.hermiticity_defect() < 1e-13);
    }

    #[test]
    fn negative_rate_is_refused() {
        let a = random_operator(3, 5);
        assert!(matches!(
            LindbladBuilder::new(3).jump(-0.1, &a),
            Err(Error::NegativeRate(_))
        ));
    }

    #[test]
    fn basis_change_round_trip() {
        let d = 3;
        let h = random_operator(d, 7).hermitian_part();
        let l = LindbladBuilder::new(d)
            .hamiltonian(&h)
            .jump(0.4, &random_operator(d, 8))
            .unwrap()
            .build();
        let eig = h.mat().self_adjoint_eigen(faer::Side::Lower).unwrap();
        let v = eig.U().to_owned();
        let lt = l.in_basis(v.as_ref()).unwrap();
        // L~(Y) = V^dag L(V Y V^dag) V
        let y = random_operator(d, 9);
        let vo = Operator::from_mat(v.clone());
        let x = &(&vo * &y) * &vo.adjoint();
        let expected = &(&vo.adjoint() * &l.apply(&x)) * &vo;
        assert!((&lt.apply(&y) - &expected).max_abs() < 1e-13);
        let back = lt.from_basis(v.as_ref()).unwrap();
        assert!(back.max_abs_diff(&l) < 1e-13);
        let bad = Mat::<c64>::from_fn(d, d, |i, j| c64::new((i + j) as f64, 0.0));
        assert!(l.in_basis(bad.as_ref()).is_err());
    }

    #[test]
    fn restriction_picks_subspace_entries() {
        let d = 3;
        let l = LindbladBuilder::new(d)
            .hamiltonian(&random_operator(d, 4).hermitian_part())
            .build();
        let r = l.restrict(&[0, 2]);
        assert_eq!(r.dim(), 2);
        assert_eq!(r.element((1, 0), (1, 1)), l.element((2, 0), (2, 2)));
    }
}
