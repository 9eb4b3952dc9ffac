//! Lindblad generators for the lossy Jaynes-Cummings model.
//!
//! Three builders share one [`LindbladBuilder`]:
//!
//! * [`phenomenological_generator`]: cavity damping through `a` and `a^dag`
//!   at the bare cavity frequency, ignoring the atom.
//! * [`microscopic_generator`]: the secular (Davies) generator obtained by
//!   decomposing the coupling `a + a^dag` into eigenoperators of the full
//!   Jaynes-Cummings Hamiltonian, each damped at `gamma(omega)`.
//! * [`dressed_approx_generator`]: the phenomenological dissipator with all
//!   non-secular terms in the dressed basis removed.
//!
//! No Lamb-shift correction is added to any of them.

mod superop;

pub use superop::{vec_index, LindbladBuilder, Superoperator};

use faer::{c64, Mat};

use crate::bath::{rate, BathSpec};
use crate::error::{Error, Result};
use crate::hilbert::{ladder_operators, Operator, StateSpace};
use crate::jcmodel::{eigenbasis, hamiltonian, DressedState, JCParams};

/// Operator weights below this fraction of the largest are treated as zero
/// when splitting an operator into eigenoperators.
const WEIGHT_CUTOFF: f64 = 1e-13;

/// A component `A(omega)` of a system operator.
#[derive(Clone, Debug)]
pub struct Eigenoperator {
    pub bohr_frequency: f64,
    pub operator: Operator,
}

/// A dissipative channel: `rate * D[operator]` at a given Bohr frequency.
#[derive(Clone, Debug)]
pub struct JumpChannel {
    pub bohr_frequency: f64,
    pub operator: Operator,
    pub rate: f64,
}

fn basis_matrix(eigensystem: &[DressedState]) -> Mat<c64> {
    let d = eigensystem[0].coefficients.nrows();
    Mat::from_fn(d, eigensystem.len(), |i, k| eigensystem[k].coefficients[i])
}

fn orthonormality_defect(v: &Mat<c64>) -> f64 {
    let gram = v.adjoint() * v;
    (&gram - Mat::<c64>::identity(v.ncols(), v.ncols())).norm_max()
}

/// Splits `a` into `A(omega) = sum_{e' - e = omega} P(e) a P(e')`, merging
/// Bohr frequencies closer than `freq_tol`. The result is sorted by
/// frequency and sums to `a` projected onto the span of `eigensystem`.
pub fn eigenoperators(
    a: &Operator,
    eigensystem: &[DressedState],
    freq_tol: f64,
) -> Result<Vec<Eigenoperator>> {
    if !(freq_tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "freq_tol = {freq_tol} must be > 0"
        )));
    }
    if eigensystem.is_empty() {
        return Ok(Vec::new());
    }
    let v = basis_matrix(eigensystem);
    let defect = orthonormality_defect(&v);
    if defect > 1e-10 {
        return Err(Error::NotOrthonormal(defect));
    }
    let m = eigensystem.len();
    let a_tilde = v.adjoint() * a.mat() * &v;
    let cutoff = WEIGHT_CUTOFF * a_tilde.norm_max();

    // (omega, i, j, <v_i|a|v_j>)
    let mut terms: Vec<(f64, usize, usize, c64)> = Vec::new();
    for i in 0..m {
        for j in 0..m {
            let x = a_tilde[(i, j)];
            if x.norm() > cutoff {
                terms.push((eigensystem[j].energy - eigensystem[i].energy, i, j, x));
            }
        }
    }
    terms.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));

    let mut out = Vec::new();
    let mut start = 0;
    while start < terms.len() {
        let mut end = start + 1;
        while end < terms.len() && terms[end].0 - terms[end - 1].0 <= freq_tol {
            end += 1;
        }
        let group = &terms[start..end];
        let omega = group.iter().map(|t| t.0).sum::<f64>() / group.len() as f64;
        let mut op = Operator::zeros(a.dim());
        for &(_, i, j, x) in group {
            let vi = &eigensystem[i].coefficients;
            let vj = &eigensystem[j].coefficients;
            for r in 0..a.dim() {
                if vi[r] == c64::new(0.0, 0.0) {
                    continue;
                }
                for c in 0..a.dim() {
                    let w = vj[c];
                    if w != c64::new(0.0, 0.0) {
                        let cur = op.get(r, c);
                        op.set(r, c, cur + x * vi[r] * w.conj());
                    }
                }
            }
        }
        out.push(Eigenoperator {
            bohr_frequency: omega,
            operator: op,
        });
        start = end;
    }
    Ok(out)
}

/// Cavity coupling operator `a + a^dag`.
pub fn cavity_coupling(space: &StateSpace) -> Operator {
    let (a, a_dag) = ladder_operators(space);
    &a + &a_dag
}

/// Emission (`omega > 0`) and absorption (`omega < 0`) channels of the
/// microscopic generator.
pub fn microscopic_channels(
    params: &JCParams,
    space: &StateSpace,
    bath: &BathSpec,
    freq_tol: f64,
) -> Result<Vec<JumpChannel>> {
    let basis = eigenbasis(params, space);
    let components = eigenoperators(&cavity_coupling(space), &basis, freq_tol)?;
    components
        .into_iter()
        .map(|c| {
            if c.bohr_frequency.abs() <= freq_tol {
                return Err(Error::ZeroFrequencyChannel(c.operator.max_abs()));
            }
            Ok(JumpChannel {
                rate: rate(c.bohr_frequency, bath)?,
                bohr_frequency: c.bohr_frequency,
                operator: c.operator,
            })
        })
        .collect()
}

pub fn microscopic_generator(
    params: &JCParams,
    space: &StateSpace,
    bath: &BathSpec,
    freq_tol: f64,
) -> Result<Superoperator> {
    if space.n_max() < 2 {
        return Err(Error::InvalidParameter(format!(
            "microscopic generator needs n_max >= 2, got {}",
            space.n_max()
        )));
    }
    let channels = microscopic_channels(params, space, bath, freq_tol)?;
    let mut builder = LindbladBuilder::new(space.dim()).hamiltonian(&hamiltonian(params, space));
    for ch in &channels {
        builder = builder.jump(ch.rate, &ch.operator)?;
    }
    Ok(builder.build())
}

fn check_phen_rates(gamma0: f64, nbar: f64) -> Result<()> {
    if !(gamma0 >= 0.0 && gamma0.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "gamma0 = {gamma0} must be >= 0"
        )));
    }
    if !(nbar >= 0.0 && nbar.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "nbar = {nbar} must be >= 0"
        )));
    }
    Ok(())
}

fn phenomenological_dissipator(
    space: &StateSpace,
    gamma0: f64,
    nbar: f64,
) -> Result<LindbladBuilder> {
    check_phen_rates(gamma0, nbar)?;
    let (a, a_dag) = ladder_operators(space);
    LindbladBuilder::new(space.dim())
        .jump(gamma0 * (nbar + 1.0), &a)?
        .jump(gamma0 * nbar, &a_dag)
}

/// `-i[H, rho] + g0 (n+1) D[a] rho + g0 n D[a^dag] rho`
pub fn phenomenological_generator(
    params: &JCParams,
    space: &StateSpace,
    gamma0: f64,
    nbar: f64,
) -> Result<Superoperator> {
    Ok(phenomenological_dissipator(space, gamma0, nbar)?
        .hamiltonian(&hamiltonian(params, space))
        .build())
}

/// Phenomenological generator with every dissipator element that couples
/// dressed-basis entries of different free-evolution frequency removed.
pub fn dressed_approx_generator(
    params: &JCParams,
    space: &StateSpace,
    gamma0: f64,
    nbar: f64,
) -> Result<Superoperator> {
    let dissipator = phenomenological_dissipator(space, gamma0, nbar)?.build();
    let basis = eigenbasis(params, space);
    let v = basis_matrix(&basis);
    let energies: Vec<f64> = basis.iter().map(|s| s.energy).collect();
    let secular = secular_projection(
        &dissipator.in_basis(v.as_ref())?,
        &energies,
        params.freq_tol(),
    );
    let back = secular.from_basis(v.as_ref())?;
    let commutator = LindbladBuilder::new(space.dim())
        .hamiltonian(&hamiltonian(params, space))
        .build();
    Ok(Superoperator::from_mat(
        space.dim(),
        commutator.into_mat() + back.into_mat(),
    ))
}

/// Zeroes every element of an eigenbasis superoperator that couples entries
/// `(k, l) -> (i, j)` with `|(E_i - E_j) - (E_k - E_l)| > tol`.
pub fn secular_projection(sup: &Superoperator, energies: &[f64], tol: f64) -> Superoperator {
    let d = sup.dim();
    assert_eq!(energies.len(), d);
    let freq = |k: usize| energies[k % d] - energies[k / d];
    let n = sup.size();
    let mat = Mat::from_fn(n, n, |r, c| {
        if (freq(r) - freq(c)).abs() > tol {
            c64::new(0.0, 0.0)
        } else {
            sup.mat()[(r, c)]
        }
    });
    Superoperator::from_mat(d, mat)
}

/// Generator on the three-dimensional sector `{|E0>, |E1->, |E1+>}` (in that
/// order), with `gamma_a = gamma(w0 - Omega)` and `gamma_b = gamma(w0 + Omega)`.
pub fn single_excitation_generator(
    params: &JCParams,
    gamma_a: f64,
    gamma_b: f64,
) -> Result<Superoperator> {
    let (w0, omega) = (params.omega0(), params.rabi());
    let h = Operator::diagonal(&[-w0 / 2.0, w0 / 2.0 - omega, w0 / 2.0 + omega]);
    let jump = |to: usize, from: usize| {
        let mut op = Operator::zeros(3);
        op.set(to, from, c64::new(1.0, 0.0));
        op
    };
    Ok(LindbladBuilder::new(3)
        .hamiltonian(&h)
        .jump(gamma_b / 2.0, &jump(0, 2))?
        .jump(gamma_a / 2.0, &jump(0, 1))?
        .build())
}
