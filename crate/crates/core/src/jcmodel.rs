//! Resonant Jaynes-Cummings Hamiltonian and its dressed eigensystem.

use std::fmt;

use faer::{c64, Col};

use crate::error::{Error, Result};
use crate::hilbert::{atomic_operators, ladder_operators, Atom, Operator, StateSpace};

/// Threshold factor used to read "much smaller than" conditions.
pub const MUCH_SMALLER_FACTOR: f64 = 10.0;

/// Atom/cavity frequency and vacuum Rabi coupling, `hbar = 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JCParams {
    omega0: f64,
    rabi: f64,
}

impl JCParams {
    pub fn new(omega0: f64, rabi: f64) -> Result<Self> {
        if !(omega0 > 0.0 && omega0.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "omega0 = {omega0} must be > 0"
            )));
        }
        if !(rabi >= 0.0 && rabi.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "rabi = {rabi} must be >= 0"
            )));
        }
        Ok(Self { omega0, rabi })
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn rabi(&self) -> f64 {
        self.rabi
    }

    /// Default tolerance for merging Bohr frequencies, `1e-9 * omega0`.
    pub fn freq_tol(&self) -> f64 {
        1e-9 * self.omega0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Branch {
    Minus,
    Plus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Minus => -1.0,
            Branch::Plus => 1.0,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Branch::Minus => '-',
            Branch::Plus => '+',
        }
    }

    pub fn from_symbol(s: &str) -> Option<Self> {
        match s {
            "+" => Some(Branch::Plus),
            "-" => Some(Branch::Minus),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DressedLabel {
    /// `|E_0> = |0,g>`
    Ground,
    /// `|E_{N,+-}> = (|N,g> +- |N-1,e>) / sqrt 2`
    Manifold { n: usize, branch: Branch },
    /// The bare state `|n_max, e>`, whose dressed partner lies above the cutoff.
    Cutoff,
}

impl fmt::Display for DressedLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DressedLabel::Ground => write!(f, "E0"),
            DressedLabel::Manifold { n, branch } => write!(f, "E{n}{}", branch.symbol()),
            DressedLabel::Cutoff => write!(f, "cutoff"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct DressedState {
    pub label: DressedLabel,
    pub energy: f64,
    pub coefficients: Col<c64>,
}

/// `H = (w0/2) sz + w0 a^dag a + Omega (a s+ + a^dag s-)`
pub fn hamiltonian(params: &JCParams, space: &StateSpace) -> Operator {
    let (a, a_dag) = ladder_operators(space);
    let ops = atomic_operators(space);
    let free = free_hamiltonian(params, space);
    let coupling = &(&a * &ops.sigma_plus) + &(&a_dag * &ops.sigma_minus);
    &free + &coupling.scale_real(params.rabi)
}

/// `(w0/2) sz + w0 a^dag a`
pub fn free_hamiltonian(params: &JCParams, space: &StateSpace) -> Operator {
    let (a, a_dag) = ladder_operators(space);
    let ops = atomic_operators(space);
    &ops.sigma_z.scale_real(params.omega0 / 2.0) + &(&a_dag * &a).scale_real(params.omega0)
}

/// Coefficient vector of a dressed label in the bare product basis.
pub fn dressed_vector(space: &StateSpace, label: DressedLabel) -> Result<Col<c64>> {
    match label {
        DressedLabel::Ground => space.ket(0, Atom::Ground),
        DressedLabel::Cutoff => space.ket(space.n_max(), Atom::Excited),
        DressedLabel::Manifold { n, branch } => {
            if n == 0 || n > space.n_max() {
                return Err(Error::LabelOutOfRange(format!(
                    "dressed manifold N = {n} with n_max = {}",
                    space.n_max()
                )));
            }
            let g = space.index(n, Atom::Ground)?;
            let e = space.index(n - 1, Atom::Excited)?;
            let h = std::f64::consts::FRAC_1_SQRT_2;
            let mut v = Col::zeros(space.dim());
            v[g] = c64::new(h, 0.0);
            v[e] = c64::new(branch.sign() * h, 0.0);
            Ok(v)
        }
    }
}

pub fn dressed_energy(params: &JCParams, space: &StateSpace, label: DressedLabel) -> f64 {
    let w0 = params.omega0;
    match label {
        DressedLabel::Ground => -w0 / 2.0,
        DressedLabel::Manifold { n, branch } => {
            (n as f64 - 0.5) * w0 + branch.sign() * params.rabi * (n as f64).sqrt()
        }
        DressedLabel::Cutoff => (space.n_max() as f64 + 0.5) * w0,
    }
}

fn dressed_labels(space: &StateSpace) -> Vec<DressedLabel> {
    let mut labels = vec![DressedLabel::Ground];
    for n in 1..=space.n_max() {
        labels.push(DressedLabel::Manifold {
            n,
            branch: Branch::Minus,
        });
        labels.push(DressedLabel::Manifold {
            n,
            branch: Branch::Plus,
        });
    }
    labels
}

fn build_states(
    params: &JCParams,
    space: &StateSpace,
    labels: Vec<DressedLabel>,
) -> Vec<DressedState> {
    labels
        .into_iter()
        .map(|label| DressedState {
            label,
            energy: dressed_energy(params, space, label),
            coefficients: dressed_vector(space, label).expect("label generated in range"),
        })
        .collect()
}

/// Ground state and the pairs `|E_{N,+-}>` for `1 <= N <= n_max`, ordered
/// `E0, E1-, E1+, E2-, ...`. The bare top state `|n_max, e>` is excluded.
pub fn dressed_states(params: &JCParams, space: &StateSpace) -> Result<Vec<DressedState>> {
    if space.n_max() == 0 {
        return Err(Error::NoDressedManifolds);
    }
    Ok(build_states(params, space, dressed_labels(space)))
}

/// Complete eigenbasis of the truncated Hamiltonian: the dressed states
/// followed by the cutoff state `|n_max, e>` with energy `(n_max + 1/2) w0`.
pub fn eigenbasis(params: &JCParams, space: &StateSpace) -> Vec<DressedState> {
    let mut labels = dressed_labels(space);
    labels.push(DressedLabel::Cutoff);
    build_states(params, space, labels)
}

/// Outcome of a "much smaller than" check, reported rather than enforced.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Validity {
    pub valid: bool,
    pub ratio: f64,
}

/// Secular condition `2 Omega >> gamma_max`: valid when the ratio
/// `gamma_max / (2 Omega)` is at most 1/10.
pub fn rwa_validity(params: &JCParams, gamma_max: f64) -> Validity {
    let gap = 2.0 * params.rabi;
    if gap == 0.0 {
        return Validity {
            valid: false,
            ratio: f64::INFINITY,
        };
    }
    let ratio = gamma_max / gap;
    Validity {
        valid: ratio <= 1.0 / MUCH_SMALLER_FACTOR,
        ratio,
    }
}

/// Dressed-state approximation condition `gamma << Omega / (2 N^{3/2})` at
/// excitation `n`.
pub fn dressed_approx_validity(params: &JCParams, gamma: f64, n: usize) -> Validity {
    let scale = params.rabi / (2.0 * (n.max(1) as f64).powf(1.5));
    if scale == 0.0 {
        return Validity {
            valid: false,
            ratio: f64::INFINITY,
        };
    }
    let ratio = gamma / scale;
    Validity {
        valid: ratio <= 1.0 / MUCH_SMALLER_FACTOR,
        ratio,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{build_space, excitation_number};

    fn c(re: f64) -> c64 {
        c64::new(re, 0.0)
    }

    #[test]
    fn hamiltonian_elements() {
        let p = JCParams::new(1.0, 0.1).unwrap();
        let space = build_space(3);
        let h = hamiltonian(&p, &space);
        let g0 = space.ket(0, Atom::Ground).unwrap();
        let e0 = space.ket(0, Atom::Excited).unwrap();
        let g1 = space.ket(1, Atom::Ground).unwrap();
        assert_eq!(h.matrix_element(&g0, &g0), c(-0.5));
        assert_eq!(h.matrix_element(&e0, &g1), c(0.1));
        assert_eq!(h.hermiticity_defect(), 0.0);
    }

    #[test]
    fn conserves_excitation_number() {
        let p = JCParams::new(1.0, 0.1).unwrap();
        let space = build_space(8);
        let h = hamiltonian(&p, &space);
        let comm = h.commutator(&excitation_number(&space));
        assert!(comm.max_abs() < 1e-12);
    }

    #[test]
    fn dressed_energies() {
        let p = JCParams::new(1.0, 0.1).unwrap();
        let space = build_space(5);
        let states = dressed_states(&p, &space).unwrap();
        let energy = |n, branch| {
            states
                .iter()
                .find(|s| s.label == DressedLabel::Manifold { n, branch })
                .unwrap()
                .energy
        };
        assert!((energy(1, Branch::Plus) - 0.6).abs() < 1e-15);
        assert!((energy(1, Branch::Minus) - 0.4).abs() < 1e-15);
        assert!((energy(4, Branch::Plus) - 3.7).abs() < 1e-14);
        assert!((energy(4, Branch::Minus) - 3.3).abs() < 1e-14);
        assert_eq!(states[0].energy, -0.5);
        assert_eq!(states.len(), 2 * 5 + 1);
        assert!(states.iter().all(|s| s.label != DressedLabel::Cutoff));
    }

    #[test]
    fn first_manifold_coefficients() {
        let p = JCParams::new(1.0, 0.1).unwrap();
        let space = build_space(2);
        let states = dressed_states(&p, &space).unwrap();
        let plus = &states[2];
        assert_eq!(
            plus.label,
            DressedLabel::Manifold {
                n: 1,
                branch: Branch::Plus
            }
        );
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(
            plus.coefficients[space.index(1, Atom::Ground).unwrap()],
            c(h)
        );
        assert_eq!(
            plus.coefficients[space.index(0, Atom::Excited).unwrap()],
            c(h)
        );
    }

    #[test]
    fn eigen_residuals() {
        let p = JCParams::new(1.0, 0.3).unwrap();
        let space = build_space(6);
        let h = hamiltonian(&p, &space);
        for s in eigenbasis(&p, &space) {
            let hv = h.apply(&s.coefficients);
            let ev = &s.coefficients * faer::Scale(c(s.energy));
            assert!((&hv - &ev).norm_l2() < 1e-12, "{}", s.label);
            assert!((s.coefficients.norm_l2() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn basis_is_complete_and_orthonormal() {
        let p = JCParams::new(1.0, 0.3).unwrap();
        let space = build_space(4);
        let basis = eigenbasis(&p, &space);
        assert_eq!(basis.len(), space.dim());
        for (i, u) in basis.iter().enumerate() {
            for (j, v) in basis.iter().enumerate() {
                let overlap: c64 = (0..space.dim())
                    .map(|k| u.coefficients[k].conj() * v.coefficients[k])
                    .sum();
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((overlap - c(expected)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn matches_numerical_diagonalization() {
        let p = JCParams::new(1.0, 0.3).unwrap();
        let space = build_space(7);
        let numeric = hamiltonian(&p, &space).hermitian_eigenvalues().unwrap();
        for s in dressed_states(&p, &space).unwrap() {
            let n = match s.label {
                DressedLabel::Manifold { n, .. } => n,
                _ => 0,
            };
            if n + 1 > space.n_max() {
                continue;
            }
            let nearest = numeric
                .iter()
                .map(|e| (e - s.energy).abs())
                .fold(f64::INFINITY, f64::min);
            assert!(nearest < 1e-10, "{}", s.label);
        }
    }

    #[test]
    fn free_limit_is_degenerate() {
        let p = JCParams::new(2.0, 0.0).unwrap();
        let space = build_space(3);
        let states = dressed_states(&p, &space).unwrap();
        for pair in states[1..].chunks(2) {
            assert_eq!(pair[0].energy, pair[1].energy);
        }
        assert_eq!(states[1].energy, 1.0);
    }

    #[test]
    fn n_max_zero_has_no_manifolds() {
        let p = JCParams::new(1.0, 0.1).unwrap();
        assert!(matches!(
            dressed_states(&p, &build_space(0)),
            Err(Error::NoDressedManifolds)
        ));
    }

    #[test]
    fn rwa_diagnostic() {
        let p = JCParams::new(1.0, 0.5).unwrap();
        let v = rwa_validity(&p, 0.1);
        assert!(v.valid);
        assert!((v.ratio - 0.1).abs() < 1e-15);
        assert_eq!(
            rwa_validity(&p, 0.0),
            Validity {
                valid: true,
                ratio: 0.0
            }
        );
        let bad = rwa_validity(&p, 0.5);
        assert!(!bad.valid);
        assert_eq!(bad.ratio, 0.5);
        let closed = JCParams::new(1.0, 0.0).unwrap();
        assert!(!rwa_validity(&closed, 0.0).valid);
    }

    #[test]
    fn params_are_validated() {
        assert!(JCParams::new(0.0, 0.1).is_err());
        assert!(JCParams::new(1.0, -0.1).is_err());
        assert!(JCParams::new(f64::NAN, 0.1).is_err());
    }
}
