//! Populations, photon statistics and health checks of density matrices.

use std::fmt;
use std::str::FromStr;

use faer::c64;

use crate::error::{Error, Result};
use crate::hilbert::{Atom, DensityMatrix, Operator, StateSpace};
use crate::jcmodel::{dressed_vector, DressedLabel};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Observable {
    Pop0g,
    Pop1g,
    Pop0e,
    AtomicGround,
    AtomicExcited,
    PhotonNumber,
    ExcitationNumber,
    TraceDefect,
    HermDefect,
    MinEigenvalue,
}

impl Observable {
    pub const ALL: [Observable; 10] = [
        Observable::Pop0g,
        Observable::Pop1g,
        Observable::Pop0e,
        Observable::AtomicGround,
        Observable::AtomicExcited,
        Observable::PhotonNumber,
        Observable::ExcitationNumber,
        Observable::TraceDefect,
        Observable::HermDefect,
        Observable::MinEigenvalue,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Observable::Pop0g => "pop_0g",
            Observable::Pop1g => "pop_1g",
            Observable::Pop0e => "pop_0e",
            Observable::AtomicGround => "atomic_ground",
            Observable::AtomicExcited => "atomic_excited",
            Observable::PhotonNumber => "photon_number",
            Observable::ExcitationNumber => "excitation_number",
            Observable::TraceDefect => "trace_defect",
            Observable::HermDefect => "herm_defect",
            Observable::MinEigenvalue => "min_eigenvalue",
        }
    }

    /// The Hermitian operator `O` with value `Tr{O rho}`, or `None` for the
    /// nonlinear diagnostics.
    pub fn operator(self, space: &StateSpace) -> Option<Operator> {
        let diag = |f: &dyn Fn(usize, Atom) -> f64| {
            let values: Vec<f64> = space.basis().map(|(n, s)| f(n, s)).collect();
            Operator::diagonal(&values)
        };
        let is =
            |n0: usize, s0: Atom| move |n: usize, s: Atom| f64::from(u8::from(n == n0 && s == s0));
        Some(match self {
            Observable::Pop0g => diag(&is(0, Atom::Ground)),
            Observable::Pop1g => diag(&is(1, Atom::Ground)),
            Observable::Pop0e => diag(&is(0, Atom::Excited)),
            Observable::AtomicGround => diag(&|_, s| f64::from(u8::from(s == Atom::Ground))),
            Observable::AtomicExcited => diag(&|_, s| f64::from(u8::from(s == Atom::Excited))),
            Observable::PhotonNumber => diag(&|n, _| n as f64),
            Observable::ExcitationNumber => diag(&|n, s| (n + s.index()) as f64),
            _ => return None,
        })
    }

    pub fn evaluate(self, rho: &Operator) -> Result<f64> {
        let space = StateSpace::from_dim(rho.dim())?;
        match self {
            Observable::TraceDefect => Ok(diagnostics(rho)?.trace_defect),
            Observable::HermDefect => Ok(rho.hermiticity_defect()),
            Observable::MinEigenvalue => Ok(diagnostics(rho)?.min_eigenvalue),
            linear => {
                let op = linear.operator(&space).expect("linear observable");
                Ok((0..rho.dim())
                    .map(|i| op.get(i, i).re * rho.get(i, i).re)
                    .sum())
            }
        }
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Observable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Observable::ALL
            .into_iter()
            .find(|o| o.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown observable '{s}'")))
    }
}

/// A non-empty list of distinct observables, in output column order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObservableSet(Vec<Observable>);

impl ObservableSet {
    pub fn new(items: Vec<Observable>) -> Result<Self> {
        if items.is_empty() {
            return Err(Error::Config("no observables selected".into()));
        }
        for (k, o) in items.iter().enumerate() {
            if items[..k].contains(o) {
                return Err(Error::Config(format!("observable '{o}' listed twice")));
            }
        }
        Ok(Self(items))
    }

    /// Comma-separated names.
    pub fn parse(list: &str) -> Result<Self> {
        let items = list
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(str::parse)
            .collect::<Result<Vec<_>>>()?;
        Self::new(items)
    }

    pub fn items(&self) -> &[Observable] {
        &self.0
    }

    pub fn evaluate(&self, rho: &Operator) -> Result<Vec<f64>> {
        self.0.iter().map(|o| o.evaluate(rho)).collect()
    }
}

impl fmt::Display for ObservableSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.0.iter().map(|o| o.name()).collect();
        f.write_str(&names.join(","))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Label {
    Bare(usize, Atom),
    Dressed(DressedLabel),
}

/// `<label| rho |label>`.
pub fn population(rho: &DensityMatrix, label: Label) -> Result<f64> {
    let space = StateSpace::from_dim(rho.dim())?;
    let v = match label {
        Label::Bare(n, s) => space.ket(n, s)?,
        Label::Dressed(d) => dressed_vector(&space, d)?,
    };
    let z: c64 = rho.operator().matrix_element(&v, &v);
    if z.im.abs() >= 1e-12 {
        return Err(Error::Numerical(format!(
            "population has imaginary part {:e}",
            z.im
        )));
    }
    Ok(z.re)
}

/// `sum_n <n,g| rho |n,g>`.
pub fn atomic_ground_population(rho: &DensityMatrix) -> f64 {
    (0..rho.dim() / 2).map(|n| rho.get(2 * n, 2 * n).re).sum()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Diagnostics {
    pub trace_defect: f64,
    pub herm_defect: f64,
    pub min_eigenvalue: f64,
}

pub fn diagnostics(rho: &Operator) -> Result<Diagnostics> {
    Ok(Diagnostics {
        trace_defect: (rho.trace() - c64::new(1.0, 0.0)).norm(),
        herm_defect: rho.hermiticity_defect(),
        min_eigenvalue: rho.hermitian_eigenvalues()?.first().copied().unwrap_or(0.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::build_space;
    use crate::jcmodel::Branch;

    #[test]
    fn populations_of_simple_states() {
        let space = build_space(2);
        let g0 = DensityMatrix::pure(&space.ket(0, Atom::Ground).unwrap()).unwrap();
        assert_eq!(population(&g0, Label::Bare(0, Atom::Ground)).unwrap(), 1.0);

        let plus = DressedLabel::Manifold {
            n: 1,
            branch: Branch::Plus,
        };
        let bell = DensityMatrix::pure(&dressed_vector(&space, plus).unwrap()).unwrap();
        assert!((population(&bell, Label::Bare(1, Atom::Ground)).unwrap() - 0.5).abs() < 1e-15);
        assert!((atomic_ground_population(&bell) - 0.5).abs() < 1e-15);

        let mixed = DensityMatrix::maximally_mixed(4);
        for label in [Label::Bare(0, Atom::Excited), Label::Bare(1, Atom::Ground)] {
            assert!((population(&mixed, label).unwrap() - 0.25).abs() < 1e-15);
        }
        assert!(population(&mixed, Label::Bare(2, Atom::Ground)).is_err());

        let e0 = DensityMatrix::pure(&space.ket(0, Atom::Excited).unwrap()).unwrap();
        assert_eq!(atomic_ground_population(&e0), 0.0);
    }

    #[test]
    fn diagnostics_of_pure_and_scaled_states() {
        let space = build_space(2);
        let rho = Operator::projector(&space.ket(1, Atom::Excited).unwrap());
        let d = diagnostics(&rho).unwrap();
        assert!(d.trace_defect < 1e-14 && d.herm_defect < 1e-14 && d.min_eigenvalue.abs() < 1e-14);
        let d = diagnostics(&rho.scale_real(1.01)).unwrap();
        assert!((d.trace_defect - 0.01).abs() < 1e-14);
    }

    #[test]
    fn names_round_trip() {
        for o in Observable::ALL {
            assert_eq!(o.name().parse::<Observable>().unwrap(), o);
        }
        let set = ObservableSet::parse("pop_0g, atomic_ground,photon_number").unwrap();
        assert_eq!(set.to_string(), "pop_0g,atomic_ground,photon_number");
        assert!(ObservableSet::parse("pop_0g,pop_0g").is_err());
        assert!(ObservableSet::parse("").is_err());
        assert!(ObservableSet::parse("pop_2g").is_err());
    }

    #[test]
    fn linear_observables_on_mixed_state() {
        let rho = DensityMatrix::maximally_mixed(6);
        let v = |o: Observable| o.evaluate(rho.operator()).unwrap();
        assert!((v(Observable::AtomicGround) + v(Observable::AtomicExcited) - 1.0).abs() < 1e-15);
        assert!((v(Observable::PhotonNumber) - 1.0).abs() < 1e-15);
        assert!((v(Observable::ExcitationNumber) - 1.5).abs() < 1e-15);
    }
}
