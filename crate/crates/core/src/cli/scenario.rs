//! Declarative experiment description built from a [`Config`].

use std::fmt;
use std::str::FromStr;

use super::config::Config;
use crate::bath::{occupation, BathSpec, Spectrum};
use crate::error::{Error, Result};
use crate::generators::{
    dressed_approx_generator, microscopic_generator, phenomenological_generator, Superoperator,
};
use crate::hilbert::{build_space, Atom, DensityMatrix, StateSpace};
use crate::jcmodel::{dressed_vector, Branch, DressedLabel, JCParams};
use crate::observables::ObservableSet;
use crate::solver::{
    damping_basis, evolve_ode_on_grid, linspace, step_bound, TimeSeries, ODE_STEP_FACTOR,
};

pub const DEFAULT_OBSERVABLES: &str = "pop_0g,pop_1g,atomic_ground";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Model {
    Micro,
    Phen,
    Dressed,
}

impl Model {
    pub fn name(self) -> &'static str {
        match self {
            Model::Micro => "micro",
            Model::Phen => "phen",
            Model::Dressed => "dressed",
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "micro" => Ok(Model::Micro),
            "phen" => Ok(Model::Phen),
            "dressed" => Ok(Model::Dressed),
            _ => Err(Error::Config(format!(
                "unknown model '{s}' (micro, phen, dressed)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InitialState {
    Fock(usize, Atom),
    Dressed(usize, Branch),
    Ground,
}

impl InitialState {
    /// Highest photon number present in the state.
    pub fn photon_number(self) -> usize {
        match self {
            InitialState::Fock(n, _) => n,
            InitialState::Dressed(n, _) => n,
            InitialState::Ground => 0,
        }
    }

    pub fn density(self, space: &StateSpace) -> Result<DensityMatrix> {
        let psi = match self {
            InitialState::Fock(n, s) => space.ket(n, s)?,
            InitialState::Dressed(n, branch) => {
                dressed_vector(space, DressedLabel::Manifold { n, branch })?
            }
            InitialState::Ground => space.ket(0, Atom::Ground)?,
        };
        DensityMatrix::pure(&psi)
    }
}

impl fmt::Display for InitialState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitialState::Fock(n, s) => write!(f, "fock:{n},{}", s.symbol()),
            InitialState::Dressed(n, b) => write!(f, "dressed:{n},{}", b.symbol()),
            InitialState::Ground => f.write_str("ground"),
        }
    }
}

impl FromStr for InitialState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || {
            Error::Config(format!(
                "invalid initial state '{s}' (fock:n,g|e, dressed:N,+|-, ground)"
            ))
        };
        if s == "ground" {
            return Ok(InitialState::Ground);
        }
        let (kind, rest) = s.split_once(':').ok_or_else(bad)?;
        let (n, tag) = rest.split_once(',').ok_or_else(bad)?;
        let n: usize = n.trim().parse().map_err(|_| bad())?;
        match kind {
            "fock" => Ok(InitialState::Fock(
                n,
                Atom::from_symbol(tag.trim()).ok_or_else(bad)?,
            )),
            "dressed" if n >= 1 => Ok(InitialState::Dressed(
                n,
                Branch::from_symbol(tag.trim()).ok_or_else(bad)?,
            )),
            _ => Err(bad()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SolverKind {
    Spectral,
    Ode { dt: f64 },
}

#[derive(Clone, Debug)]
pub struct Scenario {
    pub model: Model,
    pub params: JCParams,
    pub bath: BathSpec,
    /// Cavity rate and thermal occupation for the phenomenological and
    /// dressed models.
    pub phen_gamma0: f64,
    pub phen_nbar: f64,
    pub initial: InitialState,
    pub n_max: usize,
    pub tau_max: f64,
    pub steps: usize,
    pub observables: ObservableSet,
    pub solver: SolverKind,
}

fn spectrum_from(config: &Config) -> Result<Spectrum> {
    let kind = config.get("bath.kind").unwrap_or("flat");
    Ok(match kind {
        "flat" => Spectrum::Flat {
            gamma0: config.parsed_required("bath.gamma0")?,
        },
        "ohmic" => Spectrum::Ohmic {
            alpha: config.parsed_required("bath.alpha")?,
            cutoff: config.parsed_required("bath.cutoff")?,
        },
        "lorentzian" => Spectrum::Lorentzian {
            gamma0: config.parsed_required("bath.gamma0")?,
            center: config.parsed_required("bath.center")?,
            halfwidth: config.parsed_required("bath.halfwidth")?,
        },
        other => return Err(Error::Config(format!("unknown bath.kind '{other}'"))),
    })
}

const KNOWN_KEYS: [&str; 20] = [
    "model",
    "omega0",
    "rabi",
    "n_max",
    "bath.kind",
    "bath.temperature",
    "bath.gamma0",
    "bath.alpha",
    "bath.cutoff",
    "bath.center",
    "bath.halfwidth",
    "phen.gamma0",
    "phen.nbar",
    "initial",
    "time.tau_max",
    "time.steps",
    "observables",
    "solver",
    "solver.dt",
    "compare.model",
];

fn as_config(e: Error) -> Error {
    match e {
        Error::InvalidParameter(msg) => Error::Config(msg),
        other => other,
    }
}

impl Scenario {
    pub fn from_config(config: &Config) -> Result<Self> {
        if let Some(key) = config.keys().find(|k| !KNOWN_KEYS.contains(k)) {
            return Err(Error::Config(format!("unknown key '{key}'")));
        }
        let model: Model = config.require("model")?.parse()?;
        let params = JCParams::new(
            config.parsed_or("omega0", 1.0)?,
            config.parsed_required("rabi")?,
        )
        .map_err(as_config)?;
        if params.rabi() == 0.0 {
            return Err(Error::Config(
                "rabi must be > 0 (time axis is tau = 2 Omega t)".into(),
            ));
        }
        let bath = BathSpec::new(
            config.parsed_or("bath.temperature", 0.0)?,
            spectrum_from(config)?,
        )
        .map_err(as_config)?;
        let w0 = params.omega0();
        let phen_gamma0 = config.parsed_or("phen.gamma0", bath.spectrum().density(w0))?;
        let phen_nbar = match config.parsed("phen.nbar")? {
            Some(n) => n,
            None => occupation(w0, bath.temperature()).map_err(as_config)?,
        };
        if !(phen_gamma0 >= 0.0 && phen_nbar >= 0.0) {
            return Err(Error::Config(
                "phen.gamma0 and phen.nbar must be >= 0".into(),
            ));
        }
        let initial: InitialState = config.get("initial").unwrap_or("fock:0,e").parse()?;
        let n_max: usize = config.parsed_or("n_max", 2)?;
        if n_max < initial.photon_number() + 2 {
            return Err(Error::Config(format!(
                "n_max = {n_max} must be at least the initial photon number + 2 = {}",
                initial.photon_number() + 2
            )));
        }
        let tau_max: f64 = config.parsed_or("time.tau_max", 100.0)?;
        if !(tau_max > 0.0 && tau_max.is_finite()) {
            return Err(Error::Config(format!(
                "time.tau_max = {tau_max} must be > 0"
            )));
        }
        let steps: usize = config.parsed_or("time.steps", 2000)?;
        if steps < 2 {
            return Err(Error::Config(format!(
                "time.steps = {steps}: the grid needs at least 2 points"
            )));
        }
        let observables =
            ObservableSet::parse(config.get("observables").unwrap_or(DEFAULT_OBSERVABLES))?;
        let solver = match config.get("solver").unwrap_or("spectral") {
            "spectral" => SolverKind::Spectral,
            "ode" => SolverKind::Ode {
                dt: config.parsed_or("solver.dt", 1e-3 / params.rabi())?,
            },
            other => {
                return Err(Error::Config(format!(
                    "unknown solver '{other}' (spectral, ode)"
                )))
            }
        };
        if let SolverKind::Ode { dt } = solver {
            if !(dt > 0.0) {
                return Err(Error::Config(format!("solver.dt = {dt} must be > 0")));
            }
        }
        Ok(Self {
            model,
            params,
            bath,
            phen_gamma0,
            phen_nbar,
            initial,
            n_max,
            tau_max,
            steps,
            observables,
            solver,
        })
    }

    pub fn space(&self) -> StateSpace {
        build_space(self.n_max)
    }

    pub fn generator(&self) -> Result<Superoperator> {
        let space = self.space();
        match self.model {
            Model::Micro => {
                microscopic_generator(&self.params, &space, &self.bath, self.params.freq_tol())
            }
            Model::Phen => {
                phenomenological_generator(&self.params, &space, self.phen_gamma0, self.phen_nbar)
            }
            Model::Dressed => {
                dressed_approx_generator(&self.params, &space, self.phen_gamma0, self.phen_nbar)
            }
        }
    }

    pub fn initial_state(&self) -> Result<DensityMatrix> {
        self.initial.density(&self.space())
    }

    /// Output grid in units of `1 / (2 Omega)`.
    pub fn taus(&self) -> Vec<f64> {
        linspace(self.tau_max, self.steps)
    }

    pub fn times(&self) -> Vec<f64> {
        let scale = 2.0 * self.params.rabi();
        self.taus().iter().map(|tau| tau / scale).collect()
    }

    /// `0.01 / max(w0, 2 Omega, max |L_kk|)`.
    pub fn ode_step_bound(&self, l: &Superoperator) -> f64 {
        let scale = self.params.omega0().max(2.0 * self.params.rabi());
        step_bound(l).min(ODE_STEP_FACTOR / scale)
    }

    pub fn solve(&self, l: &Superoperator) -> Result<TimeSeries> {
        let rho0 = self.initial_state()?;
        let times = self.times();
        match self.solver {
            SolverKind::Spectral => damping_basis(l)?.evolve(&rho0, &times),
            SolverKind::Ode { dt } => {
                let bound = self.ode_step_bound(l);
                if dt > bound {
                    return Err(Error::StepTooLarge { dt, bound });
                }
                evolve_ode_on_grid(l, &rho0, &times, dt)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> Config {
        Config::parse(
            "model = micro\nrabi = 0.35\nbath.gamma0 = 0.07\ninitial = fock:0,e\ntime.steps = 50\n",
        )
        .unwrap()
    }

    #[test]
    fn defaults_and_derived_rates() {
        let s = Scenario::from_config(&base()).unwrap();
        assert_eq!(s.n_max, 2);
        assert_eq!(s.phen_gamma0, 0.07);
        assert_eq!(s.phen_nbar, 0.0);
        assert_eq!(s.solver, SolverKind::Spectral);
        assert_eq!(s.taus().len(), 50);
        assert!((s.times()[49] - 100.0 / 0.7).abs() < 1e-12);
    }

    #[test]
    fn initial_state_syntax() {
        for text in [
            "fock:0,e",
            "dressed:1,+",
            "ground",
            "fock:3,g",
            "dressed:2,-",
        ] {
            let s: InitialState = text.parse().unwrap();
            assert_eq!(s.to_string(), text);
        }
        for bad in ["fock:0", "dressed:0,+", "fock:x,e", "coherent:1"] {
            assert!(bad.parse::<InitialState>().is_err(), "{bad}");
        }
    }

    #[test]
    fn validation_errors_are_config_errors() {
        let cases: [(&str, &str); 6] = [
            ("n_max", "1"),
            ("time.steps", "1"),
            ("time.tau_max", "0"),
            ("rabi", "0"),
            ("model", "quantum"),
            ("observables", "pop_0g,pop_0g"),
        ];
        for (key, value) in cases {
            let mut c = base();
            c.set(key, value).unwrap();
            let err = Scenario::from_config(&c).unwrap_err();
            assert_eq!(err.exit_code(), 1, "{key} = {value}: {err}");
        }
        let mut c = base();
        c.set("typo.key", "1").unwrap();
        assert!(matches!(Scenario::from_config(&c), Err(Error::Config(_))));
    }

    #[test]
    fn ode_step_bound_includes_frequency_scales() {
        let mut c = base();
        c.set("solver", "ode").unwrap();
        let s = Scenario::from_config(&c).unwrap();
        let l = s.generator().unwrap();
        let bound = s.ode_step_bound(&l);
        assert!(bound <= 0.01);
        assert!(1e-3 / 0.35 <= bound);
    }
}
