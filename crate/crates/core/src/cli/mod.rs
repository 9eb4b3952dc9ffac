//! Scenario configuration and CSV-producing runners for the command line.

mod config;
mod run;
mod scenario;

pub use config::Config;
pub use run::{
    compare_pair, format_number, run_compare, run_evolve, run_spectrum, run_steady, write_atomic,
};
pub use scenario::{InitialState, Model, Scenario, SolverKind, DEFAULT_OBSERVABLES};
