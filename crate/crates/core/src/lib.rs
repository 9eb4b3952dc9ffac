//! Jaynes-Cummings model with a lossy cavity.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod bath;
pub mod cli;
pub mod error;
pub mod generators;
pub mod hilbert;
pub mod jcmodel;
pub mod observables;
pub mod solver;
pub mod verify;

pub use error::{Error, Result};
