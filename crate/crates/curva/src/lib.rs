//! Analytic invariants, normal forms and equivalence of plane curve multigerms,
//! computed in exact arithmetic over the Gaussian rationals.

pub mod cli;
pub mod curve;
pub mod error;
pub mod invariants;
pub mod kernel;
pub mod moduli;
pub mod normalform;

pub use error::{CurvaError, Result};
