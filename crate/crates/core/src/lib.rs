//! Polynomial q-algebraic equations: Newton-Puiseux analysis, solved forms,
//! series coefficients and their asymptotics.

pub mod algebra;
pub mod asymptotics;
pub mod cli;
pub mod error;
pub mod parse;
pub mod polygon;
pub mod roots;
pub mod series;
pub mod solver;
pub mod transforms;

#[cfg(test)]
mod testutil;

pub use error::{QError, Result};
