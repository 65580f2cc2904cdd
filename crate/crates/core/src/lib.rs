//! Locating large near-rank-one blocks of nonnegative matrices
//! by minimizing `‖X‖_* + θ‖X‖_1` subject to `<A, X> >= 1`.
//!
//! Library indices are 0-based; the command-line records are 1-based.

pub mod cli;
pub mod error;
pub mod generators;
pub mod io;
pub mod matrix;
pub mod nmf;
pub mod solver;
pub mod structure;

pub use error::{LarosError, Result};
pub use matrix::{DenseMatrix, NormKind, SvdFactors};
