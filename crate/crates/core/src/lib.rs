#![allow(clippy::needless_range_loop)]

pub mod classical_r;
pub mod closed_forms;
pub mod elliptic_poly;
pub mod error;
pub mod lattice;
mod perm;
pub mod residual;
pub mod rmatrix;
pub mod sampling;
pub mod theta;

pub use error::{LabError, Result};
pub use perm::MAX_PERM_N;
pub use num_complex::Complex64;
