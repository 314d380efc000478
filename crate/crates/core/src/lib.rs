//! Eigenvalues in spectral gaps of strongly indefinite symmetric block
//! operators, computed from Schur-complement min-max levels.
//!
//! * [`linalg`]: dense Cholesky and symmetric-definite eigensolves.
//! * [`gap`]: block operators, min-max levels and the fixed-point solver.
//! * [`dirac`]: radial Dirac-Coulomb channels on a B-spline basis.
//! * [`pollution`]: naive Rayleigh-Ritz versus min-max comparison.
//! * [`runner`]: JSON-configured runs behind the `gapsolve` binary.

pub mod dirac;
pub mod error;
pub mod gap;
pub mod linalg;
pub mod pollution;
pub mod runner;

pub use error::{Error, Result};
