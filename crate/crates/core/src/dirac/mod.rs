//! Radial Dirac κ-channels discretized in a B-spline Galerkin basis, in units
//! `ħ = m = c = 1` so the free gap is `(−1, 1)`.

pub mod bspline;
mod channel;
mod oracle;
mod quadrature;
mod study;

pub use bspline::{build_basis, BSplineBasis, BasisConfig, LocalValues};
pub use channel::{
    assemble, assemble_channel, assemble_free_projector, hardy_dirac_min, lambda0_channel,
    ChannelMatrices, ChannelSpec, PotentialKind, PotentialTerm, Splitting,
};
pub use oracle::{exact_energy, exact_level, suggested_rmax};
pub use quadrature::{quadrature_points, QuadPoint};
pub use study::{convergence_study, ConvergenceRow};

/// Levels of a free (`V = 0`) discretized channel never enter `(−1 + SPLIT_TOL, 1 − SPLIT_TOL)`.
pub const SPLIT_TOL: f64 = 1e-8;
