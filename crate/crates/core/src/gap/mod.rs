//! Min-max levels of a symmetric block operator above the supremum `λ₀` of
//! its lower block, and the fixed-point solver for the eigenvalues they
//! characterize.
//!
//! For a shift `E > λ₀` the lower block is eliminated exactly: the graph map
//! `L_E` sends an upper vector to the lower vector maximizing the energy, and
//! the Schur pair `(M_E, N_E)` carries the reduced form and the norm on the
//! graph. The levels `ℓ_k(E)` are the generalized eigenvalues of that pair;
//! `ℓ_k` is positive below the k-th min-max eigenvalue `λ_k`, vanishes
//! exactly there, and decreases with slope at most −1 wherever it is
//! nonpositive. On the positive side it need not be monotone.
//!
//! All tolerances are relative to [`BlockOperator::scale`].

mod identities;
mod operator;
mod schur;
mod solver;

pub use identities::{
    decomposition_residual, decomposition_residual_at, graph_map_identity_residual,
    resolvent_formula_residual,
};
pub use operator::{lambda0, orthonormalize, toy_laplacian_block, BlockOperator};
pub use schur::{all_levels, graph_map, level, levels, schur_pair, verify_gap, SchurPair};
pub use solver::{
    default_start, minmax_iterate, Iterate, SolveTrace, SolverOptions, DEFAULT_MAXIT, DEFAULT_TOL,
    NO_GAP_DIST,
};

/// Minimum distance of a shift above `λ₀`.
pub const GAP_EPS: f64 = 1e-10;
/// Slack for [`verify_gap`].
pub const CHECK_TOL: f64 = 1e-10;
/// Levels within this of zero at a converged `λ_k` count toward its
/// multiplicity.
pub const MULT_TOL: f64 = 1e-8;
