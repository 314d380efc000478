//! Fixed-point iteration `E ← E + ℓ_k(E)` for the k-th min-max level.
//!
//! Starting below `λ_k` the iterates increase monotonically (`ℓ_k(E) ≤ λ_k − E`
//! never overshoots) and converge quadratically. Roundoff or a starting point
//! above `λ_k` can break monotonicity, so the solver keeps a bracket
//! `lo < λ_k < hi` from the signs of `ℓ_k` and bisects whenever a step would
//! leave it. `ℓ_k` is positive below `λ_k` and negative above, which makes
//! the bracket valid.

use serde::{Deserialize, Serialize};

use super::schur::all_levels;
use super::{BlockOperator, GAP_EPS, MULT_TOL};
use crate::error::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAXIT: usize = 100;

/// Levels still negative this close to `λ₀` (relative to scale) mean there is
/// no eigenvalue at that index above `λ₀`.
pub const NO_GAP_DIST: f64 = 1e-8;

#[derive(Debug, Clone, Default)]
pub struct SolverOptions {
    /// Starting shift; must exceed `λ₀`.
    pub e0: Option<f64>,
    /// Absolute stopping tolerance on `|ℓ_k|`. Defaults to `1e-12·scale`.
    pub tol: Option<f64>,
    /// Iteration cap. Defaults to 100.
    pub maxit: Option<usize>,
    /// Upper edge of the trusted gap. Levels above it are flagged, and it
    /// steers the default starting point.
    pub gap_edge: Option<f64>,
}

impl SolverOptions {
    pub fn with_e0(mut self, e0: f64) -> Self {
        self.e0 = Some(e0);
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = Some(tol);
        self
    }

    pub fn with_maxit(mut self, maxit: usize) -> Self {
        self.maxit = Some(maxit);
        self
    }

    pub fn with_gap_edge(mut self, gap_edge: f64) -> Self {
        self.gap_edge = Some(gap_edge);
        self
    }
}

/// Default starting shift: a tenth of the way from `λ₀` to the gap edge when
/// one is known, otherwise `λ₀ + 0.01·scale`.
pub fn default_start(op: &BlockOperator, gap_edge: Option<f64>) -> f64 {
    let l0 = op.lambda0();
    match gap_edge {
        Some(edge) if edge > l0 => l0 + 0.1 * (edge - l0),
        _ => l0 + 0.01 * op.scale(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Iterate {
    pub e: f64,
    pub level: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveTrace {
    /// 1-based level index.
    pub k: usize,
    pub iterates: Vec<Iterate>,
    pub converged: bool,
    pub lambda: f64,
    pub multiplicity: usize,
    /// `|ℓ_k|` at the last iterate.
    pub residual: f64,
    pub tol: f64,
    pub beyond_gap_edge: bool,
}

impl SolveTrace {
    pub fn iterations(&self) -> usize {
        self.iterates.len()
    }
}

pub fn minmax_iterate(op: &BlockOperator, k: usize, opts: &SolverOptions) -> Result<SolveTrace> {
    let np = op.n_plus();
    if k == 0 || k > np {
        return Err(Error::KTooLarge { k, max: np });
    }
    let scale = op.scale();
    let l0 = op.lambda0();
    let tol = opts.tol.unwrap_or(DEFAULT_TOL * scale);
    let maxit = opts.maxit.unwrap_or(DEFAULT_MAXIT);
    let e0 = opts.e0.unwrap_or_else(|| default_start(op, opts.gap_edge));
    if !(e0 > l0 + GAP_EPS * scale) || !e0.is_finite() {
        return Err(Error::ShiftBelowLambda0 {
            shift: e0,
            lambda0: l0,
            margin: GAP_EPS * scale,
        });
    }

    // Bracket on λ_k: ℓ_k > 0 at `lo` (once `lo_positive`), ℓ_k < 0 at `hi`.
    let mut lo = l0;
    let mut lo_positive = false;
    let mut hi = f64::INFINITY;

    let mut iterates = Vec::new();
    let mut e = e0;
    for _ in 0..maxit {
        let all = match all_levels(op, e) {
            Ok(all) => all,
            // Descending toward λ₀ with only negative levels seen: the Schur
            // pair became too ill-conditioned to factor before a sign change.
            Err(Error::NotPositiveDefinite { .. }) if !lo_positive && hi.is_finite() => {
                return Err(Error::NoGap { k, shift: hi });
            }
            Err(err) => return Err(err),
        };
        let value = all[k - 1];
        iterates.push(Iterate { e, level: value });

        if value.abs() <= tol {
            let mult_tol = MULT_TOL * scale;
            let multiplicity = all.iter().filter(|l| l.abs() <= mult_tol).count().max(1);
            let lambda = e + value;
            return Ok(SolveTrace {
                k,
                iterates,
                converged: true,
                lambda,
                multiplicity,
                residual: value.abs(),
                tol,
                beyond_gap_edge: opts.gap_edge.is_some_and(|edge| lambda > edge),
            });
        }

        if value > 0.0 {
            lo = lo.max(e);
            lo_positive = true;
        } else {
            hi = hi.min(e);
        }

        let step = e + value;
        let next = if lo_positive {
            if step > lo && step < hi {
                step
            } else {
                0.5 * (lo + hi)
            }
        } else {
            // Only negative levels so far. Close in on λ₀ geometrically: the
            // Schur pair degenerates as E → λ₀, so never jump straight there.
            let guard = l0 + (hi - l0) / 8.0;
            if step >= guard {
                step
            } else if hi - l0 <= NO_GAP_DIST * scale {
                return Err(Error::NoGap { k, shift: hi });
            } else {
                guard
            }
        };

        if next == e || (lo_positive && hi.is_finite() && hi - lo <= 4.0 * f64::EPSILON * hi.abs().max(1.0)) {
            // Bracket collapsed to machine precision before |ℓ_k| reached tol.
            break;
        }
        e = next;
    }

    let last = *iterates.last().expect("at least one iterate");
    Ok(SolveTrace {
        k,
        lambda: last.e,
        residual: last.level.abs(),
        multiplicity: 1,
        converged: false,
        tol,
        beyond_gap_edge: opts.gap_edge.is_some_and(|edge| last.e > edge),
        iterates,
    })
}
