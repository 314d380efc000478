use serde::{Deserialize, Serialize};

use super::channel::{assemble, ChannelSpec};
use super::oracle::exact_level;
use crate::error::{Error, Result};
use crate::gap::{minmax_iterate, SolverOptions};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    /// Number of breakpoint intervals.
    pub size: usize,
    pub lambda: f64,
    pub exact: Option<f64>,
    pub error: Option<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Solves for `λ_k` on a sequence of refinements of `spec.basis`, where
/// `sizes` are interval counts.
pub fn convergence_study(spec: &ChannelSpec, k: usize, sizes: &[usize]) -> Result<Vec<ConvergenceRow>> {
    if sizes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidConfig("sizes must be increasing".into()));
    }
    let exact = exact_level(spec, k);
    let opts = SolverOptions::default().with_gap_edge(1.0);
    sizes
        .iter()
        .map(|&size| {
            let op = assemble(&spec.clone().with_intervals(size))?;
            let t = minmax_iterate(&op, k, &opts)?;
            Ok(ConvergenceRow {
                size,
                lambda: t.lambda,
                exact,
                error: exact.map(|x| (t.lambda - x).abs()),
                iterations: t.iterations(),
                converged: t.converged,
            })
        })
        .collect()
}
