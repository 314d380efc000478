//! Naive Rayleigh-Ritz eigenvalues in the gap versus min-max levels, across
//! basis refinements.

use serde::{Deserialize, Serialize};

use crate::dirac::{assemble, exact_level, ChannelSpec};
use crate::error::{Error, Result};
use crate::gap::{minmax_iterate, BlockOperator, SolverOptions};

/// Naive and min-max values closer than this are considered the same level.
pub const MATCH_TOL: f64 = 1e-4;

/// Eigenvalues of the full pencil strictly inside `(lo, hi)`, ascending.
pub fn naive_gap_spectrum(op: &BlockOperator, gap: (f64, f64)) -> Result<Vec<f64>> {
    let (lo, hi) = gap;
    if !(lo < hi) {
        return Err(Error::InvalidConfig(format!("empty gap interval ({lo}, {hi})")));
    }
    if lo < op.lambda0() {
        return Err(Error::InvalidConfig(format!(
            "gap lower end {lo} lies below lambda0 = {}",
            op.lambda0()
        )));
    }
    Ok(op
        .full_spectrum()?
        .into_iter()
        .filter(|&e| e > lo && e < hi)
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Match {
    /// Index into `naive`.
    pub naive: usize,
    /// 1-based level index.
    pub k: usize,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeReport {
    pub size: usize,
    pub n_plus: usize,
    pub lambda0: f64,
    pub naive: Vec<f64>,
    /// `λ₁ … λ_kmax`.
    pub minmax: Vec<f64>,
    pub matched: Vec<Match>,
    pub spurious: Vec<f64>,
    /// Naive values farther than the match tolerance from every closed-form
    /// level, when the channel has an oracle.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle_unmatched: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftRow {
    pub k: usize,
    /// `|λ_k(sizes[i]) − λ_k(sizes[i+1])|` for each refinement step.
    pub drift: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PollutionReport {
    pub gap: (f64, f64),
    pub k_max: usize,
    pub match_tol: f64,
    pub sizes: Vec<SizeReport>,
    pub drift: Vec<DriftRow>,
}

impl PollutionReport {
    pub fn spurious_counts(&self) -> Vec<usize> {
        self.sizes.iter().map(|s| s.spurious.len()).collect()
    }

    /// Drift of level `k` over the last refinement step.
    pub fn last_drift(&self, k: usize) -> Option<f64> {
        self.drift.iter().find(|d| d.k == k)?.drift.last().copied()
    }
}

/// Naive spectrum, min-max levels and their matching for one operator.
pub fn size_report(op: &BlockOperator, size: usize, gap: (f64, f64), k_max: usize) -> Result<SizeReport> {
    if k_max == 0 || k_max > op.n_plus() {
        return Err(Error::KTooLarge {
            k: k_max,
            max: op.n_plus(),
        });
    }
    let naive = naive_gap_spectrum(op, gap)?;
    let opts = SolverOptions::default().with_gap_edge(gap.1);
    let minmax = (1..=k_max)
        .map(|k| minmax_iterate(op, k, &opts).map(|t| t.lambda))
        .collect::<Result<Vec<_>>>()?;

    let mut matched = Vec::new();
    let mut spurious = Vec::new();
    for (i, &x) in naive.iter().enumerate() {
        let nearest = minmax
            .iter()
            .enumerate()
            .map(|(j, &l)| (j + 1, (l - x).abs()))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        match nearest {
            Some((k, distance)) if distance <= MATCH_TOL => matched.push(Match { naive: i, k, distance }),
            _ => spurious.push(x),
        }
    }
    Ok(SizeReport {
        size,
        n_plus: op.n_plus(),
        lambda0: op.lambda0(),
        naive,
        minmax,
        matched,
        spurious,
        oracle_unmatched: None,
    })
}

fn drift_table(sizes: &[SizeReport], k_max: usize) -> Vec<DriftRow> {
    (1..=k_max)
        .map(|k| DriftRow {
            k,
            drift: sizes
                .windows(2)
                .map(|w| (w[0].minmax[k - 1] - w[1].minmax[k - 1]).abs())
                .collect(),
        })
        .collect()
}

/// Builds a report from operators already assembled at each size.
pub fn pollution_report_for(
    ops: &[(usize, BlockOperator)],
    gap: (f64, f64),
    k_max: usize,
) -> Result<PollutionReport> {
    if ops.len() < 2 {
        return Err(Error::InvalidConfig("pollution report needs at least two sizes".into()));
    }
    let sizes = ops
        .iter()
        .map(|(size, op)| size_report(op, *size, gap, k_max))
        .collect::<Result<Vec<_>>>()?;
    Ok(PollutionReport {
        gap,
        k_max,
        match_tol: MATCH_TOL,
        drift: drift_table(&sizes, k_max),
        sizes,
    })
}

/// Assembles `spec` at each interval count in `sizes` and compares naive and
/// min-max values in `gap`.
pub fn pollution_report(
    spec: &ChannelSpec,
    sizes: &[usize],
    gap: (f64, f64),
    k_max: usize,
) -> Result<PollutionReport> {
    if sizes.len() < 2 {
        return Err(Error::InvalidConfig("pollution report needs at least two sizes".into()));
    }
    if sizes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidConfig("sizes must be increasing".into()));
    }
    let ops = sizes
        .iter()
        .map(|&n| Ok((n, assemble(&spec.clone().with_intervals(n))?)))
        .collect::<Result<Vec<_>>>()?;
    let mut report = pollution_report_for(&ops, gap, k_max)?;

    if spec.coulomb_coupling().is_some() {
        let exact: Vec<f64> = (1..).map_while(|k| exact_level(spec, k).filter(|&e| e < gap.1)).collect();
        for s in &mut report.sizes {
            s.oracle_unmatched = Some(
                s.naive
                    .iter()
                    .copied()
                    .filter(|x| exact.iter().all(|e| (e - x).abs() > MATCH_TOL))
                    .collect(),
            );
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dirac::BasisConfig;
    use crate::gap::toy_laplacian_block;
    use crate::linalg::SymMatrix;
    use nalgebra::DMatrix;

    fn decoupled(app: &[f64]) -> BlockOperator {
        BlockOperator::orthonormal(
            SymMatrix::from_diagonal(app),
            DMatrix::zeros(app.len(), 1),
            SymMatrix::from_diagonal(&[-1.0]),
        )
        .unwrap()
    }

    #[test]
    fn naive_spectrum_cases() {
        let toy = toy_laplacian_block(3, std::f64::consts::PI).unwrap();
        assert!(naive_gap_spectrum(&toy, (-0.9, 0.9)).unwrap().is_empty());
        let v = naive_gap_spectrum(&decoupled(&[0.2, 0.5]), (-0.9, 0.9)).unwrap();
        assert!((v[0] - 0.2).abs() < 1e-15 && (v[1] - 0.5).abs() < 1e-15);
        assert!(naive_gap_spectrum(&toy, (-2.0, 0.9)).is_err());
    }

    #[test]
    fn decoupled_blocks_do_not_pollute() {
        let ops = vec![(1, decoupled(&[0.2, 0.5, 3.0])), (2, decoupled(&[0.2, 0.5, 2.0]))];
        let r = pollution_report_for(&ops, (-0.9, 0.9), 2).unwrap();
        for s in &r.sizes {
            assert!(s.spurious.is_empty());
            assert_eq!(s.matched.len(), 2);
        }
        assert_eq!(r.last_drift(1), Some(0.0));
    }

    #[test]
    fn single_size_is_rejected() {
        let spec = ChannelSpec::coulomb(0.5, -1, BasisConfig::default());
        assert!(matches!(
            pollution_report(&spec, &[15], (-0.95, 0.999), 2),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn coulomb_minmax_levels_are_naive_eigenvalues() {
        let spec = ChannelSpec::coulomb(0.5, -1, BasisConfig::default());
        let r = pollution_report(&spec, &[15, 25], (-0.95, 0.999), 4).unwrap();
        for s in &r.sizes {
            for (k, l) in s.minmax.iter().enumerate() {
                if *l < 0.999 {
                    let d = s.naive.iter().map(|x| (x - l).abs()).fold(f64::INFINITY, f64::min);
                    assert!(d <= 1e-9, "k={} size={} d={d}", k + 1, s.size);
                }
            }
            assert!(s.minmax.windows(2).all(|w| w[0] <= w[1]));
            assert_eq!(s.matched.len() + s.spurious.len(), s.naive.len());
        }
    }
}
