use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Configuration of a radial B-spline basis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BasisConfig {
    /// Polynomial degree + 1.
    #[serde(default = "default_order")]
    pub order: usize,
    pub n_intervals: usize,
    pub rmax: f64,
    /// Ratio between consecutive interval widths; 1 means uniform.
    #[serde(default = "default_grading", alias = "grading_ratio")]
    pub grading: f64,
}

fn default_order() -> usize {
    7
}

fn default_grading() -> f64 {
    1.15
}

impl Default for BasisConfig {
    fn default() -> Self {
        Self {
            order: 7,
            n_intervals: 40,
            rmax: 60.0,
            grading: 1.15,
        }
    }
}

/// B-splines on `[0, rmax]` with full knot multiplicity at both ends, minus
/// the first and last spline, so that every retained function vanishes at
/// `r = 0` and `r = rmax`.
#[derive(Debug, Clone)]
pub struct BSplineBasis {
    order: usize,
    breakpoints: Vec<f64>,
    knots: Vec<f64>,
}

/// Values and first derivatives of the `order` splines that can be nonzero
/// on one breakpoint interval. `first` is the index (in the full, untrimmed
/// numbering) of the spline in slot 0.
#[derive(Debug, Clone)]
pub struct LocalValues {
    pub first: usize,
    pub values: Vec<f64>,
    pub derivs: Vec<f64>,
}

pub fn build_basis(order: usize, n_intervals: usize, rmax: f64, grading_ratio: f64) -> Result<BSplineBasis> {
    BSplineBasis::new(&BasisConfig {
        order,
        n_intervals,
        rmax,
        grading: grading_ratio,
    })
}

impl BSplineBasis {
    pub fn new(cfg: &BasisConfig) -> Result<Self> {
        let BasisConfig {
            order,
            n_intervals,
            rmax,
            grading,
        } = *cfg;
        if order < 2 {
            return Err(Error::InvalidConfig(format!("spline order must be >= 2, got {order}")));
        }
        if n_intervals < 4 {
            return Err(Error::InvalidConfig(format!(
                "need at least 4 intervals, got {n_intervals}"
            )));
        }
        if !(rmax > 0.0 && rmax.is_finite()) {
            return Err(Error::InvalidConfig(format!("rmax must be positive, got {rmax}")));
        }
        if !(grading >= 1.0 && grading.is_finite()) {
            return Err(Error::InvalidConfig(format!("grading ratio must be >= 1, got {grading}")));
        }

        let n = n_intervals as i32;
        let mut breakpoints: Vec<f64> = (0..=n)
            .map(|i| {
                if grading == 1.0 {
                    rmax * f64::from(i) / f64::from(n)
                } else {
                    rmax * (grading.powi(i) - 1.0) / (grading.powi(n) - 1.0)
                }
            })
            .collect();
        breakpoints[0] = 0.0;
        breakpoints[n_intervals] = rmax;
        if breakpoints.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidConfig(
                "breakpoints collapse; reduce the grading ratio".into(),
            ));
        }

        let mut knots = vec![0.0; order - 1];
        knots.extend_from_slice(&breakpoints);
        knots.extend(std::iter::repeat(rmax).take(order - 1));
        Ok(Self {
            order,
            breakpoints,
            knots,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn rmax(&self) -> f64 {
        *self.breakpoints.last().expect("nonempty")
    }

    pub fn n_intervals(&self) -> usize {
        self.breakpoints.len() - 1
    }

    /// Splines on the full knot vector, before trimming the two boundary ones.
    pub fn n_full(&self) -> usize {
        self.n_intervals() + self.order - 1
    }

    /// Number of retained basis functions.
    pub fn nfun(&self) -> usize {
        self.n_full() - 2
    }

    /// Local values and derivatives on breakpoint interval `interval` at
    /// `r`, by the Cox-de Boor recursion.
    pub fn local(&self, interval: usize, r: f64) -> LocalValues {
        let p = self.order - 1;
        let t = &self.knots;
        let span = interval + p; // t[span] <= r < t[span + 1]

        // Degree-0 up to degree-(p − 1) values, kept for the derivative.
        let mut n = vec![0.0; self.order];
        n[0] = 1.0;
        let mut lower = vec![0.0; p.max(1)];
        for d in 1..=p {
            if d == p {
                lower[..p].copy_from_slice(&n[..p]);
            }
            let mut saved = 0.0;
            for j in 0..d {
                let left = t[span + 1 + j - d];
                let right = t[span + 1 + j];
                let temp = n[j] / (right - left);
                n[j] = saved + (right - r) * temp;
                saved = (r - left) * temp;
            }
            n[d] = saved;
        }

        let mut derivs = vec![0.0; self.order];
        if p >= 1 {
            // N'_{i,p} = p·N_{i,p−1}/(t_{i+p} − t_i) − p·N_{i+1,p−1}/(t_{i+p+1} − t_{i+1})
            let first = span - p;
            for (slot, d) in derivs.iter_mut().enumerate() {
                let i = first + slot;
                let mut acc = 0.0;
                // N_{i,p−1} is slot (slot − 1) of `lower`, N_{i+1,p−1} is slot `slot`.
                if slot >= 1 {
                    let den = t[i + p] - t[i];
                    if den > 0.0 {
                        acc += p as f64 * lower[slot - 1] / den;
                    }
                }
                if slot < p {
                    let den = t[i + p + 1] - t[i + 1];
                    if den > 0.0 {
                        acc -= p as f64 * lower[slot] / den;
                    }
                }
                *d = acc;
            }
        }

        LocalValues {
            first: span - p,
            values: n,
            derivs,
        }
    }

    fn interval_of(&self, r: f64) -> Option<usize> {
        if !(0.0..=self.rmax()).contains(&r) {
            return None;
        }
        let idx = self.breakpoints.partition_point(|&b| b <= r);
        Some(idx.saturating_sub(1).min(self.n_intervals() - 1))
    }

    /// Value and derivative of retained function `j` (0-based) at `r`.
    /// Zero outside `[0, rmax]`.
    pub fn eval(&self, j: usize, r: f64) -> (f64, f64) {
        let Some(interval) = self.interval_of(r) else {
            return (0.0, 0.0);
        };
        let local = self.local(interval, r);
        let full = j + 1;
        if full < local.first || full >= local.first + self.order {
            return (0.0, 0.0);
        }
        let slot = full - local.first;
        (local.values[slot], local.derivs[slot])
    }
}
