use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;

use super::bspline::BSplineBasis;

/// A quadrature node on breakpoint interval `interval`.
#[derive(Debug, Clone, Copy)]
pub struct QuadPoint {
    pub interval: usize,
    pub r: f64,
    pub weight: f64,
}

/// Gauss-Legendre nodes with `order + 4` points per breakpoint interval. The
/// interval touching the origin is split in two.
pub fn quadrature_points(basis: &BSplineBasis) -> Vec<QuadPoint> {
    let npts = NonZeroUsize::new(basis.order() + 4).expect("order + 4 > 0");
    let rule = GaussLegendre::new(npts);
    let pairs = rule.as_node_weight_pairs();
    let bp = basis.breakpoints();
    let mut out = Vec::with_capacity((bp.len() + 1) * pairs.len());
    for interval in 0..basis.n_intervals() {
        let (a, b) = (bp[interval], bp[interval + 1]);
        let mid = 0.5 * (a + b);
        let pieces: &[(f64, f64)] = if interval == 0 { &[(a, mid), (mid, b)] } else { &[(a, b)] };
        for &(lo, hi) in pieces {
            let half = 0.5 * (hi - lo);
            let center = 0.5 * (hi + lo);
            out.extend(pairs.iter().map(|&(x, w)| QuadPoint {
                interval,
                r: center + half * x,
                weight: half * w,
            }));
        }
    }
    out
}
