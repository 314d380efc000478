use nalgebra::DMatrix;

use super::{BlockOperator, CHECK_TOL, GAP_EPS};
use crate::error::{Error, Result};
use crate::linalg::{cholesky, solve_spd, sym_generalized_eigvals, SymMatrix};

/// The pencil `(M, N)` whose generalized eigenvalues are the min-max levels
/// `ℓ_k(E)`, together with the graph map `L` it was built from.
///
/// For `x₊` in upper coordinates, `x₊ᵀ·M·x₊` is the Schur-complement form
/// `q_E(x₊ + L·x₊)` and `x₊ᵀ·N·x₊` is the squared norm of that graph vector.
#[derive(Debug, Clone)]
pub struct SchurPair {
    pub shift: f64,
    pub m: SymMatrix,
    pub n: SymMatrix,
    pub l: DMatrix<f64>,
}

/// `E·Sm − Amm`, the matrix of `b_E`.
pub(crate) fn lower_shifted(op: &BlockOperator, e: f64) -> SymMatrix {
    SymMatrix::from_lower(op.sm().matrix() * e - op.amm().matrix())
}

fn check_shift(op: &BlockOperator, e: f64) -> Result<()> {
    let margin = GAP_EPS * op.scale();
    if !(e > op.lambda0() + margin) {
        return Err(Error::ShiftBelowLambda0 {
            shift: e,
            lambda0: op.lambda0(),
            margin,
        });
    }
    Ok(())
}

/// Graph map `L_E = (E·Sm − Amm)⁻¹·Apmᵀ`, mapping upper coordinates to the
/// lower coordinates of the maximizer.
pub fn graph_map(op: &BlockOperator, e: f64) -> Result<DMatrix<f64>> {
    check_shift(op, e)?;
    let f = cholesky(&lower_shifted(op, e)).map_err(|_| Error::ShiftBelowLambda0 {
        shift: e,
        lambda0: op.lambda0(),
        margin: GAP_EPS * op.scale(),
    })?;
    solve_spd(&f, &op.apm().transpose())
}

pub fn schur_pair(op: &BlockOperator, e: f64) -> Result<SchurPair> {
    let l = graph_map(op, e)?;
    let m = op.app().matrix() - op.sp().matrix() * e + op.apm() * &l;
    let n = op.sp().matrix() + l.transpose() * op.sm().matrix() * &l;
    Ok(SchurPair {
        shift: e,
        m: SymMatrix::symmetrized(&m),
        n: SymMatrix::symmetrized(&n),
        l,
    })
}

/// All levels `ℓ₁(E) ≤ … ≤ ℓ_{n₊}(E)`.
pub fn all_levels(op: &BlockOperator, e: f64) -> Result<Vec<f64>> {
    let pair = schur_pair(op, e)?;
    sym_generalized_eigvals(&pair.m, &pair.n)
}

/// The `kmax` smallest levels at shift `e`, ascending.
pub fn levels(op: &BlockOperator, e: f64, kmax: usize) -> Result<Vec<f64>> {
    if kmax > op.n_plus() {
        return Err(Error::KTooLarge {
            k: kmax,
            max: op.n_plus(),
        });
    }
    let mut all = all_levels(op, e)?;
    all.truncate(kmax);
    Ok(all)
}

/// The single level `ℓ_k(E)` (1-based `k`).
pub fn level(op: &BlockOperator, e: f64, k: usize) -> Result<f64> {
    if k == 0 || k > op.n_plus() {
        return Err(Error::KTooLarge {
            k,
            max: op.n_plus(),
        });
    }
    Ok(all_levels(op, e)?[k - 1])
}

/// Certifies `λ_{k0} ≥ E0` by checking `ℓ_{k0}(E0) ≥ −check_tol`.
pub fn verify_gap(op: &BlockOperator, k0: usize, e0: f64) -> Result<bool> {
    let value = level(op, e0, k0)?;
    Ok(value >= -CHECK_TOL * op.scale())
}
