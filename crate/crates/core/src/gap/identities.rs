//! Matrix-level checks of the exact identities behind the Schur-complement
//! construction. Each returns a max-norm residual that vanishes in exact
//! arithmetic.

use nalgebra::{DMatrix, DVector};

use super::schur::{graph_map, lower_shifted, schur_pair};
use super::BlockOperator;
use crate::error::{Error, Result};
use crate::linalg::{cholesky, solve_spd, sym_generalized_eigvals, SymMatrix};

/// Residual of `⟨X,(A−E)X⟩ = q_E(x₊ + L_E x₊) − b_E(y₋ − L_E x₊)` for one
/// vector `X = (x₊, y₋)`, with `q_E` evaluated from its defining formula
/// rather than from the Schur matrix.
pub fn decomposition_residual_at(
    op: &BlockOperator,
    e: f64,
    x_plus: &DVector<f64>,
    y_minus: &DVector<f64>,
) -> Result<f64> {
    if x_plus.len() != op.n_plus() {
        return Err(Error::DimensionMismatch {
            expected: op.n_plus(),
            found: x_plus.len(),
        });
    }
    if y_minus.len() != op.n_minus() {
        return Err(Error::DimensionMismatch {
            expected: op.n_minus(),
            found: y_minus.len(),
        });
    }
    let l = graph_map(op, e)?;
    let b_e = lower_shifted(op, e);
    let upper_shifted = op.app().matrix() - op.sp().matrix() * e;

    let energy = x_plus.dot(&(&upper_shifted * x_plus))
        + 2.0 * x_plus.dot(&(op.apm() * y_minus))
        - b_e.quad_form(y_minus);
    let lx = &l * x_plus;
    let q = x_plus.dot(&(&upper_shifted * x_plus)) + b_e.quad_form(&lx);
    let z = y_minus - lx;
    Ok((energy - q + b_e.quad_form(&z)).abs())
}

/// Max of [`decomposition_residual_at`] over `trials` pseudo-random unit
/// vectors drawn from a fixed seed.
pub fn decomposition_residual(op: &BlockOperator, e: f64, trials: usize) -> Result<f64> {
    let mut rng = SplitMix64(0x5eed_0f9a9);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let mut x = DVector::from_fn(op.n_plus(), |_, _| rng.next_signed());
        let mut y = DVector::from_fn(op.n_minus(), |_, _| rng.next_signed());
        let norm = (x.norm_squared() + y.norm_squared()).sqrt().max(f64::MIN_POSITIVE);
        x /= norm;
        y /= norm;
        worst = worst.max(decomposition_residual_at(op, e, &x, &y)?);
    }
    Ok(worst)
}

/// `‖L_{E′} − L_E − (E − E′)·(E′·Sm − Amm)⁻¹·Sm·L_E‖_max`.
pub fn graph_map_identity_residual(op: &BlockOperator, e: f64, e_prime: f64) -> Result<f64> {
    let l_e = graph_map(op, e)?;
    let l_ep = graph_map(op, e_prime)?;
    let f = cholesky(&lower_shifted(op, e_prime))?;
    let correction = solve_spd(&f, &(op.sm().matrix() * &l_e))? * (e - e_prime);
    Ok((l_ep - l_e - correction).amax())
}

/// Compares `(A − E)⁻¹` against `G·T_E⁻¹·(GᵀG)⁻¹·Gᵀ − [0; I]·(E − Amm)⁻¹·[0, I]`,
/// where `G = [I; L_E]` spans the graph and `T_E` is the compression of
/// `diag(App − E, E − Amm)` onto it, in `G`-coordinates.
///
/// Requires orthonormal coordinates (`Sp = Sm = I`).
pub fn resolvent_formula_residual(op: &BlockOperator, e: f64) -> Result<f64> {
    if !op.is_orthonormal() {
        return Err(Error::NotOrthonormal);
    }
    let (np, nm) = (op.n_plus(), op.n_minus());
    let scale = op.scale();
    let full = op.full_matrix();
    let spectrum = sym_generalized_eigvals(&full, &SymMatrix::identity(np + nm))?;
    let singular_tol = 1e-12 * scale;
    if spectrum.iter().any(|&x| (x - e).abs() <= singular_tol) {
        return Err(Error::SingularShift { shift: e });
    }
    let shifted = full.matrix() - DMatrix::identity(np + nm, np + nm) * e;
    let direct = shifted
        .lu()
        .try_inverse()
        .ok_or(Error::SingularShift { shift: e })?;

    let pair = schur_pair(op, e)?;
    let mut g = DMatrix::zeros(np + nm, np);
    g.view_mut((0, 0), (np, np)).copy_from(&DMatrix::identity(np, np));
    g.view_mut((np, 0), (nm, np)).copy_from(&pair.l);

    let mut k = DMatrix::zeros(np + nm, np + nm);
    k.view_mut((0, 0), (np, np))
        .copy_from(&(op.app().matrix() - DMatrix::identity(np, np) * e));
    k.view_mut((np, np), (nm, nm))
        .copy_from(&(DMatrix::identity(nm, nm) * e - op.amm().matrix()));

    let gram = g.transpose() * &g;
    let gram_f = cholesky(&SymMatrix::symmetrized(&gram))?;
    let gram_inv_gt = solve_spd(&gram_f, &g.transpose())?;
    let t = &gram_inv_gt * &k * &g;
    let t_levels = sym_generalized_eigvals(&pair.m, &pair.n)?;
    if t_levels.iter().any(|&x| x.abs() <= singular_tol) {
        return Err(Error::SingularShift { shift: e });
    }
    let t_inv = t.lu().try_inverse().ok_or(Error::SingularShift { shift: e })?;

    let lower_f = cholesky(&lower_shifted(op, e))?;
    let b_inv = solve_spd(&lower_f, &DMatrix::identity(nm, nm))?;
    let mut formula = &g * t_inv * gram_inv_gt;
    let mut corner = formula.view_mut((np, np), (nm, nm));
    corner -= b_inv;

    Ok((direct - formula).amax())
}

/// Tiny deterministic generator so the residual helpers are reproducible
/// without pulling a RNG into the library.
struct SplitMix64(u64);

impl SplitMix64 {
    fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    fn next_signed(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
    }
}
