//! C interface to `gapsolve`.
//!
//! Operators and solve traces are opaque heap handles released with
//! [`gs_operator_free`] and [`gs_trace_free`]. Every fallible call returns a
//! [`GsStatus`]; on failure [`gs_last_error`] describes the most recent error
//! on the calling thread. Matrices are passed dense and row-major.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use gapsolve::dirac::{assemble, BasisConfig, ChannelSpec};
use gapsolve::gap::{levels, minmax_iterate, toy_laplacian_block, BlockOperator, SolveTrace, SolverOptions};
use gapsolve::linalg::SymMatrix;
use gapsolve::Error;
use nalgebra::DMatrix;

/// Result codes. The nonzero values from 2 to 4 match the `gapsolve` exit
/// codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GsStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// Bad dimensions, index, quantum numbers or basis settings.
    InvalidArgument = 2,
    /// No eigenvalue above λ₀ at the requested index, or a shift at or below λ₀.
    NoGap = 3,
    /// Factorization, eigensolve or convergence failure.
    Numerical = 4,
    /// A Rust panic was caught at the boundary.
    Panic = 5,
}

/// Opaque block operator.
pub struct GsOperator(BlockOperator);

/// Opaque result of one level solve.
pub struct GsTrace(SolveTrace);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> GsStatus {
    match err.exit_code() {
        2 => GsStatus::InvalidArgument,
        3 => GsStatus::NoGap,
        _ => GsStatus::Numerical,
    }
}

struct Fail(GsStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(name: &str) -> Fail {
    Fail(GsStatus::NullArgument, format!("{name} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> GsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GsStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside gapsolve".into());
            GsStatus::Panic
        }
    }
}

unsafe fn slice<'a>(p: *const f64, len: usize, name: &str) -> Result<&'a [f64], Fail> {
    if p.is_null() {
        return Err(null(name));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn sym(p: *const f64, n: usize, name: &str) -> Result<SymMatrix, Fail> {
    Ok(SymMatrix::from_rows(n, slice(p, n * n, name)?)?)
}

unsafe fn operator<'a>(op: *const GsOperator) -> Result<&'a BlockOperator, Fail> {
    op.as_ref().map(|o| &o.0).ok_or_else(|| null("op"))
}

unsafe fn trace<'a>(t: *const GsTrace) -> Result<&'a SolveTrace, Fail> {
    t.as_ref().map(|t| &t.0).ok_or_else(|| null("trace"))
}

unsafe fn put<T>(out: *mut T, value: T, name: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(name));
    }
    out.write(value);
    Ok(())
}

fn boxed(op: BlockOperator) -> *mut GsOperator {
    Box::into_raw(Box::new(GsOperator(op)))
}

/// Message for the last failed call on this thread, or null. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn gs_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Builds an operator from dense row-major blocks: `app` and `sp` are
/// `n_plus × n_plus`, `apm` is `n_plus × n_minus`, `amm` and `sm` are
/// `n_minus × n_minus`. Null `sp` or `sm` means the identity.
///
/// # Safety
/// Non-null array arguments must point to at least the stated number of
/// doubles. `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn gs_operator_new(
    n_plus: usize,
    n_minus: usize,
    app: *const f64,
    apm: *const f64,
    amm: *const f64,
    sp: *const f64,
    sm: *const f64,
    out: *mut *mut GsOperator,
) -> GsStatus {
    guard(|| {
        let app_m = sym(app, n_plus, "app")?;
        let apm_m = DMatrix::from_row_slice(n_plus, n_minus, slice(apm, n_plus * n_minus, "apm")?);
        let amm_m = sym(amm, n_minus, "amm")?;
        let sp_m = if sp.is_null() { SymMatrix::identity(n_plus) } else { sym(sp, n_plus, "sp")? };
        let sm_m = if sm.is_null() { SymMatrix::identity(n_minus) } else { sym(sm, n_minus, "sm")? };
        let op = BlockOperator::new(app_m, apm_m, amm_m, sp_m, sm_m)?;
        put(out, boxed(op), "out")
    })
}

/// The `(−Δ, Δ)` block with `n` interior points on `[0, length]`.
///
/// # Safety
/// `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn gs_operator_toy(n: usize, length: f64, out: *mut *mut GsOperator) -> GsStatus {
    guard(|| put(out, boxed(toy_laplacian_block(n, length)?), "out"))
}

/// Radial Dirac-Coulomb channel with coupling `nu` and spin-orbit number
/// `kappa` on a B-spline basis, Talman splitting.
///
/// # Safety
/// `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn gs_operator_coulomb(
    nu: f64,
    kappa: i32,
    order: usize,
    n_intervals: usize,
    rmax: f64,
    grading: f64,
    out: *mut *mut GsOperator,
) -> GsStatus {
    guard(|| {
        let basis = BasisConfig {
            order,
            n_intervals,
            rmax,
            grading,
        };
        let op = assemble(&ChannelSpec::coulomb(nu, kappa, basis))?;
        put(out, boxed(op), "out")
    })
}

/// Releases an operator. Null is ignored.
///
/// # Safety
/// `op` must come from a `gs_operator_*` constructor and not be used after.
#[no_mangle]
pub unsafe extern "C" fn gs_operator_free(op: *mut GsOperator) {
    if !op.is_null() {
        drop(Box::from_raw(op));
    }
}

/// # Safety
/// `op` must be a live handle; outputs must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gs_operator_dims(
    op: *const GsOperator,
    n_plus: *mut usize,
    n_minus: *mut usize,
) -> GsStatus {
    guard(|| {
        let op = operator(op)?;
        put(n_plus, op.n_plus(), "n_plus")?;
        put(n_minus, op.n_minus(), "n_minus")
    })
}

/// Supremum of the lower block.
///
/// # Safety
/// `op` must be a live handle; `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn gs_operator_lambda0(op: *const GsOperator, out: *mut f64) -> GsStatus {
    guard(|| put(out, operator(op)?.lambda0(), "out"))
}

/// Writes `ℓ_1(e) … ℓ_kmax(e)` into `out`.
///
/// # Safety
/// `op` must be a live handle; `out` must hold `kmax` doubles.
#[no_mangle]
pub unsafe extern "C" fn gs_levels(op: *const GsOperator, e: f64, kmax: usize, out: *mut f64) -> GsStatus {
    guard(|| {
        let op = operator(op)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let values = levels(op, e, kmax)?;
        ptr::copy_nonoverlapping(values.as_ptr(), out, values.len());
        Ok(())
    })
}

/// Solves for the k-th (1-based) eigenvalue above λ₀. NaN `e0` or `gap_edge`,
/// nonpositive `tol` and zero `maxit` select the defaults. A run that stops
/// at `maxit` still returns a trace; check [`gs_trace_converged`].
///
/// # Safety
/// `op` must be a live handle; `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn gs_solve(
    op: *const GsOperator,
    k: usize,
    e0: f64,
    tol: f64,
    maxit: usize,
    gap_edge: f64,
    out: *mut *mut GsTrace,
) -> GsStatus {
    guard(|| {
        let op = operator(op)?;
        let mut opts = SolverOptions::default();
        if !e0.is_nan() {
            opts = opts.with_e0(e0);
        }
        if tol > 0.0 {
            opts = opts.with_tol(tol);
        }
        if maxit > 0 {
            opts = opts.with_maxit(maxit);
        }
        if !gap_edge.is_nan() {
            opts = opts.with_gap_edge(gap_edge);
        }
        let t = minmax_iterate(op, k, &opts)?;
        put(out, Box::into_raw(Box::new(GsTrace(t))), "out")
    })
}

/// Releases a trace. Null is ignored.
///
/// # Safety
/// `trace` must come from [`gs_solve`] and not be used after.
#[no_mangle]
pub unsafe extern "C" fn gs_trace_free(trace: *mut GsTrace) {
    if !trace.is_null() {
        drop(Box::from_raw(trace));
    }
}

/// Final eigenvalue estimate.
///
/// # Safety
/// `trace` must be a live handle; `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn gs_trace_lambda(trace: *const GsTrace, out: *mut f64) -> GsStatus {
    guard(|| put(out, self::trace(trace)?.lambda, "out"))
}

/// # Safety
/// `trace` must be a live handle; `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn gs_trace_converged(trace: *const GsTrace, out: *mut bool) -> GsStatus {
    guard(|| put(out, self::trace(trace)?.converged, "out"))
}

/// # Safety
/// `trace` must be a live handle; `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn gs_trace_residual(trace: *const GsTrace, out: *mut f64) -> GsStatus {
    guard(|| put(out, self::trace(trace)?.residual, "out"))
}

/// # Safety
/// `trace` must be a live handle; `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn gs_trace_multiplicity(trace: *const GsTrace, out: *mut usize) -> GsStatus {
    guard(|| put(out, self::trace(trace)?.multiplicity, "out"))
}

/// Number of recorded iterates.
///
/// # Safety
/// `trace` must be a live handle; `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn gs_trace_iterations(trace: *const GsTrace, out: *mut usize) -> GsStatus {
    guard(|| put(out, self::trace(trace)?.iterations(), "out"))
}

/// Shift and level at iterate `i` (0-based).
///
/// # Safety
/// `trace` must be a live handle; outputs must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gs_trace_iterate(
    trace: *const GsTrace,
    i: usize,
    e: *mut f64,
    level: *mut f64,
) -> GsStatus {
    guard(|| {
        let t = self::trace(trace)?;
        let it = t.iterates.get(i).ok_or_else(|| {
            Fail(
                GsStatus::InvalidArgument,
                format!("iterate {i} out of range 0..{}", t.iterates.len()),
            )
        })?;
        put(e, it.e, "e")?;
        put(level, it.level, "level")
    })
}
