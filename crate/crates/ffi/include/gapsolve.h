#ifndef GAPSOLVE_H
#define GAPSOLVE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes. The nonzero values from 2 to 4 match the `gapsolve` exit
 * codes.
 */
typedef enum GsStatus {
  GS_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  GS_STATUS_NULL_ARGUMENT = 1,
  /**
   * Bad dimensions, index, quantum numbers or basis settings.
   */
  GS_STATUS_INVALID_ARGUMENT = 2,
  /**
   * No eigenvalue above λ₀ at the requested index, or a shift at or below λ₀.
   */
  GS_STATUS_NO_GAP = 3,
  /**
   * Factorization, eigensolve or convergence failure.
   */
  GS_STATUS_NUMERICAL = 4,
  /**
   * A Rust panic was caught at the boundary.
   */
  GS_STATUS_PANIC = 5,
} GsStatus;

/**
 * Opaque block operator.
 */
typedef struct GsOperator GsOperator;

/**
 * Opaque result of one level solve.
 */
typedef struct GsTrace GsTrace;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. The pointer is
 * valid until the next failing call on the same thread.
 */
const char *gs_last_error(void);

/**
 * Builds an operator from dense row-major blocks: `app` and `sp` are
 * `n_plus × n_plus`, `apm` is `n_plus × n_minus`, `amm` and `sm` are
 * `n_minus × n_minus`. Null `sp` or `sm` means the identity.
 *
 * # Safety
 * Non-null array arguments must point to at least the stated number of
 * doubles. `out` must be valid for a write.
 */
enum GsStatus gs_operator_new(size_t n_plus,
                              size_t n_minus,
                              const double *app,
                              const double *apm,
                              const double *amm,
                              const double *sp,
                              const double *sm,
                              struct GsOperator **out);

/**
 * The `(−Δ, Δ)` block with `n` interior points on `[0, length]`.
 *
 * # Safety
 * `out` must be valid for a write.
 */
enum GsStatus gs_operator_toy(size_t n, double length, struct GsOperator **out);

/**
 * Radial Dirac-Coulomb channel with coupling `nu` and spin-orbit number
 * `kappa` on a B-spline basis, Talman splitting.
 *
 * # Safety
 * `out` must be valid for a write.
 */
enum GsStatus gs_operator_coulomb(double nu,
                                  int32_t kappa,
                                  size_t order,
                                  size_t n_intervals,
                                  double rmax,
                                  double grading,
                                  struct GsOperator **out);

/**
 * Releases an operator. Null is ignored.
 *
 * # Safety
 * `op` must come from a `gs_operator_*` constructor and not be used after.
 */
void gs_operator_free(struct GsOperator *op);

/**
 * # Safety
 * `op` must be a live handle; outputs must be valid for writes.
 */
enum GsStatus gs_operator_dims(const struct GsOperator *op, size_t *n_plus, size_t *n_minus);

/**
 * Supremum of the lower block.
 *
 * # Safety
 * `op` must be a live handle; `out` must be valid for a write.
 */
enum GsStatus gs_operator_lambda0(const struct GsOperator *op, double *out);

/**
 * Writes `ℓ_1(e) … ℓ_kmax(e)` into `out`.
 *
 * # Safety
 * `op` must be a live handle; `out` must hold `kmax` doubles.
 */
enum GsStatus gs_levels(const struct GsOperator *op, double e, size_t kmax, double *out);

/**
 * Solves for the k-th (1-based) eigenvalue above λ₀. NaN `e0` or `gap_edge`,
 * nonpositive `tol` and zero `maxit` select the defaults. A run that stops
 * at `maxit` still returns a trace; check [`gs_trace_converged`].
 *
 * # Safety
 * `op` must be a live handle; `out` must be valid for a write.
 */
enum GsStatus gs_solve(const struct GsOperator *op,
                       size_t k,
                       double e0,
                       double tol,
                       size_t maxit,
                       double gap_edge,
                       struct GsTrace **out);

/**
 * Releases a trace. Null is ignored.
 *
 * # Safety
 * `trace` must come from [`gs_solve`] and not be used after.
 */
void gs_trace_free(struct GsTrace *trace);

/**
 * Final eigenvalue estimate.
 *
 * # Safety
 * `trace` must be a live handle; `out` must be valid for a write.
 */
enum GsStatus gs_trace_lambda(const struct GsTrace *trace, double *out);

/**
 * # Safety
 * `trace` must be a live handle; `out` must be valid for a write.
 */
enum GsStatus gs_trace_converged(const struct GsTrace *trace, bool *out);

/**
 * # Safety
 * `trace` must be a live handle; `out` must be valid for a write.
 */
enum GsStatus gs_trace_residual(const struct GsTrace *trace, double *out);

/**
 * # Safety
 * `trace` must be a live handle; `out` must be valid for a write.
 */
enum GsStatus gs_trace_multiplicity(const struct GsTrace *trace, size_t *out);

/**
 * Number of recorded iterates.
 *
 * # Safety
 * `trace` must be a live handle; `out` must be valid for a write.
 */
enum GsStatus gs_trace_iterations(const struct GsTrace *trace, size_t *out);

/**
 * Shift and level at iterate `i` (0-based).
 *
 * # Safety
 * `trace` must be a live handle; outputs must be valid for writes.
 */
enum GsStatus gs_trace_iterate(const struct GsTrace *trace, size_t i, double *e, double *level);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GAPSOLVE_H */
