#ifndef MINIMAX_BOUNDARY_H
#define MINIMAX_BOUNDARY_H

/* Generated by cbindgen from the minimax-boundary-ffi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Outcome of a fallible call. Everything except `Ok` leaves the
 out-parameters untouched.
 */
typedef enum MbStatus {
  /*
   The call succeeded.
   */
  MB_STATUS_OK = 0,
  /*
   A required pointer argument was null.
   */
  MB_STATUS_NULL_POINTER = 1,
  /*
   A numeric argument was outside its documented domain.
   */
  MB_STATUS_INVALID_ARGUMENT = 2,
  /*
   An internal search failed to converge or bracket.
   */
  MB_STATUS_SOLVE_FAILURE = 3,
  /*
   A panic was caught at the language boundary.
   */
  MB_STATUS_PANIC = 4,
} MbStatus;

/*
 Opaque handle to a minimax kernel plus its risk accounting. Create with
 `mb_kernel_create`, release with `mb_kernel_free`.
 */
typedef struct MbKernel MbKernel;

/*
 Opaque handle to a solved model. Create with `mb_model_solve`, release
 with `mb_model_free`.
 */
typedef struct MbModel MbModel;

/*
 The solved constants at unit noise and unit curvature bound.
 */
typedef struct MbConstants {
  /*
   First knot of the interior oscillating solution.
   */
  double k0;
  /*
   Squared norm of the interior solution.
   */
  double i0_norm_sq;
  /*
   Optimal junction depth of the boundary family (negative).
   */
  double y_star;
  /*
   Squared norm of the optimal boundary solution.
   */
  double i_star;
  /*
   Initial slope of the optimal boundary solution.
   */
  double f_prime0;
  /*
   Support end according to the displayed closed form.
   */
  double t_bar_display;
  /*
   Support end according to the knot recursion sum.
   */
  double t_bar_recursion;
} MbConstants;

/*
 Kernel summary: shape parameters and exact risk split.
 */
typedef struct MbKernelInfo {
  /*
   Value at the origin (one-sided limit from the right).
   */
  double amplitude;
  /*
   Time rescaling of the base shape.
   */
  double time_rescale;
  /*
   The kernel vanishes beyond this point (per side).
   */
  double support_end;
  /*
   Squared L2 norm over the whole axis.
   */
  double norm_sq;
  /*
   Nonzero when the kernel is the antisymmetric two-sided variant.
   */
  uint8_t antisymmetric;
  /*
   Worst-case mean squared error of the estimator.
   */
  double risk;
  /*
   Worst-case squared bias (exactly risk / 5).
   */
  double bias_sq;
  /*
   Estimator variance (exactly 4 risk / 5).
   */
  double variance;
  /*
   Norm budget of the hardest perturbation.
   */
  double b_star;
  /*
   Size of the hardest perturbation (2 sigma).
   */
  double delta_star;
} MbKernelInfo;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Solves the model and writes a heap-allocated handle to `out`.

 # Safety
 `out` must be a valid pointer to writable memory for one pointer.
 */
enum MbStatus mb_model_solve(struct MbModel **out);

/*
 Releases a handle from `mb_model_solve`. Passing null is a no-op.

 # Safety
 `model` must be null or a pointer previously returned by
 `mb_model_solve` that has not been freed yet.
 */
void mb_model_free(struct MbModel *model);

/*
 Copies the solved constants into `out`.

 # Safety
 `model` must be a live handle from `mb_model_solve`; `out` must point to
 writable memory for one `MbConstants`.
 */
enum MbStatus mb_model_constants(const struct MbModel *model, struct MbConstants *out);

/*
 Evaluates the unit-scale least favorable function at `t >= 0`.

 # Safety
 `model` must be a live handle from `mb_model_solve`; `out` must point to
 writable memory for one `double`.
 */
enum MbStatus mb_model_eval_shape(const struct MbModel *model, double t, double *out);

/*
 Builds the minimax kernel for noise level `sigma` and curvature bound
 `c`; `antisymmetric != 0` selects the two-sided jump variant. Writes a
 heap-allocated handle to `out`.

 # Safety
 `model` must be a live handle from `mb_model_solve`; `out` must be a
 valid pointer to writable memory for one pointer.
 */
enum MbStatus mb_kernel_create(const struct MbModel *model,
                               double sigma,
                               double c,
                               uint8_t antisymmetric,
                               struct MbKernel **out);

/*
 Releases a handle from `mb_kernel_create`. Passing null is a no-op.

 # Safety
 `kernel` must be null or a pointer previously returned by
 `mb_kernel_create` that has not been freed yet.
 */
void mb_kernel_free(struct MbKernel *kernel);

/*
 Copies the kernel summary into `out`.

 # Safety
 `kernel` must be a live handle from `mb_kernel_create`; `out` must point
 to writable memory for one `MbKernelInfo`.
 */
enum MbStatus mb_kernel_info(const struct MbKernel *kernel, struct MbKernelInfo *out);

/*
 Evaluates the kernel at `t`. Negative `t` is valid: the one-sided kernel
 is zero there and the two-sided kernel is its own mirror image negated.

 # Safety
 `kernel` must be a live handle from `mb_kernel_create`; `out` must point
 to writable memory for one `double`.
 */
enum MbStatus mb_kernel_eval(const struct MbKernel *kernel, double t, double *out);

/*
 Applies the estimator to observed increments on a uniform grid of cell
 start times: the weighted sum approximating the stochastic integral.
 The grid must cover the kernel support (both sides for the two-sided
 kernel) and, for the one-sided kernel, start at zero.

 # Safety
 `kernel` must be a live handle from `mb_kernel_create`; `times` and
 `increments` must point to `len` readable doubles each; `out` must point
 to writable memory for one `double`.
 */
enum MbStatus mb_apply_estimator(const struct MbKernel *kernel,
                                 const double *times,
                                 const double *increments,
                                 size_t len,
                                 double *out);

/*
 Exact mean squared error of the kernel's estimator at the signal
 `f(t) = value + slope t + curvature t^2 / 2` truncated at `cut`, with
 `f(0) = value` as the estimand. One-sided kernels only.

 # Safety
 `kernel` must be a live handle from `mb_kernel_create`; `out` must point
 to writable memory for one `double`.
 */
enum MbStatus mb_analytic_mse_quadratic(const struct MbKernel *kernel,
                                        double value,
                                        double slope,
                                        double curvature,
                                        double cut,
                                        double *out);

/*
 Returns a static, nul-terminated description of a status code.
 */
const char *mb_status_message(enum MbStatus status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MINIMAX_BOUNDARY_H */
