//! C ABI for the minimax boundary estimator.
//!
//! The surface follows the usual handle pattern: `mb_model_solve` and
//! `mb_kernel_create` hand out opaque pointers that the caller must release
//! with the matching `_free`, every fallible call returns an [`MbStatus`],
//! and results travel through out-parameters. Panics never cross the
//! boundary; they surface as [`MbStatus::Panic`].

use std::ffi::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};

use minimax_boundary::kernel_risk::{
    analytic_risk as core_analytic_risk, apply_estimator, boundary_kernel, minimax_risk,
    rd_kernel, rd_minimax_risk, KernelSide, KernelSpec, NoiseModel, RiskReport,
};
use minimax_boundary::{Error, Model, SmoothnessParams};

/// Outcome of a fallible call. Everything except `Ok` leaves the
/// out-parameters untouched.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum MbStatus {
    /// The call succeeded.
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// A numeric argument was outside its documented domain.
    InvalidArgument = 2,
    /// An internal search failed to converge or bracket.
    SolveFailure = 3,
    /// A panic was caught at the language boundary.
    Panic = 4,
}

impl From<&Error> for MbStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::InvalidParameter { .. }
            | Error::Coverage { .. }
            | Error::NonUniformGrid { .. }
            | Error::Configuration(_) => MbStatus::InvalidArgument,
            Error::BracketingFailure { .. }
            | Error::BisectionBracket { .. }
            | Error::NonConvergence { .. } => MbStatus::SolveFailure,
        }
    }
}

/// Opaque handle to a solved model. Create with `mb_model_solve`, release
/// with `mb_model_free`.
pub struct MbModel {
    inner: Model,
}

/// Opaque handle to a minimax kernel plus its risk accounting. Create with
/// `mb_kernel_create`, release with `mb_kernel_free`.
pub struct MbKernel {
    spec: KernelSpec,
    report: RiskReport,
}

/// The solved constants at unit noise and unit curvature bound.
#[repr(C)]
#[derive(Clone, Copy)]
pub struct MbConstants {
    /// First knot of the interior oscillating solution.
    pub k0: f64,
    /// Squared norm of the interior solution.
    pub i0_norm_sq: f64,
    /// Optimal junction depth of the boundary family (negative).
    pub y_star: f64,
    /// Squared norm of the optimal boundary solution.
    pub i_star: f64,
    /// Initial slope of the optimal boundary solution.
    pub f_prime0: f64,
    /// Support end according to the displayed closed form.
    pub t_bar_display: f64,
    /// Support end according to the knot recursion sum.
    pub t_bar_recursion: f64,
}

/// Kernel summary: shape parameters and exact risk split.
#[repr(C)]
#[derive(Clone, Copy)]
pub struct MbKernelInfo {
    /// Value at the origin (one-sided limit from the right).
    pub amplitude: f64,
    /// Time rescaling of the base shape.
    pub time_rescale: f64,
    /// The kernel vanishes beyond this point (per side).
    pub support_end: f64,
    /// Squared L2 norm over the whole axis.
    pub norm_sq: f64,
    /// Nonzero when the kernel is the antisymmetric two-sided variant.
    pub antisymmetric: u8,
    /// Worst-case mean squared error of the estimator.
    pub risk: f64,
    /// Worst-case squared bias (exactly risk / 5).
    pub bias_sq: f64,
    /// Estimator variance (exactly 4 risk / 5).
    pub variance: f64,
    /// Norm budget of the hardest perturbation.
    pub b_star: f64,
    /// Size of the hardest perturbation (2 sigma).
    pub delta_star: f64,
}

fn guarded(f: impl FnOnce() -> MbStatus) -> MbStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or(MbStatus::Panic)
}

/// Solves the model and writes a heap-allocated handle to `out`.
///
/// # Safety
/// `out` must be a valid pointer to writable memory for one pointer.
#[no_mangle]
pub unsafe extern "C" fn mb_model_solve(out: *mut *mut MbModel) -> MbStatus {
    if out.is_null() {
        return MbStatus::NullPointer;
    }
    guarded(|| match Model::solve() {
        Ok(model) => {
            unsafe { *out = Box::into_raw(Box::new(MbModel { inner: model })) };
            MbStatus::Ok
        }
        Err(e) => MbStatus::from(&e),
    })
}

/// Releases a handle from `mb_model_solve`. Passing null is a no-op.
///
/// # Safety
/// `model` must be null or a pointer previously returned by
/// `mb_model_solve` that has not been freed yet.
#[no_mangle]
pub unsafe extern "C" fn mb_model_free(model: *mut MbModel) {
    if !model.is_null() {
        drop(unsafe { Box::from_raw(model) });
    }
}

/// Copies the solved constants into `out`.
///
/// # Safety
/// `model` must be a live handle from `mb_model_solve`; `out` must point to
/// writable memory for one `MbConstants`.
#[no_mangle]
pub unsafe extern "C" fn mb_model_constants(
    model: *const MbModel,
    out: *mut MbConstants,
) -> MbStatus {
    if model.is_null() || out.is_null() {
        return MbStatus::NullPointer;
    }
    let k = unsafe { &(*model).inner.constants };
    unsafe {
        *out = MbConstants {
            k0: k.k0,
            i0_norm_sq: k.i0_norm_sq,
            y_star: k.y_star,
            i_star: k.i_star,
            f_prime0: k.f_prime0,
            t_bar_display: k.t_bar_display,
            t_bar_recursion: k.t_bar_recursion,
        };
    }
    MbStatus::Ok
}

/// Evaluates the unit-scale least favorable function at `t >= 0`.
///
/// # Safety
/// `model` must be a live handle from `mb_model_solve`; `out` must point to
/// writable memory for one `double`.
#[no_mangle]
pub unsafe extern "C" fn mb_model_eval_shape(
    model: *const MbModel,
    t: f64,
    out: *mut f64,
) -> MbStatus {
    if model.is_null() || out.is_null() {
        return MbStatus::NullPointer;
    }
    if !(t >= 0.0 && t.is_finite()) {
        return MbStatus::InvalidArgument;
    }
    guarded(|| {
        let value = unsafe { (*model).inner.boundary.shape.eval(t) };
        unsafe { *out = value };
        MbStatus::Ok
    })
}

/// Builds the minimax kernel for noise level `sigma` and curvature bound
/// `c`; `antisymmetric != 0` selects the two-sided jump variant. Writes a
/// heap-allocated handle to `out`.
///
/// # Safety
/// `model` must be a live handle from `mb_model_solve`; `out` must be a
/// valid pointer to writable memory for one pointer.
#[no_mangle]
pub unsafe extern "C" fn mb_kernel_create(
    model: *const MbModel,
    sigma: f64,
    c: f64,
    antisymmetric: u8,
    out: *mut *mut MbKernel,
) -> MbStatus {
    if model.is_null() || out.is_null() {
        return MbStatus::NullPointer;
    }
    guarded(|| {
        let noise = match NoiseModel::new(sigma) {
            Ok(n) => n,
            Err(e) => return MbStatus::from(&e),
        };
        let params = match SmoothnessParams::new(c) {
            Ok(p) => p,
            Err(e) => return MbStatus::from(&e),
        };
        let inner = unsafe { &(*model).inner };
        let (spec, report) = if antisymmetric != 0 {
            (
                rd_kernel(inner, &noise, &params),
                rd_minimax_risk(inner, &noise, &params),
            )
        } else {
            (
                boundary_kernel(inner, &noise, &params),
                minimax_risk(inner, &noise, &params),
            )
        };
        unsafe { *out = Box::into_raw(Box::new(MbKernel { spec, report })) };
        MbStatus::Ok
    })
}

/// Releases a handle from `mb_kernel_create`. Passing null is a no-op.
///
/// # Safety
/// `kernel` must be null or a pointer previously returned by
/// `mb_kernel_create` that has not been freed yet.
#[no_mangle]
pub unsafe extern "C" fn mb_kernel_free(kernel: *mut MbKernel) {
    if !kernel.is_null() {
        drop(unsafe { Box::from_raw(kernel) });
    }
}

/// Copies the kernel summary into `out`.
///
/// # Safety
/// `kernel` must be a live handle from `mb_kernel_create`; `out` must point
/// to writable memory for one `MbKernelInfo`.
#[no_mangle]
pub unsafe extern "C" fn mb_kernel_info(
    kernel: *const MbKernel,
    out: *mut MbKernelInfo,
) -> MbStatus {
    if kernel.is_null() || out.is_null() {
        return MbStatus::NullPointer;
    }
    guarded(|| {
        let k = unsafe { &*kernel };
        unsafe {
            *out = MbKernelInfo {
                amplitude: k.spec.amplitude,
                time_rescale: k.spec.time_rescale,
                support_end: k.spec.support_end(),
                norm_sq: k.spec.norm_sq(),
                antisymmetric: u8::from(k.spec.side == KernelSide::RdAntisymmetric),
                risk: k.report.risk,
                bias_sq: k.report.bias_sq,
                variance: k.report.variance,
                b_star: k.report.b_star,
                delta_star: k.report.delta_star,
            };
        }
        MbStatus::Ok
    })
}

/// Evaluates the kernel at `t`. Negative `t` is valid: the one-sided kernel
/// is zero there and the two-sided kernel is its own mirror image negated.
///
/// # Safety
/// `kernel` must be a live handle from `mb_kernel_create`; `out` must point
/// to writable memory for one `double`.
#[no_mangle]
pub unsafe extern "C" fn mb_kernel_eval(
    kernel: *const MbKernel,
    t: f64,
    out: *mut f64,
) -> MbStatus {
    if kernel.is_null() || out.is_null() {
        return MbStatus::NullPointer;
    }
    if !t.is_finite() {
        return MbStatus::InvalidArgument;
    }
    guarded(|| {
        let value = unsafe { (*kernel).spec.eval(t) };
        unsafe { *out = value };
        MbStatus::Ok
    })
}

/// Applies the estimator to observed increments on a uniform grid of cell
/// start times: the weighted sum approximating the stochastic integral.
/// The grid must cover the kernel support (both sides for the two-sided
/// kernel) and, for the one-sided kernel, start at zero.
///
/// # Safety
/// `kernel` must be a live handle from `mb_kernel_create`; `times` and
/// `increments` must point to `len` readable doubles each; `out` must point
/// to writable memory for one `double`.
#[no_mangle]
pub unsafe extern "C" fn mb_apply_estimator(
    kernel: *const MbKernel,
    times: *const f64,
    increments: *const f64,
    len: usize,
    out: *mut f64,
) -> MbStatus {
    if kernel.is_null() || times.is_null() || increments.is_null() || out.is_null() {
        return MbStatus::NullPointer;
    }
    if len == 0 {
        return MbStatus::InvalidArgument;
    }
    guarded(|| {
        let times = unsafe { std::slice::from_raw_parts(times, len) };
        let increments = unsafe { std::slice::from_raw_parts(increments, len) };
        match apply_estimator(unsafe { &(*kernel).spec }, times, increments) {
            Ok(value) => {
                unsafe { *out = value };
                MbStatus::Ok
            }
            Err(e) => MbStatus::from(&e),
        }
    })
}

/// Exact mean squared error of the kernel's estimator at the signal
/// `f(t) = value + slope t + curvature t^2 / 2` truncated at `cut`, with
/// `f(0) = value` as the estimand. One-sided kernels only.
///
/// # Safety
/// `kernel` must be a live handle from `mb_kernel_create`; `out` must point
/// to writable memory for one `double`.
#[no_mangle]
pub unsafe extern "C" fn mb_analytic_mse_quadratic(
    kernel: *const MbKernel,
    value: f64,
    slope: f64,
    curvature: f64,
    cut: f64,
    out: *mut f64,
) -> MbStatus {
    if kernel.is_null() || out.is_null() {
        return MbStatus::NullPointer;
    }
    if ![value, slope, curvature, cut].iter().all(|x| x.is_finite()) || cut <= 0.0 {
        return MbStatus::InvalidArgument;
    }
    guarded(|| {
        let k = unsafe { &*kernel };
        if k.spec.side != KernelSide::Boundary {
            return MbStatus::InvalidArgument;
        }
        let piece = minimax_boundary::piecewise::Piece {
            value,
            slope,
            curvature,
        };
        let shape = match minimax_boundary::piecewise::PiecewiseQuadratic::new(
            vec![0.0, cut],
            vec![piece],
            0.0,
        ) {
            Ok(s) => s,
            Err(e) => return MbStatus::from(&e),
        };
        let noise = match NoiseModel::new(k.report.sigma) {
            Ok(n) => n,
            Err(e) => return MbStatus::from(&e),
        };
        let mse = core_analytic_risk(&k.spec, &shape, value, &noise).mse;
        unsafe { *out = mse };
        MbStatus::Ok
    })
}

/// Returns a static, nul-terminated description of a status code.
#[no_mangle]
pub extern "C" fn mb_status_message(status: MbStatus) -> *const c_char {
    let message: &'static [u8] = match status {
        MbStatus::Ok => b"ok\0",
        MbStatus::NullPointer => b"a required pointer argument was null\0",
        MbStatus::InvalidArgument => b"an argument was outside its documented domain\0",
        MbStatus::SolveFailure => b"an internal search failed to converge\0",
        MbStatus::Panic => b"a panic was caught at the language boundary\0",
    };
    message.as_ptr().cast()
}
