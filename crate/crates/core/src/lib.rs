//! Minimax linear estimation of f(0) at the boundary of [0, inf) in the
//! Gaussian white-noise model, over the class of functions whose second
//! derivative is bounded by a constant C.
//!
//! The library solves the two scalar minimizations that pin down the
//! least-favorable function, builds that function exactly as a piecewise
//! quadratic, assembles the optimal kernel and its minimax risk in closed
//! form, and extends both to the two-sided regression-discontinuity (RD)
//! setting where the target is the jump f_plus(0) - f_minus(0).
//!
//! Every closed form is backed by an independent numerical witness:
//! [`oracle`] re-solves the underlying variational problem as a
//! box-constrained quadratic program on a grid, and [`simulator`] checks the
//! estimators by reproducible Monte Carlo on synthetic noise paths.
//!
//! Entry points:
//! - [`least_favorable::Model::solve`] solves everything once and bundles the
//!   constants with the constructed solutions.
//! - [`kernel_risk::boundary_kernel`] / [`kernel_risk::rd_kernel`] assemble
//!   the optimal kernels; [`kernel_risk::apply_estimator`] applies them to
//!   observed increments.
//! - [`oracle::run_battery`] runs the full verification battery.
//! - [`simulator::monte_carlo_risk`] / [`simulator::rd_monte_carlo`] estimate
//!   mean squared error empirically.

pub mod kernel_risk;
pub mod least_favorable;
pub mod oracle;
pub mod piecewise;
pub mod report;
mod rng;
pub mod scalar;
pub mod simulator;
pub mod tolerances;

/// Errors surfaced by solvers, constructors, and estimator plumbing.
///
/// Numeric routines whose preconditions are caller contracts (documented
/// `pre:` bullets with no declared failure mode) assert instead; everything
/// that can fail on legitimate input reports through this enum.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{name} must be {requirement}, got {value}")]
    InvalidParameter {
        name: &'static str,
        requirement: &'static str,
        value: f64,
    },
    /// A scalar search ended glued to a bracket endpoint, which means the
    /// objective was not unimodal on the supplied bracket (or the bracket is
    /// wrong). Never silently falls back.
    #[error("objective not unimodal on [{lo}, {hi}]: search stopped at endpoint {at}")]
    BracketingFailure { lo: f64, hi: f64, at: f64 },
    /// A root bisection was handed a bracket without a sign change.
    #[error("bisection bracket [{lo}, {hi}] does not straddle a sign change (f(lo)={f_lo:.3e}, f(hi)={f_hi:.3e})")]
    BisectionBracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },
    /// The projected-gradient solve failed its plateau test at the iteration
    /// cap. Carries the last iterate so callers can inspect how far it got.
    #[error("solver did not converge: relative objective change {rel_change:.3e} > tol {tol:.3e} after {iterations} iterations")]
    NonConvergence {
        rel_change: f64,
        tol: f64,
        iterations: u64,
        last: Box<oracle::OracleResult>,
    },
    /// Increment data does not cover the kernel support.
    #[error("grid does not cover the kernel support: need coverage to {needed}, got {got}")]
    Coverage { needed: f64, got: f64 },
    /// Estimators only accept uniform grids.
    #[error("grid is not uniform at index {index}: expected time {expected}, got {got}")]
    NonUniformGrid {
        index: usize,
        expected: f64,
        got: f64,
    },
    /// Kernel side and data layout disagree (e.g. an antisymmetric kernel fed
    /// a one-sided path).
    #[error("estimator configuration mismatch: {0}")]
    Configuration(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub use least_favorable::{
    BoundarySolution, InteriorSolution, Model, ScaledSolution, SmoothnessParams,
    SolutionConstants,
};
