//! Centralized numeric tolerances.
//!
//! Every magnitude below is justified where it is defined; tests and solvers
//! reference these constants instead of sprinkling literals.

/// C1 gluing: value and slope mismatches allowed at interior knots of a
/// constructed piecewise quadratic. Construction is exact up to rounding of
/// the polynomial recurrences, so anything beyond ~1e-12 would indicate a
/// logic error; 1e-9 is the contractual bound.
pub const C1_GLUING: f64 = 1e-9;

/// Slack on the curvature bound |f''| <= 1 (or <= C after scaling). The
/// curvatures are stored exactly, so this only absorbs scaling round-off.
pub const CURVATURE_SLACK: f64 = 1e-12;

/// Default truncation of the interior knot recursion: stop once both the next
/// piece's extremum amplitude and the junction slope fall below this. The
/// slope shrinks by q ~ 0.242 per piece, so ~21 pieces reach 1e-12 and the
/// final clamp-to-zero discontinuity stays below the C1 bound.
pub const DEFAULT_TRUNCATION: f64 = 1e-12;

/// Default argmin accuracy for the two scalar solves. Derivative-free
/// minimization of a smooth objective cannot localize an argmin much better
/// than sqrt(machine-eps) ~ 1.5e-8 anyway; requesting 1e-10 lets the bracket
/// shrink to that floor. Objective VALUES at the argmin are flat to O(eps).
pub const DEFAULT_SEARCH: f64 = 1e-10;

/// Closed form vs. independent quadrature of the same integral.
pub const QUADRATURE_AGREEMENT: f64 = 1e-6;

/// Relative agreement of the exact-integration norm with the scaling law
/// |b|^{5/2} C^{-1/2} I*.
pub const SCALING_LAW_REL: f64 = 1e-6;

/// Relative agreement of the closed-form kernel with its assembled
/// counterpart b(d*)/(sigma^2 + d*^2) . f*_{b(d*),C}, measured against the
/// kernel amplitude (the natural scale; both sides vanish at the support end).
pub const KERNEL_ASSEMBLY_REL: f64 = 1e-10;

/// Relative agreement of the analytic bias^2 + variance decomposition at the
/// least favorable function with the closed-form minimax risk.
pub const RISK_DECOMPOSITION_REL: f64 = 1e-9;

/// Two computations of the RD norm identity (odd-pair norm vs. closed form)
/// share every input, so they must agree to near machine precision.
pub const RD_IDENTITY_REL: f64 = 1e-12;

/// Uniform-grid check inside `apply_estimator`: relative deviation of each
/// step from the first step.
pub const GRID_UNIFORMITY_REL: f64 = 1e-8;

/// Default oracle QP stopping tolerance for acceptance-grade runs. The
/// projected-gradient stop fires around 4e5 iterations at N=4000 and leaves
/// the objective within ~3e-7 of the true discrete minimum.
pub const ORACLE_DEEP_TOL: f64 = 1e-9;

/// Iteration cap paired with [`ORACLE_DEEP_TOL`].
pub const ORACLE_DEEP_MAX_ITERS: u64 = 1_500_000;

/// Fraction of the curvature bound a cell must reach to count as an active
/// constraint when measuring bang-bang behaviour.
pub const ACTIVITY_FRACTION: f64 = 0.999;

/// Default support read-off threshold, relative to |f(0)|: below the grid
/// discretization noise at N=4000 but above solver noise.
pub const SUPPORT_THRESHOLD_REL: f64 = 1e-4;
