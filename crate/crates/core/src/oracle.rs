//! Independent verification by direct discretized optimization.
//!
//! Everything else in this crate leans on closed-form algebra. This module
//! re-derives the key quantities the slow way: minimize the squared L2 norm
//! over curvature-bounded functions on a finite grid and compare. The
//! discretized problem parametrizes a function by its initial slope v0 and a
//! per-cell curvature u_j clamped to [-C, C]; integrating twice gives the
//! grid values, the trapezoid rule gives the objective, and an accelerated
//! projected-gradient loop (constant step 1/L, L from a power iteration)
//! gives the minimizer. The curvature box is the only constraint, so the
//! projection is a clamp.
//!
//! On top of the single solve sit the verification routines: the modulus
//! curve retraced by bisection on the boundary value, the optimal
//! perturbation size retraced by a scan, the two-sided budget split, and a
//! battery that compares all of it against the constructed solutions.

use crate::kernel_risk::{minimax_risk, modulus, NoiseModel};
use crate::least_favorable::{Model, SmoothnessParams};
use crate::tolerances;
use crate::{scalar, Error, Result};

/// One instance of the discretized norm-minimization problem.
#[derive(Debug, Clone)]
pub struct DiscretizedProblem {
    /// Integration horizon T; must be at least 3 so the support fits.
    pub horizon: f64,
    /// Number of cells N; must be at least 500.
    pub grid_count: usize,
    /// Curvature bound C.
    pub lipschitz_constant: f64,
    /// Pinned value f(0).
    pub boundary_value: f64,
    /// If set, the initial slope is pinned to zero instead of optimized.
    pub constrain_slope: bool,
    /// Relative objective plateau tolerance, in (0, 1e-6].
    pub tol: f64,
    pub max_iters: u64,
}

impl DiscretizedProblem {
    pub fn validate(&self) -> Result<()> {
        if !(self.horizon >= 3.0 && self.horizon.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "horizon",
                requirement: "at least 3",
                value: self.horizon,
            });
        }
        if self.grid_count < 500 {
            return Err(Error::InvalidParameter {
                name: "grid_count",
                requirement: "at least 500",
                value: self.grid_count as f64,
            });
        }
        if !(self.lipschitz_constant > 0.0 && self.lipschitz_constant.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "lipschitz_constant",
                requirement: "positive and finite",
                value: self.lipschitz_constant,
            });
        }
        if !self.boundary_value.is_finite() {
            return Err(Error::InvalidParameter {
                name: "boundary_value",
                requirement: "finite",
                value: self.boundary_value,
            });
        }
        if !(self.tol > 0.0 && self.tol <= 1e-6) {
            return Err(Error::InvalidParameter {
                name: "tol",
                requirement: "in (0, 1e-6]",
                value: self.tol,
            });
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidParameter {
                name: "max_iters",
                requirement: "positive",
                value: 0.0,
            });
        }
        Ok(())
    }
}

/// Solution of one discretized problem.
#[derive(Debug, Clone)]
pub struct OracleResult {
    pub horizon: f64,
    pub grid_count: usize,
    /// Trapezoid value of the squared norm at the minimizer.
    pub min_norm_sq: f64,
    /// Slope at 0 of the minimizer (0 when the problem pinned it).
    pub initial_slope: f64,
    pub slope_constrained: bool,
    pub iterations: u64,
    /// Projected-gradient residual at exit, relative to its starting value.
    pub kkt_residual: f64,
    /// Relative objective change over the last plateau window at exit.
    pub objective_rel_change: f64,
    /// Grid values f(t_i), i = 0..=N.
    pub values: Vec<f64>,
    /// Per-cell curvatures u_j, j = 0..N.
    pub curvatures: Vec<f64>,
}

impl OracleResult {
    pub fn step(&self) -> f64 {
        self.horizon / self.grid_count as f64
    }

    /// Grid time of node i.
    pub fn time(&self, i: usize) -> f64 {
        i as f64 * self.step()
    }
}

/// Forward integrator and adjoint for the discretized objective.
///
/// Grid values obey f_{k+1} = f_k + h s_k + h^2 u_k / 2, s_{k+1} = s_k + h u_k,
/// so f_i = f_0 + i h v0 + sum_{j<i} h^2 (i - j - 1/2) u_j and the objective
/// J = sum_i w_i f_i^2 (trapezoid weights w) has the adjoint form
/// dJ/du_j = h^2 (B_{j+1} - (j + 1/2) A_{j+1}), dJ/dv0 = h B_0 with
/// A_m = sum_{i>=m} 2 w_i f_i and B_m = sum_{i>=m} i 2 w_i f_i.
struct Engine {
    n: usize,
    h: f64,
    f: Vec<f64>,
}

impl Engine {
    fn new(n: usize, h: f64) -> Self {
        Engine {
            n,
            h,
            f: vec![0.0; n + 1],
        }
    }

    /// Integrates and returns the trapezoid objective.
    fn forward(&mut self, boundary: f64, v0: f64, u: &[f64]) -> f64 {
        let h = self.h;
        let n = self.n;
        let mut value = boundary;
        let mut slope = v0;
        self.f[0] = value;
        let mut j = 0.5 * h * value * value;
        for (k, &uk) in u.iter().enumerate() {
            value += h * (slope + 0.5 * h * uk);
            slope += h * uk;
            self.f[k + 1] = value;
            let w = if k + 1 == n { 0.5 * h } else { h };
            j += w * value * value;
        }
        j
    }

    /// Gradient from the last forward pass; returns dJ/dv0 and fills du.
    fn adjoint(&self, du: &mut [f64]) -> f64 {
        let h = self.h;
        let n = self.n;
        let mut a = 0.0;
        let mut b = 0.0;
        for j in (0..n).rev() {
            let i = j + 1;
            let w = if i == n { 0.5 * h } else { h };
            let g = 2.0 * w * self.f[i];
            a += g;
            b += i as f64 * g;
            du[j] = h * h * (b - (j as f64 + 0.5) * a);
        }
        h * b
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Largest Hessian eigenvalue of the (purely quadratic) objective, by power
/// iteration on the homogeneous map. Deterministic: starts from all-ones.
fn lipschitz_estimate(engine: &mut Engine, free_slope: bool) -> f64 {
    let n = engine.n;
    let mut dv = if free_slope { 1.0 } else { 0.0 };
    let mut du = vec![1.0; n];
    let mut hu = vec![0.0; n];
    let mut rayleigh = 0.0;
    for _ in 0..80 {
        engine.forward(0.0, dv, &du);
        let mut hv = engine.adjoint(&mut hu);
        if !free_slope {
            hv = 0.0;
        }
        let num = dv * hv + dot(&du, &hu);
        let den = dv * dv + dot(&du, &du);
        rayleigh = num / den;
        let norm = (hv * hv + dot(&hu, &hu)).sqrt();
        dv = hv / norm;
        for (d, hval) in du.iter_mut().zip(&hu) {
            *d = hval / norm;
        }
    }
    // Headroom for the unconverged remainder of the spectrum.
    rayleigh * 1.05
}

/// Squared norm of the projected-gradient step at (v0, u).
fn projected_gradient_norm(
    c: f64,
    free_slope: bool,
    step_inv_l: f64,
    v0: f64,
    u: &[f64],
    gv: f64,
    gu: &[f64],
) -> f64 {
    let mut sq = 0.0;
    if free_slope {
        let moved = v0 - step_inv_l * gv;
        sq += (v0 - moved) * (v0 - moved);
    }
    for (x, g) in u.iter().zip(gu) {
        let moved = (x - step_inv_l * g).clamp(-c, c);
        sq += (x - moved) * (x - moved);
    }
    sq.sqrt()
}

/// Minimizes the discretized squared norm by accelerated projected gradient.
///
/// Stops once the relative objective change over a 100-iteration window
/// drops below `tol` and the projected-gradient residual drops below `tol`
/// times its starting value. If the plateau is reached but the residual
/// target is not by `max_iters`, the last iterate is still returned (with
/// the residual recorded); if even the plateau is not reached, the solve
/// fails with [`Error::NonConvergence`] carrying the last iterate.
pub fn solve_discretized(problem: &DiscretizedProblem) -> Result<OracleResult> {
    problem.validate()?;
    let n = problem.grid_count;
    let h = problem.horizon / n as f64;
    let c = problem.lipschitz_constant;
    let free = !problem.constrain_slope;
    let boundary = problem.boundary_value;
    let tol = problem.tol;

    let mut engine = Engine::new(n, h);
    let l = lipschitz_estimate(&mut engine, free);
    let inv_l = 1.0 / l;

    // Iterates: x is the current point, y the extrapolated point.
    let mut xv = 0.0_f64;
    let mut xu = vec![0.0_f64; n];
    let mut yv = xv;
    let mut yu = xu.clone();
    let mut gu = vec![0.0_f64; n];
    let mut momentum = 1.0_f64;

    let j0 = engine.forward(boundary, xv, &xu);
    let gv0 = engine.adjoint(&mut gu);
    let pg0 = projected_gradient_norm(c, free, inv_l, xv, &xu, gv0, &gu).max(1e-300);

    // Ring buffer of the last 101 objective values for the plateau test.
    const WINDOW: usize = 100;
    let mut ring = [0.0_f64; WINDOW + 1];
    ring[0] = j0;

    let mut iterations = 0u64;
    let mut plateau = false;
    let mut rel_change = f64::INFINITY;

    while iterations < problem.max_iters {
        iterations += 1;

        engine.forward(boundary, yv, &yu);
        let gv = engine.adjoint(&mut gu);
        let new_v = if free { yv - inv_l * gv } else { 0.0 };
        let next_momentum = 0.5 * (1.0 + (1.0 + 4.0 * momentum * momentum).sqrt());
        let ratio = (momentum - 1.0) / next_momentum;
        // x_new and the extrapolation y are built in one pass over u.
        for j in 0..n {
            let moved = (yu[j] - inv_l * gu[j]).clamp(-c, c);
            yu[j] = moved + ratio * (moved - xu[j]);
            xu[j] = moved;
        }
        yv = new_v + ratio * (new_v - xv);
        xv = new_v;
        momentum = next_momentum;

        let j_cur = engine.forward(boundary, xv, &xu);
        ring[(iterations as usize) % (WINDOW + 1)] = j_cur;
        if iterations as usize >= WINDOW {
            let j_old = ring[(iterations as usize - WINDOW) % (WINDOW + 1)];
            rel_change = (j_old - j_cur).abs() / j_cur.max(1e-300);
            plateau = rel_change < tol;
        }
        // The residual check costs a full gradient, so amortize it.
        if plateau && iterations % 50 == 0 {
            let gv_x = engine.adjoint(&mut gu);
            let probe = projected_gradient_norm(c, free, inv_l, xv, &xu, gv_x, &gu) / pg0;
            if probe < tol {
                break;
            }
        }
    }

    let min_norm_sq = engine.forward(boundary, xv, &xu);
    let gv_x = engine.adjoint(&mut gu);
    let kkt = projected_gradient_norm(c, free, inv_l, xv, &xu, gv_x, &gu) / pg0;
    let result = OracleResult {
        horizon: problem.horizon,
        grid_count: n,
        min_norm_sq,
        initial_slope: xv,
        slope_constrained: problem.constrain_slope,
        iterations,
        kkt_residual: kkt,
        objective_rel_change: rel_change,
        values: engine.f.clone(),
        curvatures: xu,
    };
    if !plateau {
        return Err(Error::NonConvergence {
            rel_change,
            tol,
            iterations,
            last: Box::new(result),
        });
    }
    Ok(result)
}

/// First grid time beyond which |f| stays below
/// [`tolerances::SUPPORT_THRESHOLD_REL`] times |f(0)|.
pub fn recovered_support(result: &OracleResult) -> f64 {
    let threshold = tolerances::SUPPORT_THRESHOLD_REL * result.values[0].abs();
    let last_exceed = result
        .values
        .iter()
        .rposition(|v| v.abs() >= threshold);
    match last_exceed {
        None => 0.0,
        Some(i) => result.time((i + 1).min(result.grid_count)),
    }
}

/// Resolution parameters for the verification solves.
#[derive(Debug, Clone, Copy)]
pub struct SolveFidelity {
    pub cells_per_unit_time: f64,
    pub tol: f64,
    pub max_iters: u64,
    /// Bisection steps when inverting the discretized modulus.
    pub bisection_iters: u32,
}

/// One retraced point of the modulus curve.
#[derive(Debug, Clone, Copy)]
pub struct ModulusCheck {
    pub delta: f64,
    pub closed_form: f64,
    pub oracle_value: f64,
    pub rel_error: f64,
}

/// Retraces the modulus curve without its closed form: for each delta, finds
/// by bisection the boundary value b whose discretized minimal squared norm
/// equals delta^2. The discretization horizon adapts to the support scaling
/// sqrt(b / C).
pub fn verify_modulus_curve(
    model: &Model,
    params: &SmoothnessParams,
    deltas: &[f64],
    fidelity: &SolveFidelity,
) -> Result<Vec<ModulusCheck>> {
    let c = params.lipschitz_constant();
    let mut out = Vec::with_capacity(deltas.len());
    for &delta in deltas {
        let closed_form = modulus(model, params, delta)?.b_value;
        let target = delta * delta;
        let min_norm_at = |b: f64| -> Result<f64> {
            let horizon = (1.3 * model.constants.t_bar_recursion * (b / c).sqrt()).max(3.0);
            let grid = ((fidelity.cells_per_unit_time * horizon).ceil() as usize).max(500);
            let solved = solve_discretized(&DiscretizedProblem {
                horizon,
                grid_count: grid,
                lipschitz_constant: c,
                boundary_value: b,
                constrain_slope: false,
                tol: fidelity.tol,
                max_iters: fidelity.max_iters,
            })?;
            Ok(solved.min_norm_sq)
        };
        // The minimal norm grows monotonically in b, so bisect on b.
        let mut lo = 0.55 * closed_form;
        let mut hi = 1.7 * closed_form;
        let mut f_lo = min_norm_at(lo)? - target;
        let mut f_hi = min_norm_at(hi)? - target;
        if f_lo > 0.0 || f_hi < 0.0 {
            // One widening attempt before giving up.
            lo = 0.3 * closed_form;
            hi = 2.5 * closed_form;
            f_lo = min_norm_at(lo)? - target;
            f_hi = min_norm_at(hi)? - target;
            if f_lo > 0.0 || f_hi < 0.0 {
                return Err(Error::BisectionBracket {
                    lo,
                    hi,
                    f_lo,
                    f_hi,
                });
            }
        }
        for _ in 0..fidelity.bisection_iters {
            let mid = 0.5 * (lo + hi);
            if min_norm_at(mid)? - target <= 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let oracle_value = 0.5 * (lo + hi);
        out.push(ModulusCheck {
            delta,
            closed_form,
            oracle_value,
            rel_error: (oracle_value - closed_form).abs() / closed_form,
        });
    }
    Ok(out)
}

/// Result of retracing the optimal perturbation size.
#[derive(Debug, Clone, Copy)]
pub struct DeltaStarCheck {
    pub sigma: f64,
    pub delta_hat: f64,
    pub delta_expected: f64,
    pub rel_error: f64,
    /// The hardest-subproblem risk at the located maximum.
    pub risk_at_hat: f64,
}

/// Retraces delta* = 2 sigma by maximizing the hardest-subproblem risk
/// b(delta)^2 sigma^2 / (sigma^2 + delta^2) over a wide log-spaced scan,
/// then refining around the best grid point.
pub fn verify_delta_star(
    model: &Model,
    noise: &NoiseModel,
    params: &SmoothnessParams,
) -> Result<DeltaStarCheck> {
    let sigma = noise.sigma();
    let value = |delta: f64| -> f64 {
        let b = modulus(model, params, delta)
            .expect("scan deltas are positive")
            .b_value;
        b * b * sigma * sigma / (sigma * sigma + delta * delta)
    };
    let points = 61;
    let mut best = 0usize;
    let mut best_value = f64::NEG_INFINITY;
    let grid: Vec<f64> = (0..points)
        .map(|i| sigma * 10f64.powf(-3.0 + 6.0 * i as f64 / (points - 1) as f64))
        .collect();
    for (i, d) in grid.iter().enumerate() {
        let v = value(*d);
        if v > best_value {
            best_value = v;
            best = i;
        }
    }
    if best == 0 || best == points - 1 {
        return Err(Error::BracketingFailure {
            lo: grid[0],
            hi: grid[points - 1],
            at: grid[best],
        });
    }
    let refined = scalar::minimize(
        |d| -value(d),
        grid[best - 1],
        grid[best + 1],
        1e-12,
        400,
    )?;
    let delta_hat = refined.argmin;
    let delta_expected = 2.0 * sigma;
    Ok(DeltaStarCheck {
        sigma,
        delta_hat,
        delta_expected,
        rel_error: (delta_hat - delta_expected).abs() / delta_expected,
        risk_at_hat: -refined.value,
    })
}

/// Result of the two-sided budget split.
#[derive(Debug, Clone, Copy)]
pub struct RdSplitCheck {
    pub b: f64,
    pub a_hat: f64,
    pub min_value: f64,
}

/// Minimizes |a|^{5/2} + |b - a|^{5/2} over a. The objective is strictly
/// convex, so its derivative has a single sign change, located by bisection;
/// the even split a = b/2 with value b^{5/2} / 2^{3/2} is the target.
pub fn verify_rd_split(b: f64) -> Result<RdSplitCheck> {
    if !(b > 0.0 && b.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "b",
            requirement: "positive and finite",
            value: b,
        });
    }
    let phi = |a: f64| a.abs().powf(2.5) + (b - a).abs().powf(2.5);
    let dphi =
        |a: f64| 2.5 * (a.signum() * a.abs().powf(1.5) - (b - a).signum() * (b - a).abs().powf(1.5));
    let mut lo = 0.01 * b;
    let mut hi = 0.99 * b;
    if !(dphi(lo) < 0.0 && dphi(hi) > 0.0) {
        return Err(Error::BisectionBracket {
            lo,
            hi,
            f_lo: dphi(lo),
            f_hi: dphi(hi),
        });
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if dphi(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let a_hat = 0.5 * (lo + hi);
    // Interior minimum beats any outside candidate: phi is increasing in |a|
    // off [0, b], so checking the endpoints certifies the global claim.
    debug_assert!(phi(a_hat) < phi(0.0) && phi(a_hat) < phi(b));
    Ok(RdSplitCheck {
        b,
        a_hat,
        min_value: phi(a_hat),
    })
}

/// How aggressively the battery solves and how tightly it judges.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ToleranceProfile {
    /// Deep solves, publication-grade tolerances. Minutes of CPU.
    Strict,
    /// Coarser solves for routine regression runs. Seconds of CPU.
    Quick,
}

impl ToleranceProfile {
    pub fn name(&self) -> &'static str {
        match self {
            ToleranceProfile::Strict => "strict",
            ToleranceProfile::Quick => "quick",
        }
    }

    /// (grid cells, horizon, plateau tol, iteration cap) of the main solves.
    pub fn main_problem(&self) -> (usize, f64, f64, u64) {
        match self {
            ToleranceProfile::Strict => (
                4000,
                4.0,
                tolerances::ORACLE_DEEP_TOL,
                tolerances::ORACLE_DEEP_MAX_ITERS,
            ),
            // 1e-9 is the shallowest tolerance at N = 1000 whose tail is
            // polished enough for the support read-off and activity checks.
            ToleranceProfile::Quick => (1000, 4.0, 1e-9, 400_000),
        }
    }

    pub fn modulus_fidelity(&self) -> SolveFidelity {
        match self {
            ToleranceProfile::Strict => SolveFidelity {
                cells_per_unit_time: 250.0,
                tol: 1e-7,
                max_iters: 150_000,
                bisection_iters: 11,
            },
            ToleranceProfile::Quick => SolveFidelity {
                cells_per_unit_time: 150.0,
                tol: 1e-6,
                max_iters: 60_000,
                bisection_iters: 9,
            },
        }
    }

    /// Absolute tolerance for the two recovered minima.
    pub fn minimum_tol(&self, target: f64) -> f64 {
        match self {
            ToleranceProfile::Strict => 0.005,
            ToleranceProfile::Quick => 0.02 * target,
        }
    }

    pub fn slope_tol(&self) -> f64 {
        match self {
            ToleranceProfile::Strict => 0.01,
            ToleranceProfile::Quick => 0.03,
        }
    }

    pub fn sup_tol(&self) -> f64 {
        match self {
            ToleranceProfile::Strict => 0.01,
            ToleranceProfile::Quick => 0.02,
        }
    }

    pub fn activity_min(&self) -> f64 {
        match self {
            ToleranceProfile::Strict => 0.95,
            ToleranceProfile::Quick => 0.90,
        }
    }

    pub fn support_window(&self) -> f64 {
        match self {
            ToleranceProfile::Strict => 0.05,
            ToleranceProfile::Quick => 0.2,
        }
    }

    pub fn modulus_rel(&self) -> f64 {
        0.02
    }

    pub fn delta_star_rel(&self) -> f64 {
        1e-4
    }

    pub fn rd_split_abs(&self) -> f64 {
        1e-8
    }
}

/// One named pass/fail verdict.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub observed: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl CheckResult {
    fn judge(name: &str, observed: f64, expected: f64, tolerance: f64, detail: String) -> Self {
        CheckResult {
            name: name.to_string(),
            passed: (observed - expected).abs() <= tolerance,
            observed,
            expected,
            tolerance,
            detail,
        }
    }
}

/// Everything the verification battery produced.
#[derive(Debug, Clone)]
pub struct BatteryReport {
    pub profile: ToleranceProfile,
    pub checks: Vec<CheckResult>,
    pub all_passed: bool,
    pub free: OracleResult,
    pub constrained: OracleResult,
}

/// Runs the full verification battery against a solved model.
///
/// `grid_override` and `horizon_override` replace the profile's main-solve
/// resolution when given; pass None for the profile defaults.
pub fn run_battery(
    model: &Model,
    profile: ToleranceProfile,
    grid_override: Option<usize>,
    horizon_override: Option<f64>,
) -> Result<BatteryReport> {
    let (mut grid_count, mut horizon, tol, max_iters) = profile.main_problem();
    if let Some(n) = grid_override {
        grid_count = n;
    }
    if let Some(t) = horizon_override {
        horizon = t;
    }
    // The battery works at unit scale throughout; scaling laws are covered
    // by their own closed-form checks.
    let c_main = 1.0;
    let free = solve_discretized(&DiscretizedProblem {
        horizon,
        grid_count,
        lipschitz_constant: c_main,
        boundary_value: 1.0,
        constrain_slope: false,
        tol,
        max_iters,
    })?;
    let constrained = solve_discretized(&DiscretizedProblem {
        horizon,
        grid_count,
        lipschitz_constant: c_main,
        boundary_value: 1.0,
        constrain_slope: true,
        tol,
        max_iters,
    })?;

    let mut checks = Vec::new();
    let c = &model.constants;

    checks.push(CheckResult::judge(
        "free-slope-minimum",
        free.min_norm_sq,
        c.i_star,
        profile.minimum_tol(c.i_star),
        format!(
            "discretized minimum over the curvature box with free initial slope, \
             N = {}, T = {}",
            free.grid_count, free.horizon
        ),
    ));
    checks.push(CheckResult::judge(
        "constrained-minimum",
        constrained.min_norm_sq,
        c.i0_norm_sq,
        profile.minimum_tol(c.i0_norm_sq),
        "same problem with the initial slope pinned to zero".to_string(),
    ));
    checks.push(CheckResult::judge(
        "initial-slope",
        free.initial_slope,
        c.f_prime0,
        profile.slope_tol(),
        "slope at 0 recovered by the free-slope solve".to_string(),
    ));

    let sup = free
        .values
        .iter()
        .enumerate()
        .map(|(i, v)| (v - model.boundary.shape.eval(free.time(i))).abs())
        .fold(0.0_f64, f64::max);
    checks.push(CheckResult::judge(
        "solution-sup-distance",
        sup,
        0.0,
        profile.sup_tol(),
        "sup over the grid of |discretized - constructed|".to_string(),
    ));

    let support = recovered_support(&free);
    let step = free.step();
    let inside = ((support / step).floor() as usize).min(free.grid_count);
    let active = free.curvatures[..inside]
        .iter()
        .filter(|u| u.abs() >= tolerances::ACTIVITY_FRACTION * c_main)
        .count();
    let activity = active as f64 / inside.max(1) as f64;
    checks.push(CheckResult {
        name: "curvature-activity".to_string(),
        passed: activity >= profile.activity_min(),
        observed: activity,
        expected: 1.0,
        tolerance: 1.0 - profile.activity_min(),
        detail: format!(
            "fraction of cells inside the recovered support with |u| at the bound \
             ({active} of {inside})"
        ),
    });

    let d_display = (support - c.t_bar_display).abs();
    let d_recursion = (support - c.t_bar_recursion).abs();
    let (nearest, nearest_name, other, d_near) = if d_display <= d_recursion {
        (c.t_bar_display, "direct read-off", c.t_bar_recursion, d_display)
    } else {
        (c.t_bar_recursion, "recursion sum", c.t_bar_display, d_recursion)
    };
    checks.push(CheckResult {
        name: "support-adjudication".to_string(),
        passed: d_near <= profile.support_window(),
        observed: support,
        expected: nearest,
        tolerance: profile.support_window(),
        detail: format!(
            "recovered support {support:.5} is nearer the {nearest_name} candidate \
             {nearest:.5} (distance {d_near:.5}) than {other:.5} \
             (distances: read-off {d_display:.5}, recursion {d_recursion:.5})"
        ),
    });

    let params = SmoothnessParams::new(1.0)?;
    let curve = verify_modulus_curve(
        model,
        &params,
        &[0.25, 0.5, 1.0, 2.0],
        &profile.modulus_fidelity(),
    )?;
    let worst = curve
        .iter()
        .cloned()
        .reduce(|a, b| if a.rel_error >= b.rel_error { a } else { b })
        .expect("curve is non-empty");
    checks.push(CheckResult {
        name: "modulus-curve-retrace".to_string(),
        passed: worst.rel_error <= profile.modulus_rel(),
        observed: worst.oracle_value,
        expected: worst.closed_form,
        tolerance: profile.modulus_rel() * worst.closed_form,
        detail: format!(
            "worst relative deviation {:.2e} at delta = {}",
            worst.rel_error, worst.delta
        ),
    });

    for sigma in [0.5, 1.0, 2.0] {
        let noise = NoiseModel::new(sigma)?;
        let ds = verify_delta_star(model, &noise, &params)?;
        let risk = minimax_risk(model, &noise, &params).risk;
        let risk_ok = (ds.risk_at_hat - risk).abs() <= 1e-6 * risk;
        checks.push(CheckResult {
            name: format!("optimal-perturbation-sigma-{sigma}"),
            passed: ds.rel_error <= profile.delta_star_rel() && risk_ok,
            observed: ds.delta_hat,
            expected: ds.delta_expected,
            tolerance: profile.delta_star_rel() * ds.delta_expected,
            detail: format!(
                "scan-and-refine maximum of the hardest-subproblem risk; value there \
                 {:.12} vs closed form {:.12}",
                ds.risk_at_hat, risk
            ),
        });
    }

    for b in [1.0, 2.0] {
        let split = verify_rd_split(b)?;
        let value_expected = b.powf(2.5) / (2.0 * std::f64::consts::SQRT_2);
        let value_ok = (split.min_value - value_expected).abs() <= 1e-10 * value_expected;
        checks.push(CheckResult {
            name: format!("two-sided-split-b-{b}"),
            passed: (split.a_hat - b / 2.0).abs() <= profile.rd_split_abs() && value_ok,
            observed: split.a_hat,
            expected: b / 2.0,
            tolerance: profile.rd_split_abs(),
            detail: format!(
                "even split of the norm budget; minimum {:.12} vs b^(5/2)/2^(3/2) = {:.12}",
                split.min_value, value_expected
            ),
        });
    }

    let all_passed = checks.iter().all(|ch| ch.passed);
    Ok(BatteryReport {
        profile,
        checks,
        all_passed,
        free,
        constrained,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::LazyLock;

    const I0: f64 = 0.7640175477256332;
    const I_STAR: f64 = 0.2667203959762920;

    static MODEL: LazyLock<Model> = LazyLock::new(|| Model::solve().unwrap());

    // tol 1e-9 is the shallowest setting at N = 1000 that polishes the tail
    // below the support threshold; 1e-7 stops with the read-off at the
    // horizon and barely half the curvature cells at the bound.
    fn problem(constrain: bool) -> DiscretizedProblem {
        DiscretizedProblem {
            horizon: 4.0,
            grid_count: 1000,
            lipschitz_constant: 1.0,
            boundary_value: 1.0,
            constrain_slope: constrain,
            tol: 1e-9,
            max_iters: 400_000,
        }
    }

    static FREE: LazyLock<OracleResult> =
        LazyLock::new(|| solve_discretized(&problem(false)).unwrap());
    static CONSTRAINED: LazyLock<OracleResult> =
        LazyLock::new(|| solve_discretized(&problem(true)).unwrap());

    #[test]
    fn validation_rejects_out_of_contract_problems() {
        let mut p = problem(false);
        p.grid_count = 499;
        assert!(solve_discretized(&p).is_err());
        let mut p = problem(false);
        p.horizon = 2.5;
        assert!(solve_discretized(&p).is_err());
        let mut p = problem(false);
        p.tol = 1e-5;
        assert!(solve_discretized(&p).is_err());
        let mut p = problem(false);
        p.lipschitz_constant = 0.0;
        assert!(solve_discretized(&p).is_err());
    }

    #[test]
    fn free_solve_reaches_the_constructed_minimum() {
        let r = &*FREE;
        assert!(
            (r.min_norm_sq - I_STAR).abs() < 0.005,
            "free minimum {} vs {}",
            r.min_norm_sq,
            I_STAR
        );
        assert!(
            (r.initial_slope - MODEL.constants.f_prime0).abs() < 0.02,
            "slope {}",
            r.initial_slope
        );
        // The discretized minimum sits above the continuum value.
        assert!(r.min_norm_sq > I_STAR - 1e-6);
    }

    #[test]
    fn constrained_solve_reaches_the_interior_minimum() {
        let r = &*CONSTRAINED;
        assert!(
            (r.min_norm_sq - I0).abs() < 0.005,
            "constrained minimum {}",
            r.min_norm_sq
        );
        assert_eq!(r.initial_slope, 0.0);
        assert!(r.slope_constrained);
    }

    #[test]
    fn recovered_support_lands_in_the_adjudication_range() {
        let support = recovered_support(&FREE);
        assert!(
            (2.3..=2.8).contains(&support),
            "recovered support {support}"
        );
    }

    #[test]
    fn free_solution_tracks_the_construction_pointwise() {
        let r = &*FREE;
        let sup = r
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| (v - MODEL.boundary.shape.eval(r.time(i))).abs())
            .fold(0.0_f64, f64::max);
        assert!(sup < 0.02, "sup distance {sup}");
    }

    #[test]
    fn curvature_sits_at_the_bound_inside_the_support() {
        let r = &*FREE;
        let support = recovered_support(r);
        let inside = ((support / r.step()).floor() as usize).min(r.grid_count);
        let active = r.curvatures[..inside]
            .iter()
            .filter(|u| u.abs() >= tolerances::ACTIVITY_FRACTION)
            .count();
        let fraction = active as f64 / inside as f64;
        assert!(fraction >= 0.9, "activity {fraction}");
    }

    #[test]
    fn starving_the_iteration_budget_reports_non_convergence() {
        let mut p = problem(false);
        p.max_iters = 200;
        match solve_discretized(&p) {
            Err(Error::NonConvergence {
                iterations, last, ..
            }) => {
                assert_eq!(iterations, 200);
                assert!(last.min_norm_sq.is_finite());
                assert_eq!(last.values.len(), p.grid_count + 1);
            }
            other => panic!("expected NonConvergence, got {other:?}"),
        }
    }

    #[test]
    fn split_problem_halves_the_budget() {
        for b in [1.0, 2.0, 0.3] {
            let s = verify_rd_split(b).unwrap();
            assert!((s.a_hat - b / 2.0).abs() < 1e-10 * b, "b = {b}");
            let expected = b.powf(2.5) / (2.0 * std::f64::consts::SQRT_2);
            assert!((s.min_value - expected).abs() < 1e-12 * expected);
        }
        assert!(verify_rd_split(0.0).is_err());
        assert!(verify_rd_split(-1.0).is_err());
    }

    #[test]
    fn perturbation_size_scan_recovers_two_sigma() {
        let params = SmoothnessParams::new(1.0).unwrap();
        for sigma in [0.5, 1.0, 2.0] {
            let noise = NoiseModel::new(sigma).unwrap();
            let ds = verify_delta_star(&MODEL, &noise, &params).unwrap();
            assert!(ds.rel_error < 1e-4, "sigma {sigma}: {}", ds.delta_hat);
            let risk = minimax_risk(&MODEL, &noise, &params).risk;
            assert!((ds.risk_at_hat - risk).abs() < 1e-6 * risk);
        }
    }

    #[test]
    fn modulus_retrace_matches_the_closed_form_at_unit_delta() {
        let params = SmoothnessParams::new(1.0).unwrap();
        let fidelity = SolveFidelity {
            cells_per_unit_time: 150.0,
            tol: 1e-6,
            max_iters: 60_000,
            bisection_iters: 9,
        };
        let checks = verify_modulus_curve(&MODEL, &params, &[1.0], &fidelity).unwrap();
        assert_eq!(checks.len(), 1);
        assert!(
            checks[0].rel_error < 0.02,
            "modulus retrace off by {:.2e}",
            checks[0].rel_error
        );
    }

    #[test]
    #[ignore = "calibration probe, run manually with --ignored --nocapture"]
    fn calibration_probe() {
        for (n, tol, max_iters) in [
            (500, 1e-9, 400_000u64),
            (1000, 1e-9, 400_000),
            (2000, 1e-9, 600_000),
            (4000, 1e-9, 1_500_000),
        ] {
            let mut p = problem(false);
            p.grid_count = n;
            p.tol = tol;
            p.max_iters = max_iters;
            let t0 = std::time::Instant::now();
            match solve_discretized(&p) {
                Ok(r) => {
                    let support = recovered_support(&r);
                    let inside = ((support / r.step()).floor() as usize).min(r.grid_count);
                    let active = r.curvatures[..inside]
                        .iter()
                        .filter(|u| u.abs() >= tolerances::ACTIVITY_FRACTION)
                        .count();
                    let sup = r
                        .values
                        .iter()
                        .enumerate()
                        .map(|(i, v)| (v - MODEL.boundary.shape.eval(r.time(i))).abs())
                        .fold(0.0_f64, f64::max);
                    println!(
                        "n {n} tol {tol:.0e} max {max_iters}: iters {} kkt {:.2e} rel {:.2e} support {support:.4} activity {:.4} sup {:.2e} min {:.10} elapsed {:?}",
                        r.iterations,
                        r.kkt_residual,
                        r.objective_rel_change,
                        active as f64 / inside as f64,
                        sup,
                        r.min_norm_sq,
                        t0.elapsed()
                    );
                }
                Err(e) => println!("n {n} tol {tol:.0e} max {max_iters}: FAILED {e}"),
            }
        }
    }
}
