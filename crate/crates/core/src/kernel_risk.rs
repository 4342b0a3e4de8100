//! The minimax linear kernel and its exact risk.
//!
//! With white observation noise of level sigma on [0, inf), the hardest
//! one-dimensional subproblem runs along the scaled least-favorable family,
//! and the optimal linear estimate of f(0) is the stochastic integral
//! f_hat = int psi dY against a kernel that is itself a rescaled copy of the
//! boundary-optimal shape:
//!
//!   psi(t) = (R/sigma^2) f*(lambda t),   lambda = (I* C^2 / (4 sigma^2))^{1/5},
//!
//! where R = 2^{8/5} I*^{-4/5} C^{2/5} sigma^{8/5} / 5 is the minimax risk.
//! The risk splits as R = bias^2 + variance with bias^2 = R/5 and
//! variance = 4R/5.
//!
//! The regression-discontinuity variant estimates a jump at 0 from two-sided
//! data with the odd extension of the same shape; its modulus gains a factor
//! 2^{3/5}, its amplitude 2^{1/5}, and its risk 2^{6/5}.

use crate::least_favorable::{Model, SmoothnessParams};
use crate::piecewise::{inner_product, PiecewiseQuadratic};
use crate::tolerances;
use crate::{Error, Result};

/// White-noise level: dY = f dt + sigma dW.
#[derive(Debug, Clone, Copy)]
pub struct NoiseModel {
    sigma: f64,
}

impl NoiseModel {
    pub fn new(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "sigma",
                requirement: "positive and finite",
                value: sigma,
            });
        }
        Ok(Self { sigma })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }
}

/// One point on the modulus-of-continuity curve: the largest boundary value
/// b attainable with ||f|| = delta and |f''| <= C.
#[derive(Debug, Clone, Copy)]
pub struct ModulusPoint {
    pub delta: f64,
    pub b_value: f64,
}

/// Which estimation problem the kernel solves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelSide {
    /// One-sided data on [0, inf); estimand f(0).
    Boundary,
    /// Two-sided data; estimand the jump f(0+) - f(0-). The kernel is odd.
    RdAntisymmetric,
}

/// A fully assembled estimator kernel psi.
#[derive(Debug, Clone)]
pub struct KernelSpec {
    /// psi evaluated at 0 (from the positive side).
    pub amplitude: f64,
    /// Time dilation: psi(t) = amplitude * base(time_rescale * t).
    pub time_rescale: f64,
    pub side: KernelSide,
    /// The unscaled boundary-optimal shape with value 1 at 0.
    base: PiecewiseQuadratic,
    sigma: f64,
    c_lipschitz: f64,
}

impl KernelSpec {
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn lipschitz_constant(&self) -> f64 {
        self.c_lipschitz
    }

    /// End of the support of psi on the positive axis.
    pub fn support_end(&self) -> f64 {
        self.base.support_end() / self.time_rescale
    }

    /// The positive-side profile psi(x) for x >= 0.
    pub fn positive_eval(&self, x: f64) -> f64 {
        assert!(x >= 0.0, "positive_eval takes x >= 0, got {x}");
        self.amplitude * self.base.eval(self.time_rescale * x)
    }

    /// Evaluates psi. Boundary kernels vanish off [0, inf); antisymmetric
    /// kernels satisfy psi(-x) = -psi(x) with psi(0) = +amplitude (the
    /// positive-side limit).
    pub fn eval(&self, t: f64) -> f64 {
        if t >= 0.0 {
            self.positive_eval(t)
        } else {
            match self.side {
                KernelSide::Boundary => 0.0,
                KernelSide::RdAntisymmetric => -self.positive_eval(-t),
            }
        }
    }

    /// The positive-side profile as a piecewise quadratic (for exact inner
    /// products against function shapes).
    pub fn as_shape(&self) -> PiecewiseQuadratic {
        self.base.scaled(self.amplitude, self.time_rescale)
    }

    /// Exact squared L2 norm of psi over its whole domain.
    pub fn norm_sq(&self) -> f64 {
        let one_sided = self.amplitude * self.amplitude * self.base.norm_sq() / self.time_rescale;
        match self.side {
            KernelSide::Boundary => one_sided,
            KernelSide::RdAntisymmetric => 2.0 * one_sided,
        }
    }
}

/// Exact risk accounting for applying a given kernel to a given signal.
#[derive(Debug, Clone, Copy)]
pub struct AnalyticRisk {
    pub bias: f64,
    pub bias_sq: f64,
    pub variance: f64,
    pub mse: f64,
}

/// Minimax risk and its ingredients for one (sigma, C) configuration.
#[derive(Debug, Clone, Copy)]
pub struct RiskReport {
    pub sigma: f64,
    pub c_lipschitz: f64,
    /// The least-favorable perturbation size 2 sigma.
    pub delta_star: f64,
    /// Modulus value at delta_star.
    pub b_star: f64,
    /// Minimax mean squared error b_star^2 / 5.
    pub risk: f64,
    pub bias_sq: f64,
    pub variance: f64,
    /// 5 risk / (C^{2/5} sigma^{8/5}) = 2^{8/5} I*^{-4/5}.
    pub risk_constant_without_fifth: f64,
}

/// Modulus of continuity: b(delta) = C^{1/5} I*^{-2/5} delta^{4/5}.
pub fn modulus(model: &Model, params: &SmoothnessParams, delta: f64) -> Result<ModulusPoint> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "delta",
            requirement: "positive and finite",
            value: delta,
        });
    }
    let c = params.lipschitz_constant();
    let i_star = model.constants.i_star;
    Ok(ModulusPoint {
        delta,
        b_value: c.powf(0.2) * i_star.powf(-0.4) * delta.powf(0.8),
    })
}

/// Inverse of [`modulus`]: the norm budget needed to reach boundary value b.
pub fn modulus_inverse(model: &Model, params: &SmoothnessParams, b: f64) -> Result<f64> {
    if !(b > 0.0 && b.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "b",
            requirement: "positive and finite",
            value: b,
        });
    }
    let c = params.lipschitz_constant();
    let i_star = model.constants.i_star;
    Ok((b * c.powf(-0.2) * i_star.powf(0.4)).powf(1.25))
}

/// Two-sided modulus for the jump estimand: b_rd(delta) = 2^{3/5} b(delta).
/// Splitting the norm budget evenly across the two sides is optimal.
pub fn rd_modulus(model: &Model, params: &SmoothnessParams, delta: f64) -> Result<ModulusPoint> {
    let one_sided = modulus(model, params, delta)?;
    Ok(ModulusPoint {
        delta,
        b_value: 2f64.powf(0.6) * one_sided.b_value,
    })
}

/// The risk-optimal perturbation size delta* = 2 sigma (where the modulus
/// exponent 4/5 balances bias against variance).
pub fn optimal_delta(noise: &NoiseModel) -> f64 {
    2.0 * noise.sigma()
}

/// Assembles the minimax boundary kernel for one (sigma, C).
pub fn boundary_kernel(model: &Model, noise: &NoiseModel, params: &SmoothnessParams) -> KernelSpec {
    let report = minimax_risk(model, noise, params);
    let sigma = noise.sigma();
    let c = params.lipschitz_constant();
    let i_star = model.constants.i_star;
    KernelSpec {
        amplitude: report.risk / (sigma * sigma),
        time_rescale: (i_star * c * c / (4.0 * sigma * sigma)).powf(0.2),
        side: KernelSide::Boundary,
        base: model.boundary.shape.clone(),
        sigma,
        c_lipschitz: c,
    }
}

/// Assembles the antisymmetric jump kernel: amplitude 2^{1/5} times the
/// boundary kernel's, time rescale (I* C^2 / (2 sigma^2))^{1/5}.
pub fn rd_kernel(model: &Model, noise: &NoiseModel, params: &SmoothnessParams) -> KernelSpec {
    let boundary = boundary_kernel(model, noise, params);
    let sigma = noise.sigma();
    let c = params.lipschitz_constant();
    let i_star = model.constants.i_star;
    KernelSpec {
        amplitude: 2f64.powf(0.2) * boundary.amplitude,
        time_rescale: (i_star * c * c / (2.0 * sigma * sigma)).powf(0.2),
        side: KernelSide::RdAntisymmetric,
        base: model.boundary.shape.clone(),
        sigma,
        c_lipschitz: c,
    }
}

/// Minimax risk report for estimating f(0) from one-sided data.
pub fn minimax_risk(model: &Model, noise: &NoiseModel, params: &SmoothnessParams) -> RiskReport {
    let sigma = noise.sigma();
    let c = params.lipschitz_constant();
    let delta_star = optimal_delta(noise);
    let b_star = modulus(model, params, delta_star)
        .expect("delta* = 2 sigma is positive")
        .b_value;
    let risk = b_star * b_star / 5.0;
    // Hardest-subproblem split: squared bias b*^2 sigma^4 / (sigma^2 + delta*^2)^2.
    let shrink = sigma * sigma / (sigma * sigma + delta_star * delta_star);
    let bias_sq = b_star * b_star * shrink * shrink;
    let variance = risk - bias_sq;
    RiskReport {
        sigma,
        c_lipschitz: c,
        delta_star,
        b_star,
        risk,
        bias_sq,
        variance,
        risk_constant_without_fifth: 5.0 * risk / (c.powf(0.4) * sigma.powf(1.6)),
    }
}

/// Minimax risk report for the jump estimand (risk 2^{6/5} times one-sided).
pub fn rd_minimax_risk(model: &Model, noise: &NoiseModel, params: &SmoothnessParams) -> RiskReport {
    let sigma = noise.sigma();
    let c = params.lipschitz_constant();
    let delta_star = optimal_delta(noise);
    let b_star = rd_modulus(model, params, delta_star)
        .expect("delta* = 2 sigma is positive")
        .b_value;
    let risk = b_star * b_star / 5.0;
    let shrink = sigma * sigma / (sigma * sigma + delta_star * delta_star);
    let bias_sq = b_star * b_star * shrink * shrink;
    let variance = risk - bias_sq;
    RiskReport {
        sigma,
        c_lipschitz: c,
        delta_star,
        b_star,
        risk,
        bias_sq,
        variance,
        risk_constant_without_fifth: 5.0 * risk / (c.powf(0.4) * sigma.powf(1.6)),
    }
}

/// Validates a cell grid against a kernel and returns the estimator weight
/// per cell.
///
/// `times` are the left endpoints of consecutive cells of a single uniform
/// grid, ascending. Boundary kernels require a grid starting at 0 and get
/// weight psi(t_i); antisymmetric kernels require cells on both sides with 0
/// as a cell boundary, and the weight on a negative cell [-(k+1)h, -kh) is
/// -psi(kh) (cells enter by their distance from 0, mirroring the positive
/// side). Both sides must cover the kernel support.
pub fn estimator_weights(kernel: &KernelSpec, times: &[f64]) -> Result<Vec<f64>> {
    if times.len() < 2 {
        return Err(Error::Configuration(
            "need at least two cells to establish a grid step".into(),
        ));
    }
    let step = times[1] - times[0];
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::Configuration(format!(
            "grid step must be positive, got {step}"
        )));
    }
    for (i, pair) in times.windows(2).enumerate() {
        let expected = pair[0] + step;
        if (pair[1] - expected).abs() > tolerances::GRID_UNIFORMITY_REL * step.abs() {
            return Err(Error::NonUniformGrid {
                index: i + 1,
                expected,
                got: pair[1],
            });
        }
    }
    let slack = step * 1e-6;
    let needed = kernel.support_end();
    let last = *times.last().unwrap();
    if last + step + slack < needed {
        return Err(Error::Coverage {
            needed,
            got: last + step,
        });
    }
    match kernel.side {
        KernelSide::Boundary => {
            if times[0].abs() > slack {
                return Err(Error::Configuration(format!(
                    "one-sided estimator needs a grid starting at 0, got {}",
                    times[0]
                )));
            }
            Ok(times
                .iter()
                .map(|t| kernel.positive_eval(t.max(0.0)))
                .collect())
        }
        KernelSide::RdAntisymmetric => {
            if -times[0] + slack < needed {
                return Err(Error::Coverage {
                    needed,
                    got: -times[0],
                });
            }
            // 0 must be a cell boundary: times[0] = -m * step for integer m.
            let m = (-times[0] / step).round();
            if (times[0] + m * step).abs() > slack {
                return Err(Error::Configuration(format!(
                    "two-sided grid must have 0 as a cell boundary; first cell starts at {}",
                    times[0]
                )));
            }
            Ok(times
                .iter()
                .map(|t| {
                    if *t >= -slack {
                        kernel.positive_eval(t.max(0.0))
                    } else {
                        // Cell [t, t + step) sits at distance -t - step.
                        -kernel.positive_eval((-t - step).max(0.0))
                    }
                })
                .collect())
        }
    }
}

/// Applies the linear estimator to discretized data: sum_i psi(t_i) dY_i,
/// with the weights and grid checks of [`estimator_weights`].
pub fn apply_estimator(kernel: &KernelSpec, times: &[f64], increments: &[f64]) -> Result<f64> {
    if times.len() != increments.len() {
        return Err(Error::Configuration(format!(
            "times and increments disagree in length: {} vs {}",
            times.len(),
            increments.len()
        )));
    }
    let weights = estimator_weights(kernel, times)?;
    let mut total = 0.0;
    for (w, dy) in weights.iter().zip(increments) {
        total += w * dy;
    }
    Ok(total)
}

/// Exact bias/variance/MSE of the kernel estimator at a specific signal.
///
/// For a boundary kernel, `f` is the signal on [0, inf) and `f_at_0` its
/// boundary value. For an antisymmetric kernel, `f` is the positive-side
/// profile of the odd scenario (negative side is the mirrored negation) and
/// `f_at_0` is the jump being estimated.
pub fn analytic_risk(
    kernel: &KernelSpec,
    f: &PiecewiseQuadratic,
    f_at_0: f64,
    noise: &NoiseModel,
) -> AnalyticRisk {
    let psi = kernel.as_shape();
    let sigma = noise.sigma();
    let one_sided = inner_product(&psi, f);
    let (mean, variance) = match kernel.side {
        KernelSide::Boundary => (one_sided, sigma * sigma * kernel.norm_sq()),
        KernelSide::RdAntisymmetric => (2.0 * one_sided, sigma * sigma * kernel.norm_sq()),
    };
    let bias = mean - f_at_0;
    AnalyticRisk {
        bias,
        bias_sq: bias * bias,
        variance,
        mse: bias * bias + variance,
    }
}
