//! Monte Carlo validation of the risk accounting.
//!
//! Paths discretize dY = f dt + sigma dW on a uniform cell grid: the
//! increment over a cell is the signal value at the cell endpoint nearest 0
//! times the cell width, plus sigma sqrt(width) times a standard normal.
//! Noise is addressed by (seed, replicate, cell), so results are
//! bit-identical regardless of evaluation order or thread count. Two-sided
//! paths mirror the convention: negative cells enter by their distance from
//! 0, exactly like their positive twins.

use crate::kernel_risk::{
    analytic_risk, estimator_weights, AnalyticRisk, KernelSide, KernelSpec, NoiseModel,
};
use crate::least_favorable::{scale_solution, Model, SmoothnessParams};
use crate::piecewise::{inner_product, PiecewiseQuadratic};
use crate::rng;
use crate::{Error, Result};
use rayon::prelude::*;

/// Discretization of one simulated observation path.
#[derive(Debug, Clone, Copy)]
pub struct PathConfig {
    /// Cell width.
    pub step: f64,
    /// Cells cover [0, horizon) (and mirrored on the negative side for
    /// two-sided paths).
    pub horizon: f64,
    pub seed: u64,
}

impl PathConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "step",
                requirement: "positive and finite",
                value: self.step,
            });
        }
        if !(self.horizon >= self.step && self.horizon.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "horizon",
                requirement: "at least one cell wide and finite",
                value: self.horizon,
            });
        }
        Ok(())
    }

    /// Number of cells per side.
    pub fn cells(&self) -> usize {
        (self.horizon / self.step - 1e-9).ceil() as usize
    }
}

/// Grid resolution tuned to a kernel: cells of width support/4096 reaching
/// 10% past the kernel support.
pub fn default_config(kernel: &KernelSpec, seed: u64) -> PathConfig {
    let support = kernel.support_end();
    PathConfig {
        step: support / 4096.0,
        horizon: 1.1 * support,
        seed,
    }
}

/// A two-sided signal around 0: both profiles live in distance coordinates
/// (the negative-side value at time t < 0 is `f_minus` evaluated near |t|).
#[derive(Debug, Clone)]
pub struct RdScenario {
    pub f_plus: PiecewiseQuadratic,
    pub f_minus: PiecewiseQuadratic,
    /// The estimand f(0+) - f(0-).
    pub jump: f64,
}

/// The least-favorable two-sided scenario for jump size b: the optimal
/// budget split puts +b/2 on the right and -b/2 on the left.
pub fn build_rd_scenario(model: &Model, b: f64, params: &SmoothnessParams) -> RdScenario {
    let plus = scale_solution(&model.boundary, b / 2.0, params);
    let minus = scale_solution(&model.boundary, -b / 2.0, params);
    RdScenario {
        f_plus: plus.shape,
        f_minus: minus.shape,
        jump: b,
    }
}

/// Exact bias/variance/MSE of a two-sided kernel at a two-sided scenario.
pub fn rd_analytic_risk(
    kernel: &KernelSpec,
    scenario: &RdScenario,
    noise: &NoiseModel,
) -> AnalyticRisk {
    assert!(
        kernel.side == KernelSide::RdAntisymmetric,
        "two-sided risk accounting needs a two-sided kernel"
    );
    let psi = kernel.as_shape();
    let mean = inner_product(&psi, &scenario.f_plus) - inner_product(&psi, &scenario.f_minus);
    let bias = mean - scenario.jump;
    let variance = noise.sigma() * noise.sigma() * kernel.norm_sq();
    AnalyticRisk {
        bias,
        bias_sq: bias * bias,
        variance,
        mse: bias * bias + variance,
    }
}

/// One simulated one-sided path: cell left-endpoint times and increments.
pub fn sample_increments(
    f: &PiecewiseQuadratic,
    noise: &NoiseModel,
    config: &PathConfig,
    replicate: u64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    config.validate()?;
    let m = config.cells();
    let step = config.step;
    let scale = noise.sigma() * step.sqrt();
    let xi = rng::noise_vector(config.seed, replicate, m);
    let times: Vec<f64> = (0..m).map(|i| i as f64 * step).collect();
    let increments: Vec<f64> = times
        .iter()
        .zip(&xi)
        .map(|(t, x)| f.eval(*t) * step + scale * x)
        .collect();
    Ok((times, increments))
}

/// One simulated two-sided path on the symmetric grid -m..m. The cell
/// starting at time -k step carries noise address m + k, so both sides stay
/// pinned when the grid widens on one side only.
pub fn sample_rd_increments(
    scenario: &RdScenario,
    noise: &NoiseModel,
    config: &PathConfig,
    replicate: u64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    config.validate()?;
    let m = config.cells();
    let step = config.step;
    let scale = noise.sigma() * step.sqrt();
    let xi = rng::noise_vector(config.seed, replicate, 2 * m + 1);
    let times: Vec<f64> = (-(m as i64)..m as i64).map(|i| i as f64 * step).collect();
    let increments: Vec<f64> = times
        .iter()
        .map(|t| {
            let (mean, cell) = if *t >= -0.5 * step {
                // Positive cell [t, t + step), distance endpoint t itself.
                let i = (*t / step).round() as usize;
                (scenario.f_plus.eval(*t) * step, i)
            } else {
                // Negative cell [t, t + step), distance endpoint -t - step.
                let k = (-*t / step).round() as usize;
                (scenario.f_minus.eval(-*t - step) * step, m + k)
            };
            mean + scale * xi[cell]
        })
        .collect();
    Ok((times, increments))
}

/// Monte Carlo summary of repeated estimation on simulated paths.
#[derive(Debug, Clone, Copy)]
pub struct SimulationReport {
    pub replications: u64,
    pub empirical_mse: f64,
    /// Standard error of the empirical MSE.
    pub mse_stderr: f64,
    /// Mean estimate minus the truth.
    pub empirical_bias: f64,
    /// Exact MSE of this kernel at this signal (not the minimax value).
    pub analytic_risk: f64,
    pub seed: u64,
    pub delta_t: f64,
    pub horizon: f64,
}

fn summarize(
    estimates: &[f64],
    truth: f64,
    analytic: f64,
    config: &PathConfig,
) -> SimulationReport {
    let n = estimates.len() as f64;
    let mean_est = estimates.iter().sum::<f64>() / n;
    let sq: Vec<f64> = estimates
        .iter()
        .map(|e| (e - truth) * (e - truth))
        .collect();
    let mse = sq.iter().sum::<f64>() / n;
    let var_of_sq = sq.iter().map(|s| (s - mse) * (s - mse)).sum::<f64>() / (n - 1.0);
    SimulationReport {
        replications: estimates.len() as u64,
        empirical_mse: mse,
        mse_stderr: (var_of_sq / n).sqrt(),
        empirical_bias: mean_est - truth,
        analytic_risk: analytic,
        seed: config.seed,
        delta_t: config.step,
        horizon: config.horizon,
    }
}

fn validate_replications(replications: u64) -> Result<()> {
    if replications < 100 {
        return Err(Error::InvalidParameter {
            name: "replications",
            requirement: "at least 100",
            value: replications as f64,
        });
    }
    Ok(())
}

/// Repeatedly simulates one-sided paths under `f` and applies the kernel.
///
/// Replicates run in parallel; the replicate-addressed noise makes the
/// result bit-identical for any thread count.
pub fn monte_carlo_risk(
    kernel: &KernelSpec,
    f: &PiecewiseQuadratic,
    f_at_0: f64,
    noise: &NoiseModel,
    config: &PathConfig,
    replications: u64,
) -> Result<SimulationReport> {
    if kernel.side != KernelSide::Boundary {
        return Err(Error::Configuration(
            "one-sided simulation needs a boundary kernel; use the two-sided runner".into(),
        ));
    }
    validate_replications(replications)?;
    config.validate()?;
    let m = config.cells();
    let step = config.step;
    let times: Vec<f64> = (0..m).map(|i| i as f64 * step).collect();
    let weights = estimator_weights(kernel, &times)?;
    let means: Vec<f64> = times.iter().map(|t| f.eval(*t) * step).collect();
    let scale = noise.sigma() * step.sqrt();
    let seed = config.seed;

    let estimates: Vec<f64> = (0..replications)
        .into_par_iter()
        .map(|r| {
            let xi = rng::noise_vector(seed, r, m);
            let mut total = 0.0;
            for i in 0..m {
                total += weights[i] * (means[i] + scale * xi[i]);
            }
            total
        })
        .collect();
    let analytic = analytic_risk(kernel, f, f_at_0, noise).mse;
    Ok(summarize(&estimates, f_at_0, analytic, config))
}

/// Two-sided counterpart of [`monte_carlo_risk`] for jump estimation.
pub fn rd_monte_carlo(
    kernel: &KernelSpec,
    scenario: &RdScenario,
    noise: &NoiseModel,
    config: &PathConfig,
    replications: u64,
) -> Result<SimulationReport> {
    if kernel.side != KernelSide::RdAntisymmetric {
        return Err(Error::Configuration(
            "two-sided simulation needs an antisymmetric kernel; use the one-sided runner".into(),
        ));
    }
    validate_replications(replications)?;
    config.validate()?;
    let m = config.cells();
    let step = config.step;
    let times: Vec<f64> = (-(m as i64)..m as i64).map(|i| i as f64 * step).collect();
    let weights = estimator_weights(kernel, &times)?;
    let means: Vec<f64> = times
        .iter()
        .map(|t| {
            if *t >= -0.5 * step {
                scenario.f_plus.eval(*t) * step
            } else {
                scenario.f_minus.eval(-*t - step) * step
            }
        })
        .collect();
    // Noise address per cell: i for the cell at time i step, m + k for the
    // cell at time -k step.
    let cells: Vec<usize> = times
        .iter()
        .map(|t| {
            if *t >= -0.5 * step {
                (*t / step).round() as usize
            } else {
                m + (-*t / step).round() as usize
            }
        })
        .collect();
    let scale = noise.sigma() * step.sqrt();
    let seed = config.seed;

    let estimates: Vec<f64> = (0..replications)
        .into_par_iter()
        .map(|r| {
            let xi = rng::noise_vector(seed, r, 2 * m + 1);
            let mut total = 0.0;
            for i in 0..times.len() {
                total += weights[i] * (means[i] + scale * xi[cells[i]]);
            }
            total
        })
        .collect();
    let analytic = rd_analytic_risk(kernel, scenario, noise).mse;
    Ok(summarize(&estimates, scenario.jump, analytic, config))
}
