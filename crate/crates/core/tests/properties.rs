//! Property tests for the invariants the construction promises: smooth
//! gluing, curvature feasibility, scaling laws, modulus algebra, kernel
//! identities, probe domination, Riemann-error order, and bit-exact
//! reproducibility of the simulator.

use std::sync::LazyLock;

use proptest::prelude::*;
use rayon::ThreadPoolBuilder;

use minimax_boundary::kernel_risk::{
    analytic_risk, boundary_kernel, estimator_weights, minimax_risk, modulus, modulus_inverse,
    rd_kernel, rd_minimax_risk, rd_modulus, NoiseModel,
};
use minimax_boundary::least_favorable::{
    build_boundary_solution, build_interior_solution, scale_solution, y_objective,
};
use minimax_boundary::oracle::{solve_discretized, DiscretizedProblem};
use minimax_boundary::piecewise::{Piece, PiecewiseQuadratic};
use minimax_boundary::simulator::{monte_carlo_risk, PathConfig};
use minimax_boundary::{tolerances, Model, SmoothnessParams};

const I_STAR: f64 = 0.2667203959762920;

static MODEL: LazyLock<Model> = LazyLock::new(|| Model::solve().unwrap());

/// Junction depths away from the degenerate y -> 1 end.
fn depth() -> impl Strategy<Value = f64> {
    -0.85..0.9f64
}

/// Nonzero boundary values of either sign.
fn boundary_value() -> impl Strategy<Value = f64> {
    (0.05..4.0f64, any::<bool>()).prop_map(|(m, neg)| if neg { -m } else { m })
}

fn check_c1_gluing(shape: &PiecewiseQuadratic, value_scale: f64) {
    let knots = shape.knots();
    let pieces = shape.pieces();
    let tol = tolerances::C1_GLUING * value_scale.max(1.0);
    for k in 1..pieces.len() {
        let len = knots[k] - knots[k - 1];
        let left_v = pieces[k - 1].eval(len);
        let left_d = pieces[k - 1].deriv(len);
        let right_v = pieces[k].eval(0.0);
        let right_d = pieces[k].deriv(0.0);
        assert!(
            (left_v - right_v).abs() < tol,
            "value jump {} at knot {k}",
            left_v - right_v
        );
        assert!(
            (left_d - right_d).abs() < tol,
            "slope jump {} at knot {k}",
            left_d - right_d
        );
    }
    // The final piece lands on the zero tail.
    let last = pieces.len() - 1;
    let len = knots[last + 1] - knots[last];
    assert!(pieces[last].eval(len).abs() < tol, "tail value mismatch");
    assert!(pieces[last].deriv(len).abs() < tol, "tail slope mismatch");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn junction_family_glues_smoothly_at_every_knot(
        y in depth(),
        exponent in -13.0..-10.0f64,
    ) {
        let truncation = 10f64.powf(exponent);
        let interior = build_interior_solution(MODEL.constants.k0, truncation).unwrap();
        let boundary = build_boundary_solution(y, &interior).unwrap();
        check_c1_gluing(&boundary.shape, 1.0);
    }

    #[test]
    fn junction_family_is_curvature_feasible_with_increasing_knots(
        y in depth(),
        b in boundary_value(),
        c in 0.2..5.0f64,
    ) {
        let params = SmoothnessParams::new(c).unwrap();
        let base = build_boundary_solution(y, &MODEL.interior).unwrap();
        let scaled = scale_solution(&base, b, &params);
        for p in scaled.shape.pieces() {
            prop_assert!(
                p.curvature.abs() <= c * (1.0 + 1e-12),
                "curvature {} above the bound {c}",
                p.curvature
            );
        }
        for w in scaled.shape.knots().windows(2) {
            prop_assert!(w[1] > w[0], "knots not increasing: {} then {}", w[0], w[1]);
        }
        prop_assert_eq!(scaled.shape.eval(0.0), b);
    }

    #[test]
    fn squared_norm_follows_the_scaling_law(
        b in boundary_value(),
        c in 0.2..5.0f64,
    ) {
        let params = SmoothnessParams::new(c).unwrap();
        let scaled = scale_solution(&MODEL.boundary, b, &params);
        // Stored value is the closed-form law; integrating the shape must agree.
        let integrated = scaled.shape.norm_sq();
        let law = b.abs().powf(2.5) / c.sqrt() * MODEL.boundary.norm_sq;
        prop_assert!((scaled.norm_sq - law).abs() <= 1e-15 * law.abs());
        prop_assert!(
            (integrated - law).abs() < tolerances::SCALING_LAW_REL * law.abs(),
            "integrated {integrated} vs law {law}"
        );
    }

    #[test]
    fn quadrature_norm_matches_the_closed_form(y in depth()) {
        let boundary = build_boundary_solution(y, &MODEL.interior).unwrap();
        let closed = y_objective(y, MODEL.interior.norm_sq);
        prop_assert!(
            (boundary.norm_sq - closed).abs() < tolerances::QUADRATURE_AGREEMENT,
            "quadrature {} vs closed form {closed}",
            boundary.norm_sq
        );
    }

    #[test]
    fn modulus_is_monotone_and_inverts(
        delta in 0.05..8.0f64,
        bump in 0.01..2.0f64,
        c in 0.2..5.0f64,
    ) {
        let params = SmoothnessParams::new(c).unwrap();
        let lo = modulus(&MODEL, &params, delta).unwrap();
        let hi = modulus(&MODEL, &params, delta + bump).unwrap();
        prop_assert!(hi.b_value > lo.b_value);
        let back = modulus_inverse(&MODEL, &params, lo.b_value).unwrap();
        prop_assert!((back - delta).abs() < 1e-9 * delta);
        // The two-sided modulus gains exactly 2^{3/5}.
        let rd = rd_modulus(&MODEL, &params, delta).unwrap();
        prop_assert!(
            (rd.b_value - 2f64.powf(0.6) * lo.b_value).abs()
                < tolerances::RD_IDENTITY_REL * rd.b_value
        );
    }

    #[test]
    fn kernel_is_the_rescaled_solution_everywhere(
        sigma in 0.3..3.0f64,
        c in 0.3..3.0f64,
        fraction in 0.0..1.0f64,
    ) {
        let noise = NoiseModel::new(sigma).unwrap();
        let params = SmoothnessParams::new(c).unwrap();
        let kernel = boundary_kernel(&MODEL, &noise, &params);
        let report = minimax_risk(&MODEL, &noise, &params);
        let lf = scale_solution(&MODEL.boundary, report.b_star, &params);
        let factor = report.risk / (sigma * sigma * report.b_star);
        let t = kernel.support_end() * fraction;
        let lhs = kernel.eval(t);
        let rhs = factor * lf.shape.eval(t);
        prop_assert!(
            (lhs - rhs).abs() < tolerances::KERNEL_ASSEMBLY_REL * kernel.amplitude,
            "kernel {lhs} vs rescaled solution {rhs} at t = {t}"
        );
    }

    #[test]
    fn risk_decomposes_and_two_sided_ratios_hold(
        sigma in 0.3..3.0f64,
        c in 0.3..3.0f64,
    ) {
        let noise = NoiseModel::new(sigma).unwrap();
        let params = SmoothnessParams::new(c).unwrap();
        let one = minimax_risk(&MODEL, &noise, &params);
        prop_assert!(
            (one.bias_sq + one.variance - one.risk).abs()
                < tolerances::RISK_DECOMPOSITION_REL * one.risk
        );
        // Worst-case squared bias is exactly one fifth of the risk.
        prop_assert!(
            (one.bias_sq - one.risk / 5.0).abs() < tolerances::RISK_DECOMPOSITION_REL * one.risk
        );
        // Variance is the noise level times the kernel's squared norm.
        let kernel = boundary_kernel(&MODEL, &noise, &params);
        prop_assert!(
            (one.variance - sigma * sigma * kernel.norm_sq()).abs() < 1e-8 * one.risk
        );
        let two = rd_minimax_risk(&MODEL, &noise, &params);
        prop_assert!(
            (two.risk - 2f64.powf(1.2) * one.risk).abs() < tolerances::RD_IDENTITY_REL * two.risk
        );
        prop_assert!(
            (two.b_star - 2f64.powf(0.6) * one.b_star).abs()
                < tolerances::RD_IDENTITY_REL * two.b_star
        );
        let rd = rd_kernel(&MODEL, &noise, &params);
        prop_assert!(
            (rd.amplitude - 2f64.powf(0.2) * kernel.amplitude).abs()
                < tolerances::RD_IDENTITY_REL * rd.amplitude
        );
    }

    #[test]
    fn no_class_member_probe_beats_the_minimax_risk(
        sigma in 0.3..3.0f64,
        c in 0.3..3.0f64,
        y in depth(),
        fraction in -1.2..1.2f64,
    ) {
        let noise = NoiseModel::new(sigma).unwrap();
        let params = SmoothnessParams::new(c).unwrap();
        let kernel = boundary_kernel(&MODEL, &noise, &params);
        let report = minimax_risk(&MODEL, &noise, &params);
        let family = build_boundary_solution(y, &MODEL.interior).unwrap();
        let probe = scale_solution(&family, fraction * report.b_star, &params);
        let mse = analytic_risk(&kernel, &probe.shape, probe.b, &noise).mse;
        prop_assert!(
            mse <= report.risk * (1.0 + 1e-6),
            "probe at y = {y}, b = {} reaches mse {mse} above the risk {}",
            probe.b,
            report.risk
        );
        // A pure quadratic at the curvature bound, cut beyond the kernel.
        let cut = kernel.support_end() * 2.0;
        for sign in [1.0, -1.0] {
            let quad = PiecewiseQuadratic::new(
                vec![0.0, cut],
                vec![Piece { value: 0.0, slope: 0.0, curvature: sign * c }],
                0.0,
            )
            .unwrap();
            let mse = analytic_risk(&kernel, &quad, 0.0, &noise).mse;
            prop_assert!(mse <= report.risk * (1.0 + 1e-6));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn riemann_error_is_first_order_in_the_step(
        sigma in 0.5..2.0f64,
        c in 0.5..2.0f64,
    ) {
        let noise = NoiseModel::new(sigma).unwrap();
        let params = SmoothnessParams::new(c).unwrap();
        let kernel = boundary_kernel(&MODEL, &noise, &params);
        let report = minimax_risk(&MODEL, &noise, &params);
        let lf = scale_solution(&MODEL.boundary, report.b_star, &params);
        let mean = analytic_risk(&kernel, &lf.shape, lf.b, &noise).bias + lf.b;
        let err = |cells: usize| -> f64 {
            let step = kernel.support_end() * 1.02 / cells as f64;
            let times: Vec<f64> = (0..cells).map(|i| i as f64 * step).collect();
            let weights = estimator_weights(&kernel, &times).unwrap();
            let total: f64 = times
                .iter()
                .zip(&weights)
                .map(|(t, w)| w * lf.shape.eval(*t) * step)
                .sum();
            (total - mean).abs()
        };
        let ratio = err(1500) / err(3000);
        prop_assert!(
            (1.6..=2.4).contains(&ratio),
            "halving the step changed the error by {ratio}"
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn simulation_reports_are_bit_identical_for_any_thread_count(
        seed in any::<u64>(),
        replications in 100..300u64,
    ) {
        let noise = NoiseModel::new(1.0).unwrap();
        let params = SmoothnessParams::new(1.0).unwrap();
        let kernel = boundary_kernel(&MODEL, &noise, &params);
        let report = minimax_risk(&MODEL, &noise, &params);
        let lf = scale_solution(&MODEL.boundary, report.b_star, &params);
        let config = PathConfig {
            step: kernel.support_end() * 1.05 / 200.0,
            horizon: kernel.support_end() * 1.05,
            seed,
        };
        let serial = ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let threaded = ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let a = serial
            .install(|| monte_carlo_risk(&kernel, &lf.shape, lf.b, &noise, &config, replications))
            .unwrap();
        let b = threaded
            .install(|| monte_carlo_risk(&kernel, &lf.shape, lf.b, &noise, &config, replications))
            .unwrap();
        prop_assert_eq!(a.empirical_mse.to_bits(), b.empirical_mse.to_bits());
        prop_assert_eq!(a.empirical_bias.to_bits(), b.empirical_bias.to_bits());
        prop_assert_eq!(a.mse_stderr.to_bits(), b.mse_stderr.to_bits());
    }
}

/// Moment identities survive any truncation depth of the interior recursion:
/// the first moment vanishes and the mass equals 5/4 of the squared norm, up
/// to the ~1e-8 localization error of the solved junction depth.
#[test]
fn moment_conditions_are_stable_across_truncation_depth() {
    for exponent in [-13.0, -12.0, -11.0, -10.0] {
        let interior = build_interior_solution(MODEL.constants.k0, 10f64.powf(exponent)).unwrap();
        let boundary = build_boundary_solution(MODEL.constants.y_star, &interior).unwrap();
        let m1 = boundary.shape.moment(1);
        let m0 = boundary.shape.moment(0);
        assert!(m1.abs() < 2e-7, "first moment {m1} at truncation 1e{exponent}");
        assert!(
            (m0 - 1.25 * boundary.norm_sq).abs() < 2e-7,
            "mass {m0} vs 1.25 norm {}",
            1.25 * boundary.norm_sq
        );
    }
}

/// The discretized minimum converges to the continuum value at second order
/// in the step: doubling the grid divides the gap by about four.
#[test]
fn discretization_error_decays_at_second_order() {
    let solve = |grid_count: usize| {
        solve_discretized(&DiscretizedProblem {
            horizon: 4.0,
            grid_count,
            lipschitz_constant: 1.0,
            boundary_value: 1.0,
            constrain_slope: false,
            tol: 1e-9,
            max_iters: 400_000,
        })
        .unwrap()
    };
    let err_coarse = solve(500).min_norm_sq - I_STAR;
    let err_fine = solve(1000).min_norm_sq - I_STAR;
    assert!(err_coarse > 0.0 && err_fine > 0.0, "discrete minima must sit above the continuum");
    let ratio = err_coarse / err_fine;
    assert!(
        (3.0..=5.0).contains(&ratio),
        "doubling the grid changed the error by {ratio}"
    );
}

/// Across independent seeds, the empirical MSE stays within its own error
/// bars of the analytic risk: at 3.5 standard errors, 18 of 20 runs passing
/// is a conservative floor.
#[test]
fn zero_signal_meta_replication_stays_within_error_bars() {
    let noise = NoiseModel::new(1.0).unwrap();
    let params = SmoothnessParams::new(1.0).unwrap();
    let kernel = boundary_kernel(&MODEL, &noise, &params);
    let zero = PiecewiseQuadratic::zero();
    let mut hits = 0;
    for seed in 0..20u64 {
        let config = PathConfig {
            step: kernel.support_end() * 1.02 / 256.0,
            horizon: kernel.support_end() * 1.02,
            seed: 1000 + seed,
        };
        let report = monte_carlo_risk(&kernel, &zero, 0.0, &noise, &config, 200).unwrap();
        if (report.empirical_mse - report.analytic_risk).abs() <= 3.5 * report.mse_stderr {
            hits += 1;
        }
    }
    assert!(hits >= 18, "only {hits} of 20 seeds landed inside 3.5 standard errors");
}
