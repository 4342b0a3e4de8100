//! Report rendering: JSON and CSV text for the command-line tools.
//!
//! Output is deliberately hand-assembled: the schemas are small and fixed,
//! and byte-stable output matters more than generality (reruns must be
//! byte-identical). Floating-point values are printed with 17 significant
//! digits, enough to round-trip f64 exactly. Every numeric field in a JSON
//! report is tagged in a parallel `sources` object with how it was obtained:
//! "closed_form" for constructed/algebraic values, "oracle" for values from
//! the discretized solver, "display" for values quoted from the closed-form
//! read-off convention.

use crate::kernel_risk::{KernelSide, KernelSpec, RiskReport};
use crate::least_favorable::Model;
use crate::oracle::{recovered_support, BatteryReport};
use crate::simulator::SimulationReport;

/// A JSON value with insertion-ordered objects.
#[derive(Debug, Clone)]
pub enum Json {
    Num(f64),
    UInt(u64),
    Bool(bool),
    Str(String),
    Arr(Vec<Json>),
    Obj(Vec<(String, Json)>),
}

impl Json {
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.write(&mut out, 0);
        out.push('\n');
        out
    }

    fn write(&self, out: &mut String, indent: usize) {
        match self {
            Json::Num(x) => out.push_str(&format_float(*x)),
            Json::UInt(n) => out.push_str(&n.to_string()),
            Json::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
            Json::Str(s) => write_escaped(out, s),
            Json::Arr(items) => {
                if items.is_empty() {
                    out.push_str("[]");
                    return;
                }
                out.push('[');
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    out.push('\n');
                    push_indent(out, indent + 1);
                    item.write(out, indent + 1);
                }
                out.push('\n');
                push_indent(out, indent);
                out.push(']');
            }
            Json::Obj(fields) => {
                if fields.is_empty() {
                    out.push_str("{}");
                    return;
                }
                out.push('{');
                for (i, (key, value)) in fields.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    out.push('\n');
                    push_indent(out, indent + 1);
                    write_escaped(out, key);
                    out.push_str(": ");
                    value.write(out, indent + 1);
                }
                out.push('\n');
                push_indent(out, indent);
                out.push('}');
            }
        }
    }
}

fn push_indent(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push_str("  ");
    }
}

/// 17 significant digits: exact f64 round-trip.
pub fn format_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        // The schemas never produce non-finite values; null keeps the
        // document parseable if one slips through.
        "null".to_string()
    }
}

fn write_escaped(out: &mut String, s: &str) {
    out.push('"');
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
}

fn obj(fields: Vec<(&str, Json)>) -> Json {
    Json::Obj(
        fields
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect(),
    )
}

fn sources(tags: &[(&str, &str)]) -> Json {
    Json::Obj(
        tags.iter()
            .map(|(k, v)| (k.to_string(), Json::Str(v.to_string())))
            .collect(),
    )
}

/// The solved constants, with both support-end candidates and the risk
/// constant in both normalizations side by side.
pub fn constants_json(model: &Model) -> Json {
    let c = &model.constants;
    let without_fifth = 2f64.powf(1.6) * c.i_star.powf(-0.8);
    obj(vec![
        ("k0", Json::Num(c.k0)),
        ("I0", Json::Num(c.i0_norm_sq)),
        ("y_star", Json::Num(c.y_star)),
        ("I_star", Json::Num(c.i_star)),
        ("f_prime_0", Json::Num(c.f_prime0)),
        ("t_bar_display", Json::Num(c.t_bar_display)),
        ("t_bar_recursion", Json::Num(c.t_bar_recursion)),
        ("risk_constant", Json::Num(without_fifth / 5.0)),
        ("risk_constant_without_fifth", Json::Num(without_fifth)),
        (
            "sources",
            sources(&[
                ("k0", "closed_form"),
                ("I0", "closed_form"),
                ("y_star", "closed_form"),
                ("I_star", "closed_form"),
                ("f_prime_0", "closed_form"),
                ("t_bar_display", "display"),
                ("t_bar_recursion", "closed_form"),
                ("risk_constant", "closed_form"),
                ("risk_constant_without_fifth", "closed_form"),
            ]),
        ),
    ])
}

/// CSV twin of [`constants_json`]: `key,value` rows.
pub fn constants_csv(model: &Model) -> String {
    let c = &model.constants;
    let without_fifth = 2f64.powf(1.6) * c.i_star.powf(-0.8);
    let rows = [
        ("k0", c.k0),
        ("I0", c.i0_norm_sq),
        ("y_star", c.y_star),
        ("I_star", c.i_star),
        ("f_prime_0", c.f_prime0),
        ("t_bar_display", c.t_bar_display),
        ("t_bar_recursion", c.t_bar_recursion),
        ("risk_constant", without_fifth / 5.0),
        ("risk_constant_without_fifth", without_fifth),
    ];
    let mut out = String::from("key,value\n");
    for (key, value) in rows {
        out.push_str(key);
        out.push(',');
        out.push_str(&format_float(value));
        out.push('\n');
    }
    out
}

/// Risk decomposition for one configuration.
pub fn risk_report_json(report: &RiskReport) -> Json {
    obj(vec![
        ("sigma", Json::Num(report.sigma)),
        ("C", Json::Num(report.c_lipschitz)),
        ("delta_star", Json::Num(report.delta_star)),
        ("b_star", Json::Num(report.b_star)),
        ("risk", Json::Num(report.risk)),
        ("bias_sq", Json::Num(report.bias_sq)),
        ("variance", Json::Num(report.variance)),
        (
            "risk_constant_without_fifth",
            Json::Num(report.risk_constant_without_fifth),
        ),
        (
            "sources",
            sources(&[
                ("sigma", "closed_form"),
                ("C", "closed_form"),
                ("delta_star", "closed_form"),
                ("b_star", "closed_form"),
                ("risk", "closed_form"),
                ("bias_sq", "closed_form"),
                ("variance", "closed_form"),
                ("risk_constant_without_fifth", "closed_form"),
            ]),
        ),
    ])
}

/// Kernel metadata written next to a sampled kernel CSV.
pub fn kernel_json(kernel: &KernelSpec, report: &RiskReport, grid_n: usize) -> Json {
    let side = match kernel.side {
        KernelSide::Boundary => "boundary",
        KernelSide::RdAntisymmetric => "antisymmetric",
    };
    obj(vec![
        ("side", Json::Str(side.to_string())),
        ("sigma", Json::Num(kernel.sigma())),
        ("C", Json::Num(kernel.lipschitz_constant())),
        ("amplitude", Json::Num(kernel.amplitude)),
        ("time_rescale", Json::Num(kernel.time_rescale)),
        ("support_end", Json::Num(kernel.support_end())),
        ("norm_sq", Json::Num(kernel.norm_sq())),
        ("grid_n", Json::UInt(grid_n as u64)),
        ("risk", risk_report_json(report)),
        (
            "sources",
            sources(&[
                ("sigma", "closed_form"),
                ("C", "closed_form"),
                ("amplitude", "closed_form"),
                ("time_rescale", "closed_form"),
                ("support_end", "closed_form"),
                ("norm_sq", "closed_form"),
            ]),
        ),
    ])
}

/// Samples a kernel on grid_n+1 points per side: `t,psi` rows. Boundary
/// kernels cover [0, support]; antisymmetric kernels cover [-support,
/// support] so the sign flip is visible in the file.
pub fn kernel_csv(kernel: &KernelSpec, grid_n: usize) -> String {
    assert!(grid_n >= 1, "kernel sampling needs at least one cell");
    let support = kernel.support_end();
    let mut out = String::from("t,psi\n");
    let lo: i64 = match kernel.side {
        KernelSide::Boundary => 0,
        KernelSide::RdAntisymmetric => -(grid_n as i64),
    };
    for i in lo..=grid_n as i64 {
        let t = support * i as f64 / grid_n as f64;
        out.push_str(&format_float(t));
        out.push(',');
        out.push_str(&format_float(kernel.eval(t)));
        out.push('\n');
    }
    out
}

/// The solved grid function of a discretized solve: `t,f` rows.
pub fn grid_csv(result: &crate::oracle::OracleResult) -> String {
    let mut out = String::from("t,f\n");
    for (i, v) in result.values.iter().enumerate() {
        out.push_str(&format_float(result.time(i)));
        out.push(',');
        out.push_str(&format_float(*v));
        out.push('\n');
    }
    out
}

/// Verification ledger: headline numbers from the main solves plus one
/// pass/fail entry per check.
///
/// `constrained_slope` is the minimum of the slope-pinned problem,
/// `min_norm_sq` the minimum of the free-slope problem; `iterations` and
/// `kkt_residual` describe the free-slope solve.
pub fn battery_json(model: &Model, report: &BatteryReport) -> Json {
    let checks: Vec<Json> = report
        .checks
        .iter()
        .map(|c| {
            obj(vec![
                ("name", Json::Str(c.name.clone())),
                ("passed", Json::Bool(c.passed)),
                ("observed", Json::Num(c.observed)),
                ("expected", Json::Num(c.expected)),
                ("tolerance", Json::Num(c.tolerance)),
                ("detail", Json::Str(c.detail.clone())),
            ])
        })
        .collect();
    let free = &report.free;
    obj(vec![
        ("profile", Json::Str(report.profile.name().to_string())),
        ("T", Json::Num(free.horizon)),
        ("N", Json::UInt(free.grid_count as u64)),
        ("constrained_slope", Json::Num(report.constrained.min_norm_sq)),
        ("min_norm_sq", Json::Num(free.min_norm_sq)),
        ("initial_slope", Json::Num(free.initial_slope)),
        ("recovered_support", Json::Num(recovered_support(free))),
        ("iterations", Json::UInt(free.iterations)),
        ("kkt_residual", Json::Num(free.kkt_residual)),
        ("i_star_closed_form", Json::Num(model.constants.i_star)),
        ("all_passed", Json::Bool(report.all_passed)),
        ("checks", Json::Arr(checks)),
        (
            "sources",
            sources(&[
                ("constrained_slope", "oracle"),
                ("min_norm_sq", "oracle"),
                ("initial_slope", "oracle"),
                ("recovered_support", "oracle"),
                ("kkt_residual", "oracle"),
                ("i_star_closed_form", "closed_form"),
            ]),
        ),
    ])
}

/// CSV twin of the battery checks: one row per check.
pub fn battery_csv(report: &BatteryReport) -> String {
    let mut out = String::from("name,passed,observed,expected,tolerance\n");
    for c in &report.checks {
        out.push_str(&c.name);
        out.push(',');
        out.push_str(if c.passed { "true" } else { "false" });
        out.push(',');
        out.push_str(&format_float(c.observed));
        out.push(',');
        out.push_str(&format_float(c.expected));
        out.push(',');
        out.push_str(&format_float(c.tolerance));
        out.push('\n');
    }
    out
}

/// Monte Carlo summary.
pub fn simulation_json(report: &SimulationReport) -> Json {
    obj(vec![
        ("replications", Json::UInt(report.replications)),
        ("empirical_mse", Json::Num(report.empirical_mse)),
        ("mse_stderr", Json::Num(report.mse_stderr)),
        ("empirical_bias", Json::Num(report.empirical_bias)),
        ("analytic_risk", Json::Num(report.analytic_risk)),
        ("seed", Json::UInt(report.seed)),
        ("delta_t", Json::Num(report.delta_t)),
        ("horizon", Json::Num(report.horizon)),
        (
            "sources",
            sources(&[
                ("empirical_mse", "oracle"),
                ("mse_stderr", "oracle"),
                ("empirical_bias", "oracle"),
                ("analytic_risk", "closed_form"),
            ]),
        ),
    ])
}

/// CSV twin of [`simulation_json`]: `key,value` rows.
pub fn simulation_csv(report: &SimulationReport) -> String {
    let rows = [
        ("replications", report.replications as f64),
        ("empirical_mse", report.empirical_mse),
        ("mse_stderr", report.mse_stderr),
        ("empirical_bias", report.empirical_bias),
        ("analytic_risk", report.analytic_risk),
        ("seed", report.seed as f64),
        ("delta_t", report.delta_t),
        ("horizon", report.horizon),
    ];
    let mut out = String::from("key,value\n");
    for (key, value) in rows {
        out.push_str(key);
        out.push(',');
        out.push_str(&format_float(value));
        out.push('\n');
    }
    out
}
