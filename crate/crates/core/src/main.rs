//! Command-line front end: solve the model, export kernels, run the
//! discretized verification battery, and validate risk by simulation.

use std::path::PathBuf;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};

use minimax_boundary::kernel_risk::{
    boundary_kernel, minimax_risk, rd_kernel, rd_minimax_risk, NoiseModel,
};
use minimax_boundary::oracle::{run_battery, ToleranceProfile};
use minimax_boundary::simulator::{
    build_rd_scenario, monte_carlo_risk, rd_monte_carlo, PathConfig,
};
use minimax_boundary::{report, Model, SmoothnessParams};

/// Minimax linear estimation of a function value at the boundary under a
/// second-order curvature bound, with a two-sided jump variant.
#[derive(Parser)]
#[command(name = "minimax-boundary", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the model and print its constants.
    Constants(ConstantsArgs),
    /// Sample the one-sided kernel: writes STEM.csv and STEM.json.
    Kernel(KernelArgs),
    /// Sample the two-sided jump kernel: writes STEM.csv and STEM.json.
    RdKernel(KernelArgs),
    /// Re-derive the constants by discretized optimization and judge them.
    Oracle(OracleArgs),
    /// Monte Carlo check of the analytic risk at the least-favorable signal.
    Simulate(SimulateArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProfileArg {
    /// Deep solves, tight judgments; minutes of CPU.
    Strict,
    /// Coarse solves for routine regression runs; seconds of CPU.
    Quick,
}

impl From<ProfileArg> for ToleranceProfile {
    fn from(p: ProfileArg) -> Self {
        match p {
            ProfileArg::Strict => ToleranceProfile::Strict,
            ProfileArg::Quick => ToleranceProfile::Quick,
        }
    }
}

#[derive(Args)]
struct ConstantsArgs {
    #[arg(long, value_enum, default_value = "json")]
    format: FormatArg,
    /// Write here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct KernelArgs {
    /// Noise level of dY = f dt + sigma dW.
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    /// Curvature bound |f''| <= C.
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    /// Samples per side of the support.
    #[arg(long, default_value_t = 2048)]
    grid_n: usize,
    /// Output stem: STEM.csv holds the samples, STEM.json the metadata.
    #[arg(long)]
    out: String,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long, value_enum, default_value = "strict")]
    tolerance_profile: ProfileArg,
    /// Cells of the main discretized solves (profile default when omitted).
    #[arg(long)]
    grid_n: Option<usize>,
    /// Horizon of the main discretized solves (profile default when omitted).
    #[arg(long)]
    horizon: Option<f64>,
    #[arg(long, value_enum, default_value = "json")]
    format: FormatArg,
    /// Write the verification ledger here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the free-slope solution grid as CSV.
    #[arg(long)]
    solution_out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10_000)]
    replications: u64,
    /// Cells per kernel support length.
    #[arg(long, default_value_t = 4096)]
    grid_n: usize,
    /// Path horizon per side (default: 10% past the kernel support).
    #[arg(long)]
    horizon: Option<f64>,
    /// Simulate the two-sided jump problem instead of the boundary problem.
    #[arg(long)]
    rd: bool,
    #[arg(long, value_enum, default_value = "json")]
    format: FormatArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() {
    configure_threads();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            std::process::exit(1);
        }
    }
}

/// MINIMAX_BOUNDARY_THREADS pins the worker pool; 0 or unset means automatic.
fn configure_threads() {
    let Ok(raw) = std::env::var("MINIMAX_BOUNDARY_THREADS") else {
        return;
    };
    match raw.trim().parse::<usize>() {
        Ok(0) => {}
        Ok(n) => {
            // Build errors only if a global pool exists, which cannot happen
            // before first use; ignore any such race anyway.
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
        Err(_) => {
            eprintln!(
                "error: MINIMAX_BOUNDARY_THREADS must be a non-negative integer, got {raw:?}"
            );
            std::process::exit(2);
        }
    }
}

fn emit(out: &Option<PathBuf>, content: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => std::fs::write(path, content)
            .with_context(|| format!("writing {}", path.display()))?,
        None => print!("{content}"),
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<i32> {
    match cli.command {
        Command::Constants(args) => {
            let model = Model::solve()?;
            let content = match args.format {
                FormatArg::Json => report::constants_json(&model).render(),
                FormatArg::Csv => report::constants_csv(&model),
            };
            emit(&args.out, &content)?;
            Ok(0)
        }
        Command::Kernel(args) => kernel_command(&args, false),
        Command::RdKernel(args) => kernel_command(&args, true),
        Command::Oracle(args) => {
            let model = Model::solve()?;
            let battery = run_battery(
                &model,
                args.tolerance_profile.into(),
                args.grid_n,
                args.horizon,
            )?;
            let content = match args.format {
                FormatArg::Json => report::battery_json(&model, &battery).render(),
                FormatArg::Csv => report::battery_csv(&battery),
            };
            emit(&args.out, &content)?;
            if let Some(path) = &args.solution_out {
                std::fs::write(path, report::grid_csv(&battery.free))
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            if battery.all_passed {
                Ok(0)
            } else {
                eprintln!("verification failed: see the ledger for the failing checks");
                Ok(1)
            }
        }
        Command::Simulate(args) => {
            anyhow::ensure!(args.grid_n >= 1, "--grid-n must be at least 1");
            let model = Model::solve()?;
            let noise = NoiseModel::new(args.sigma)?;
            let params = SmoothnessParams::new(args.c)?;
            let kernel = if args.rd {
                rd_kernel(&model, &noise, &params)
            } else {
                boundary_kernel(&model, &noise, &params)
            };
            let support = kernel.support_end();
            let config = PathConfig {
                step: support / args.grid_n as f64,
                horizon: args.horizon.unwrap_or(1.1 * support),
                seed: args.seed,
            };
            let simulation = if args.rd {
                let b_star = rd_minimax_risk(&model, &noise, &params).b_star;
                let scenario = build_rd_scenario(&model, b_star, &params);
                rd_monte_carlo(&kernel, &scenario, &noise, &config, args.replications)?
            } else {
                let b_star = minimax_risk(&model, &noise, &params).b_star;
                let signal =
                    minimax_boundary::least_favorable::scale_solution(&model.boundary, b_star, &params);
                monte_carlo_risk(
                    &kernel,
                    &signal.shape,
                    b_star,
                    &noise,
                    &config,
                    args.replications,
                )?
            };
            let content = match args.format {
                FormatArg::Json => report::simulation_json(&simulation).render(),
                FormatArg::Csv => report::simulation_csv(&simulation),
            };
            emit(&args.out, &content)?;
            Ok(0)
        }
    }
}

fn kernel_command(args: &KernelArgs, rd: bool) -> anyhow::Result<i32> {
    anyhow::ensure!(args.grid_n >= 1, "--grid-n must be at least 1");
    let model = Model::solve()?;
    let noise = NoiseModel::new(args.sigma)?;
    let params = SmoothnessParams::new(args.c)?;
    let (kernel, risk) = if rd {
        (
            rd_kernel(&model, &noise, &params),
            rd_minimax_risk(&model, &noise, &params),
        )
    } else {
        (
            boundary_kernel(&model, &noise, &params),
            minimax_risk(&model, &noise, &params),
        )
    };
    let csv_path = PathBuf::from(format!("{}.csv", args.out));
    let json_path = PathBuf::from(format!("{}.json", args.out));
    std::fs::write(&csv_path, report::kernel_csv(&kernel, args.grid_n))
        .with_context(|| format!("writing {}", csv_path.display()))?;
    std::fs::write(
        &json_path,
        report::kernel_json(&kernel, &risk, args.grid_n).render(),
    )
    .with_context(|| format!("writing {}", json_path.display()))?;
    Ok(0)
}
