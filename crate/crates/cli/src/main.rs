use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use jumpfk_cli::{emit_plotdata, run_experiment, timestamp_now, Experiment, Overrides};
use log::{error, info, warn};

#[derive(Parser)]
#[command(
    name = "jumpfk",
    version,
    about = "Jump-process Feynman-Kac experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Deterministic logistic run and norm series
    Solve(RunArgs),
    /// Monte Carlo vs Duhamel series vs solver, and the logistic identity
    FkVerify(RunArgs),
    /// Decay envelopes and fitted decay rates
    Stability(RunArgs),
    /// Taylor hierarchy in the initial-data parameter and its bounds
    Taylor(RunArgs),
    /// Random initial perturbations: second moments and decay exponent
    RandomField(RunArgs),
    /// Non-negativity scan of J_kappa over kappa in [0, theta]
    Assumptions(RunArgs),
    /// Flat CSV bundles from finished runs
    Plotdata(PlotArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Overrides monte_carlo.master_seed
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides monte_carlo.n_paths
    #[arg(long)]
    paths: Option<usize>,
    #[arg(long)]
    quiet: bool,
}

#[derive(Args)]
struct PlotArgs {
    /// A run directory, or a directory of runs
    #[arg(long)]
    run: PathBuf,
    #[arg(long)]
    quiet: bool,
}

fn init_logging(quiet: bool) {
    let level = if quiet { "warn" } else { "info" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (experiment, args) = match cli.command {
        Command::Solve(a) => (Experiment::Solve, a),
        Command::FkVerify(a) => (Experiment::FkVerify, a),
        Command::Stability(a) => (Experiment::Stability, a),
        Command::Taylor(a) => (Experiment::Taylor, a),
        Command::RandomField(a) => (Experiment::RandomField, a),
        Command::Assumptions(a) => (Experiment::Assumptions, a),
        Command::Plotdata(p) => {
            init_logging(p.quiet);
            return match emit_plotdata(&p.run) {
                Ok(summary) => {
                    info!(
                        "wrote {} files, skipped {} directories",
                        summary.written.len(),
                        summary.skipped.len()
                    );
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    error!("{e}");
                    ExitCode::from(e.exit_code() as u8)
                }
            };
        }
    };
    init_logging(args.quiet);
    let overrides = Overrides {
        seed: args.seed,
        paths: args.paths,
    };
    match run_experiment(
        experiment,
        &args.config,
        &args.out,
        &overrides,
        &timestamp_now(),
    ) {
        Ok(summary) => {
            match (&summary.error, summary.passed) {
                (Some(e), _) => error!("{e}"),
                (None, true) => info!("passed; report in {}", summary.dir.display()),
                (None, false) => warn!("violations found; report in {}", summary.dir.display()),
            }
            ExitCode::from(summary.exit_code() as u8)
        }
        Err(e) => {
            error!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
