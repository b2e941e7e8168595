//! Experiment runner: reads a JSON config, runs one experiment, and writes a
//! report plus CSV series into a fresh run directory.

pub mod commands;
pub mod config;
pub mod error;
pub mod plotdata;
pub mod report;

use std::path::{Path, PathBuf};

use log::info;

use crate::commands::Ctx;
use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::report::{
    assumption_flags, create_run_dir, write_json, Derived, Outcome, Report, REPORT_FILE,
};

pub use plotdata::{emit_plotdata, PlotSummary};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Experiment {
    Solve,
    FkVerify,
    Stability,
    Taylor,
    RandomField,
    Assumptions,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Solve => "solve",
            Experiment::FkVerify => "fk-verify",
            Experiment::Stability => "stability",
            Experiment::Taylor => "taylor",
            Experiment::RandomField => "random-field",
            Experiment::Assumptions => "assumptions",
        }
    }

    fn run(self, ctx: &Ctx) -> Result<Outcome, CliError> {
        match self {
            Experiment::Solve => commands::solve(ctx),
            Experiment::FkVerify => commands::fk_verify(ctx),
            Experiment::Stability => commands::stability(ctx),
            Experiment::Taylor => commands::taylor(ctx),
            Experiment::RandomField => commands::random_field(ctx),
            Experiment::Assumptions => commands::assumptions(ctx),
        }
    }
}

/// Command-line overrides applied on top of the config file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub paths: Option<usize>,
}

/// Where a run went and how it ended.
#[derive(Debug)]
pub struct RunSummary {
    pub dir: PathBuf,
    pub passed: bool,
    /// Set when the run stopped on an error after the directory was created.
    pub error: Option<CliError>,
}

impl RunSummary {
    pub fn exit_code(&self) -> i32 {
        match (&self.error, self.passed) {
            (Some(e), _) => e.exit_code(),
            (None, true) => 0,
            (None, false) => 1,
        }
    }
}

/// Loads and validates the config, then runs the experiment in a new directory under `out`.
///
/// Configuration problems return `Err` before anything is written. Failures
/// during the run still leave a report naming the error.
pub fn run_experiment(
    experiment: Experiment,
    config_path: &Path,
    out: &Path,
    overrides: &Overrides,
    timestamp: &str,
) -> Result<RunSummary, CliError> {
    let mut config = ExperimentConfig::from_path(config_path)?;
    if let Some(seed) = overrides.seed {
        config.monte_carlo.master_seed = seed;
    }
    if let Some(paths) = overrides.paths {
        config.monte_carlo.n_paths = paths;
    }
    let base_dir = config_path.parent().unwrap_or(Path::new("."));
    let setup = config.validate(base_dir, experiment)?;
    let dir = create_run_dir(out, experiment.name(), timestamp)?;
    info!("{} run in {}", experiment.name(), dir.display());
    write_json(&dir.join("config.json"), &setup.config)?;

    let flags = assumption_flags(&setup);
    let ctx = Ctx {
        setup: &setup,
        dir: &dir,
        flags: &flags,
    };
    let (outcome, error) = match experiment.run(&ctx) {
        Ok(o) => (o, None),
        Err(e) => (
            Outcome::new(vec![e.to_string()], serde_json::Value::Null),
            Some(e),
        ),
    };
    let report = Report {
        tool: "jumpfk",
        version: env!("CARGO_PKG_VERSION"),
        subcommand: experiment.name(),
        timestamp,
        config_hash: setup.config.hash(),
        derived: Derived::of(&setup),
        assumptions: flags.clone(),
        passed: outcome.passed && error.is_none(),
        violations: &outcome.violations,
        error: error.as_ref().map(|e| e.to_string()),
        results: &outcome.results,
    };
    write_json(&dir.join(REPORT_FILE), &report)?;
    Ok(RunSummary {
        dir,
        passed: report.passed,
        error,
    })
}

/// Current UTC time in the form used for run directories and reports.
pub fn timestamp_now() -> String {
    chrono::Utc::now()
        .format("%Y-%m-%dT%H:%M:%S%.3fZ")
        .to_string()
}
