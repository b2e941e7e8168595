mod assumptions;
mod fk_verify;
mod random_field;
mod solve;
mod stability;
mod taylor;

use std::path::Path;

use jumpfk::io::{write_norms_csv, write_series_dir};
use jumpfk::solver::{solve_logistic, SolverRun, StepOptions};
use jumpfk::{Error, Field, NormRecord};
use log::warn;

use crate::config::Setup;
use crate::error::CliError;
use crate::report::{flag, write_json, write_table, AssumptionFlag, Outcome};

pub use assumptions::assumptions;
pub use fk_verify::fk_verify;
pub use random_field::random_field;
pub use solve::solve;
pub use stability::stability;
pub use taylor::taylor;

pub struct Ctx<'a> {
    pub setup: &'a Setup,
    pub dir: &'a Path,
    pub flags: &'a [AssumptionFlag],
}

impl Ctx<'_> {
    /// Violation messages for every listed assumption that fails.
    fn missing(&self, names: &[&str], experiment: &str) -> Vec<String> {
        names
            .iter()
            .map(|n| flag(self.flags, n))
            .filter(|f| !f.holds)
            .map(|f| {
                format!(
                    "{experiment} skipped: assumption `{}` fails ({}; {})",
                    f.name, f.statement, f.detail
                )
            })
            .collect()
    }

    fn u0(&self) -> Field<f64> {
        let s = self.setup;
        s.config
            .initial
            .build(&s.grid, s.params.theta(), &s.base_dir)
            .expect("validated")
    }
}

/// Runs the logistic solver, halving `dt` once if positivity is lost.
pub(crate) fn logistic_with_retry(
    setup: &Setup,
    u0: &Field<f64>,
    opts: StepOptions<f64>,
) -> Result<(SolverRun<f64>, StepOptions<f64>, bool), CliError> {
    match solve_logistic(u0, &setup.params, &setup.a_plus, &setup.a_minus, opts) {
        Ok(run) => Ok((run, opts, false)),
        Err(Error::PositivityViolation { t, min }) => {
            warn!(
                "positivity lost at t = {t} (min {min:e}); retrying with dt = {}",
                opts.dt / 2.0
            );
            let finer = StepOptions {
                dt: opts.dt / 2.0,
                store_every: opts.store_every * 2,
                ..opts
            };
            let run = solve_logistic(u0, &setup.params, &setup.a_plus, &setup.a_minus, finer)?;
            Ok((run, finer, true))
        }
        Err(e) => Err(e.into()),
    }
}

/// `norms.csv`, `deviation.csv` and the stored snapshots under `fields/`.
pub(crate) fn write_run(dir: &Path, run: &SolverRun<f64>, theta: f64) -> Result<(), CliError> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(dir.join("norms.csv"))?);
    write_norms_csv(&mut out, &run.norms)?;
    write_table(
        &dir.join("deviation.csv"),
        &["t", "min", "max", "deviation"],
        run.norms
            .iter()
            .map(|r: &NormRecord<f64>| vec![r.t, r.min, r.max, r.deviation(theta)]),
    )?;
    let fields = dir.join("fields");
    let manifest = write_series_dir(&fields, &run.series)?;
    write_json(&fields.join("manifest.json"), &manifest)
}

pub(crate) fn skipped(violations: Vec<String>) -> Outcome {
    Outcome::new(violations, serde_json::json!({ "skipped": true }))
}
