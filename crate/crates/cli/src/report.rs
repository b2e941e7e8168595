use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use jumpfk::stability::generating_radius;
use serde::Serialize;
use serde_json::Value;

use crate::config::Setup;
use crate::error::CliError;

pub const REPORT_FILE: &str = "report.json";

/// Constants derived from the model and kernels, echoed into every report.
#[derive(Clone, Debug, Serialize)]
pub struct Derived {
    pub theta: f64,
    pub beta: f64,
    pub gamma: f64,
    pub j_theta_min: f64,
    pub j_theta_integral: f64,
    pub j_theta_l1: f64,
    /// `ln(gamma / (4 beta) + 1)` when `gamma > 0`.
    pub generating_radius: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AssumptionFlag {
    pub name: &'static str,
    pub statement: &'static str,
    pub holds: bool,
    pub detail: String,
}

pub const J_THETA_NONNEG: &str = "j_theta_nonneg";
pub const GAMMA_POSITIVE: &str = "gamma_positive";
pub const INITIAL_POSITIVE: &str = "initial_positive";

impl Derived {
    pub fn of(setup: &Setup) -> Self {
        let p = &setup.params;
        let gamma = p.gamma(&setup.j_theta);
        Self {
            theta: p.theta(),
            beta: p.beta(),
            gamma,
            j_theta_min: setup.j_theta.min_value(),
            j_theta_integral: setup.j_theta.integral(),
            j_theta_l1: setup.j_theta.l1_mass(),
            generating_radius: (gamma > 0.0).then(|| generating_radius(p.beta(), gamma)),
        }
    }
}

/// The hypotheses the certificates rest on, evaluated for this config.
pub fn assumption_flags(setup: &Setup) -> Vec<AssumptionFlag> {
    let d = Derived::of(setup);
    let u0 = setup
        .config
        .initial
        .build(&setup.grid, d.theta, &setup.base_dir)
        .expect("validated");
    vec![
        AssumptionFlag {
            name: J_THETA_NONNEG,
            statement:
                "J_theta = kappa_plus a_plus - theta kappa_minus a_minus is pointwise non-negative",
            holds: setup.j_theta.is_nonneg(),
            detail: format!("min J_theta = {:e}", d.j_theta_min),
        },
        AssumptionFlag {
            name: GAMMA_POSITIVE,
            statement: "gamma = kappa_plus - ||J_theta||_1 is positive",
            holds: d.gamma > 0.0,
            detail: format!("gamma = {}", d.gamma),
        },
        AssumptionFlag {
            name: INITIAL_POSITIVE,
            statement: "initial data bounded away from zero: 0 < c1 <= u0 <= c2",
            holds: u0.min() > 0.0,
            detail: format!("min u0 = {}, max u0 = {}", u0.min(), u0.max()),
        },
    ]
}

pub fn flag<'a>(flags: &'a [AssumptionFlag], name: &str) -> &'a AssumptionFlag {
    flags
        .iter()
        .find(|f| f.name == name)
        .expect("known assumption")
}

/// Verdict of one experiment.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub passed: bool,
    pub violations: Vec<String>,
    pub results: Value,
}

impl Outcome {
    pub fn new(violations: Vec<String>, results: Value) -> Self {
        Self {
            passed: violations.is_empty(),
            violations,
            results,
        }
    }
}

#[derive(Serialize)]
pub struct Report<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub subcommand: &'a str,
    pub timestamp: &'a str,
    pub config_hash: String,
    pub derived: Derived,
    pub assumptions: Vec<AssumptionFlag>,
    pub passed: bool,
    pub violations: &'a [String],
    pub error: Option<String>,
    pub results: &'a Value,
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut out = BufWriter::new(fs::File::create(path)?);
    serde_json::to_writer_pretty(&mut out, value).map_err(|e| CliError::Output(e.to_string()))?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

/// Writes a CSV with the given header; values use Rust's shortest round-trip form.
pub fn write_table(
    path: &Path,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<f64>>,
) -> Result<(), CliError> {
    let mut out = BufWriter::new(fs::File::create(path)?);
    writeln!(out, "{}", header.join(","))?;
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        writeln!(out, "{}", cells.join(","))?;
    }
    out.flush()?;
    Ok(())
}

/// Creates `<out>/<subcommand>-<timestamp>`, adding a counter instead of reusing a directory.
pub fn create_run_dir(out: &Path, subcommand: &str, timestamp: &str) -> Result<PathBuf, CliError> {
    fs::create_dir_all(out)?;
    let stamp: String = timestamp
        .chars()
        .filter(|c| c.is_ascii_alphanumeric())
        .collect();
    let base = format!("{subcommand}-{stamp}");
    for n in 0.. {
        let name = if n == 0 {
            base.clone()
        } else {
            format!("{base}-{n}")
        };
        let dir = out.join(name);
        match fs::create_dir(&dir) {
            Ok(()) => return Ok(dir),
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => continue,
            Err(e) => return Err(e.into()),
        }
    }
    unreachable!()
}
