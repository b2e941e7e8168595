use std::fs;
use std::path::{Path, PathBuf};

use log::warn;
use serde_json::Value;

use crate::error::CliError;
use crate::report::{write_table, REPORT_FILE};

pub const PLOT_DIR: &str = "plot";

/// What `emit_plotdata` wrote and what it passed over.
#[derive(Debug, Default)]
pub struct PlotSummary {
    pub written: Vec<PathBuf>,
    /// Directories without a readable report.
    pub skipped: Vec<PathBuf>,
}

fn floats(v: &Value) -> Vec<f64> {
    v.as_array()
        .map(|a| a.iter().map(|x| x.as_f64().unwrap_or(f64::NAN)).collect())
        .unwrap_or_default()
}

fn ln(v: f64) -> f64 {
    if v > 0.0 {
        v.ln()
    } else {
        f64::NEG_INFINITY
    }
}

/// Columns of `deviation.csv` as rows of floats.
fn read_deviation(dir: &Path) -> Option<Vec<Vec<f64>>> {
    let text = fs::read_to_string(dir.join("deviation.csv")).ok()?;
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(|c| c.parse().ok()).collect())
        .collect()
}

fn emit_run(dir: &Path, report: &Value, summary: &mut PlotSummary) -> Result<(), CliError> {
    let out = dir.join(PLOT_DIR);
    fs::create_dir_all(&out)?;
    let results = &report["results"];
    let mut emit = |name: &str, header: &[&str], rows: Vec<Vec<f64>>| -> Result<(), CliError> {
        let path = out.join(name);
        write_table(&path, header, rows)?;
        summary.written.push(path);
        Ok(())
    };
    if let Some(rows) = read_deviation(dir) {
        emit(
            "log_norm.csv",
            &["t", "ln_deviation"],
            rows.iter().map(|r| vec![r[0], ln(r[3])]).collect(),
        )?;
    }
    match report["subcommand"].as_str().unwrap_or_default() {
        "stability" => {
            if let Some(rows) = results["envelope"]["rows"].as_array() {
                let rows = rows
                    .iter()
                    .map(|r| {
                        let dev = r["max_deviation"]
                            .as_f64()
                            .unwrap_or(f64::NAN)
                            .abs()
                            .max(r["min_deviation"].as_f64().unwrap_or(f64::NAN).abs());
                        vec![
                            r["t"].as_f64().unwrap_or(f64::NAN),
                            ln(dev),
                            r["lower"].as_f64().unwrap_or(f64::NAN),
                            r["upper"].as_f64().unwrap_or(f64::NAN),
                        ]
                    })
                    .collect();
                emit(
                    "envelope.csv",
                    &["t", "ln_deviation", "envelope_low", "envelope_high"],
                    rows,
                )?;
            }
        }
        "taylor" => {
            for (key, name) in [("bound", "taylor_bound.csv"), ("k1", "k1_bound.csv")] {
                let b = &results[key];
                let (t, o, bd) = (
                    floats(&b["times"]),
                    floats(&b["observed"]),
                    floats(&b["bound"]),
                );
                let rows = (0..t.len()).map(|i| vec![t[i], o[i], bd[i]]).collect();
                emit(name, &["t", "observed", "bound"], rows)?;
            }
        }
        "random-field" => {
            let spectral = floats(&results["spectral"]);
            let mc = results["monte_carlo"]
                .as_array()
                .cloned()
                .unwrap_or_default();
            let rows = mc
                .iter()
                .zip(&spectral)
                .map(|(e, &s)| {
                    vec![
                        e["t"].as_f64().unwrap_or(f64::NAN),
                        s,
                        e["estimate"].as_f64().unwrap_or(f64::NAN),
                        e["stderr"].as_f64().unwrap_or(f64::NAN),
                    ]
                })
                .collect();
            emit(
                "spectral_vs_mc.csv",
                &["t", "spectral", "mc", "mc_stderr"],
                rows,
            )?;
            let e = &results["exponent"];
            let (t, n) = (floats(&e["times"]), floats(&e["normalized"]));
            let rows = (0..t.len()).map(|i| vec![ln(t[i]), ln(n[i])]).collect();
            emit("exponent_loglog.csv", &["ln_t", "ln_normalized"], rows)?;
        }
        "fk-verify" => {
            let points = floats(&results["points"]);
            let mean = floats(&results["monte_carlo"]["mean"]);
            let se = floats(&results["monte_carlo"]["stderr"]);
            let duh = floats(&results["duhamel"]);
            let pde = floats(&results["solver"]);
            let rows = (0..points.len())
                .map(|i| vec![points[i], mean[i], se[i], duh[i], pde[i]])
                .collect();
            emit(
                "triangle.csv",
                &["site", "mc_mean", "mc_stderr", "duhamel", "solver"],
                rows,
            )?;
        }
        "assumptions" => {
            let rows = results["scan"]
                .as_array()
                .map(|a| {
                    a.iter()
                        .map(|r| {
                            vec![
                                r["kappa"].as_f64().unwrap_or(f64::NAN),
                                r["min_value"].as_f64().unwrap_or(f64::NAN),
                            ]
                        })
                        .collect()
                })
                .unwrap_or_default();
            emit("kappa_min.csv", &["kappa", "min_value"], rows)?;
        }
        _ => {}
    }
    Ok(())
}

fn read_report(dir: &Path) -> Option<Value> {
    let text = fs::read_to_string(dir.join(REPORT_FILE)).ok()?;
    serde_json::from_str(&text).ok()
}

/// Flat CSV bundles under `<run>/plot/` for one run directory, or for every run
/// directory directly inside `dir`.
pub fn emit_plotdata(dir: &Path) -> Result<PlotSummary, CliError> {
    let mut summary = PlotSummary::default();
    if !dir.is_dir() {
        return Err(CliError::Config(vec![format!(
            "{} is not a directory",
            dir.display()
        )]));
    }
    if let Some(report) = read_report(dir) {
        emit_run(dir, &report, &mut summary)?;
        return Ok(summary);
    }
    let mut runs: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_dir())
        .collect();
    runs.sort();
    if runs.is_empty() {
        warn!("{} holds no run directories; nothing to do", dir.display());
    }
    for run in runs {
        match read_report(&run) {
            Some(report) => emit_run(&run, &report, &mut summary)?,
            None => {
                warn!("{}: no readable {REPORT_FILE}, skipped", run.display());
                summary.skipped.push(run);
            }
        }
    }
    Ok(summary)
}
