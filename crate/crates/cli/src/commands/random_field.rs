use jumpfk::lattice::{build_kernel, combined_kernel};
use jumpfk::random_fields::{
    decay_exponent_fit, geometric_times, mc_second_moment, second_moment_spectral,
    JumpSymbolProfile,
};
use jumpfk::{Grid, SeedSpec};
use log::info;
use serde_json::json;

use super::{skipped, Ctx};
use crate::error::CliError;
use crate::report::{write_table, Outcome, J_THETA_NONNEG};

/// Second moment of `k_1` for random `xi`: spectral sum against Monte Carlo,
/// then the late-time algebraic exponent.
pub fn random_field(ctx: &Ctx) -> Result<Outcome, CliError> {
    let s = ctx.setup;
    let missing = ctx.missing(&[J_THETA_NONNEG], "random-field moments");
    if !missing.is_empty() {
        return Ok(skipped(missing));
    }
    let rf = &s.config.random_field;
    let weights = rf.spectrum.weights(&s.grid)?;
    let spectral = rf
        .mc_times
        .iter()
        .map(|&t| second_moment_spectral(&weights, &s.j_theta, &s.params, t))
        .collect::<Result<Vec<_>, _>>()?;
    info!("monte carlo second moment with {} samples", rf.n_samples);
    let seed = SeedSpec::new(s.config.monte_carlo.master_seed, 0);
    let mc = mc_second_moment(
        &weights,
        &s.j_theta,
        &s.params,
        &rf.mc_times,
        rf.n_samples,
        seed,
    )?;

    let mut violations = Vec::new();
    for (e, &exact) in mc.iter().zip(&spectral) {
        if (e.estimate - exact).abs() > rf.sigmas * e.stderr {
            violations.push(format!(
                "at t = {} monte carlo {} differs from spectral {} by more than {} stderr",
                e.t, e.estimate, exact, rf.sigmas
            ));
        }
    }
    write_table(
        &ctx.dir.join("moments.csv"),
        &["t", "spectral", "mc", "mc_stderr"],
        mc.iter()
            .zip(&spectral)
            .map(|(e, &v)| vec![e.t, v, e.estimate, e.stderr]),
    )?;

    let fit_spec = rf.fit_grid.clone().unwrap_or_else(|| s.config.grid.clone());
    let grid = Grid::new(fit_spec.dim, fit_spec.extent, fit_spec.points)?;
    let a_plus = build_kernel(&s.config.kernels.a_plus, &grid)?;
    let a_minus = build_kernel(&s.config.kernels.a_minus, &grid)?;
    let j_theta = combined_kernel(&s.params, &a_plus, &a_minus, s.params.theta())?;
    let fit_weights = rf.spectrum.weights(&grid)?;
    let times = geometric_times(rf.fit_window.0, rf.fit_window.1, rf.fit_points);
    info!(
        "exponent fit on {} points of a {}-point grid",
        times.len(),
        grid.len()
    );
    let values = times
        .iter()
        .map(|&t| second_moment_spectral(&fit_weights, &j_theta, &s.params, t))
        .collect::<Result<Vec<_>, _>>()?;
    let symbol = JumpSymbolProfile::new(rf.symbol.b, rf.symbol.beta_spec)?;
    let exponent = decay_exponent_fit(
        &times,
        &values,
        &s.params,
        &fit_weights,
        &rf.spectrum,
        &symbol,
        &j_theta,
        rf.fit_window,
        rf.exponent_tol,
    )?;
    if !exponent.passes() {
        violations.push(format!(
            "decay exponent check fails (expected {}): {:?}",
            exponent.expected, exponent.outcome
        ));
    }
    write_table(
        &ctx.dir.join("exponent.csv"),
        &["t", "second_moment", "normalized"],
        times
            .iter()
            .zip(&values)
            .zip(&exponent.normalized)
            .map(|((&t, &v), &n)| vec![t, v, n]),
    )?;

    Ok(Outcome::new(
        violations,
        json!({
            "variance": weights.variance(),
            "spectral": spectral,
            "monte_carlo": mc,
            "exponent": exponent,
        }),
    ))
}
