use jumpfk::feynman_kac::{duhamel_series, fk_linear_estimate, fk_logistic_identity_check};
use jumpfk::solver::{solve_perturbed, StepOptions};
use jumpfk::{Field, FieldSeries, SeedSpec};
use log::info;
use serde_json::json;

use super::{logistic_with_retry, Ctx};
use crate::error::CliError;
use crate::report::{write_table, Outcome, J_THETA_NONNEG};

/// Streams used by the logistic identity start here, clear of the linear estimator.
const IDENTITY_STREAMS: u64 = 1 << 40;

/// Monte Carlo, Duhamel series and the splitting solver on the same linear
/// problem `du/dt = kappa_plus L_{a_plus} u + W u`, then the logistic identity.
pub fn fk_verify(ctx: &Ctx) -> Result<Outcome, CliError> {
    let s = ctx.setup;
    let cfg = &s.config;
    let fk = &cfg.fk_verify;
    let grid = &s.grid;
    let u0 = ctx.u0();
    let kernel = s.a_plus.scaled(s.params.kappa_plus())?;
    let pot = &fk.potential;
    let tau = std::f64::consts::TAU;
    let w_field = Field::from_fn(grid, |x| {
        pot.offset + pot.amplitude * (tau * pot.mode * x[0] / grid.extent()).sin()
    })?;
    let w = FieldSeries::constant(w_field, fk.t)?;
    let points = if fk.eval_points.is_empty() {
        (0..8).map(|i| i * grid.len() / 8).collect()
    } else {
        fk.eval_points.clone()
    };
    let n_paths = cfg.monte_carlo.n_paths;
    let seed = SeedSpec::new(cfg.monte_carlo.master_seed, 0);

    info!("duhamel series with {} terms", fk.duhamel_terms);
    let duhamel = duhamel_series(&u0, &w, &kernel, fk.t, fk.duhamel_terms, fk.dt)?;
    info!("splitting solver with dt = {}", fk.dt);
    let pde = solve_perturbed(&u0, &w, &kernel, StepOptions::new(fk.t, fk.dt))?
        .series
        .last()
        .clone();
    info!(
        "monte carlo with {n_paths} paths at {} points",
        points.len()
    );
    let mc = fk_linear_estimate(&u0, &w, &kernel, fk.t, n_paths, seed, &points)?;

    let mut violations = Vec::new();
    let det_gap = duhamel.partial_sum.distance(&pde)?;
    if det_gap > fk.deterministic_tol {
        violations.push(format!(
            "duhamel series and solver differ by {det_gap:e} > {:e}",
            fk.deterministic_tol
        ));
    }
    let mut rows = Vec::new();
    for (i, &x) in points.iter().enumerate() {
        let (m, se) = (mc.mean[i], mc.stderr[i]);
        let (d, p) = (duhamel.partial_sum.get(x), pde.get(x));
        for (name, v) in [("duhamel", d), ("solver", p)] {
            let allowed = fk.mc_sigmas * se + 1e-12 * (1.0 + v.abs());
            if (m - v).abs() > allowed {
                violations.push(format!(
                    "monte carlo at site {x} differs from {name} by {:e} > {:e}",
                    (m - v).abs(),
                    allowed
                ));
            }
        }
        rows.push(vec![x as f64, m, se, d, p]);
    }
    write_table(
        &ctx.dir.join("triangle.csv"),
        &["site", "mc_mean", "mc_stderr", "duhamel", "solver"],
        rows,
    )?;

    let identity = if !fk.identity {
        None
    } else if let Some(v) = ctx.missing(&[J_THETA_NONNEG], "logistic identity").pop() {
        violations.push(v);
        None
    } else {
        info!("logistic identity with {n_paths} paths");
        let (run, _, _) = logistic_with_retry(s, &u0, StepOptions::new(fk.t, fk.dt))?;
        let check = fk_logistic_identity_check(
            &run.series,
            &u0,
            &s.params,
            &s.a_minus,
            &s.j_theta,
            fk.t,
            n_paths,
            SeedSpec::new(cfg.monte_carlo.master_seed, IDENTITY_STREAMS),
            &points,
        )?;
        if !check.holds(fk.mc_sigmas, fk.identity_tol) {
            violations.push(format!(
                "logistic identity residual {:e} exceeds {} stderr + {:e}",
                check.max_residual, fk.mc_sigmas, fk.identity_tol
            ));
        }
        Some(check)
    };

    Ok(Outcome::new(
        violations,
        json!({
            "t": fk.t,
            "dt": fk.dt,
            "points": points,
            "monte_carlo": mc,
            "duhamel": points.iter().map(|&x| duhamel.partial_sum.get(x)).collect::<Vec<_>>(),
            "duhamel_remainder_bound": duhamel.remainder_bound,
            "solver": points.iter().map(|&x| pde.get(x)).collect::<Vec<_>>(),
            "deterministic_gap": det_gap,
            "identity": identity,
        }),
    ))
}
