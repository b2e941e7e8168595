use jumpfk::lattice::combined_kernel;
use jumpfk::solver::{comparison_check, logistic_mild_residual};
use log::info;
use serde_json::json;

use super::{logistic_with_retry, write_run, Ctx};
use crate::error::CliError;
use crate::report::Outcome;

/// Deterministic logistic run with the comparison and mild-form checks.
pub fn solve(ctx: &Ctx) -> Result<Outcome, CliError> {
    let s = ctx.setup;
    let theta = s.params.theta();
    let u0 = ctx.u0();
    let opts = s.config.step_options();
    info!("solving to T = {} with dt = {}", opts.horizon, opts.dt);
    let (run, used, retried) = logistic_with_retry(s, &u0, opts)?;
    write_run(ctx.dir, &run, theta)?;

    let mut violations = Vec::new();
    let scale = theta.max(1.0);
    let stationary = if u0.values().iter().all(|&v| v == theta) {
        Some(("theta", theta))
    } else if u0.values().iter().all(|&v| v == 0.0) {
        Some(("zero", 0.0))
    } else {
        None
    };
    let drift =
        stationary.map(|(_, c)| run.norms.iter().map(|r| r.deviation(c)).fold(0.0, f64::max));
    if let (Some((name, _)), Some(d)) = (stationary, drift) {
        if d > 1e-12 * scale {
            violations.push(format!("stationary state {name} drifted by {d:e}"));
        }
    }

    let tol = used.dt * used.dt;
    let q0 = u0.min().min(theta);
    let comparison =
        if q0 > 0.0 && combined_kernel(&s.params, &s.a_plus, &s.a_minus, q0)?.is_nonneg() {
            let report = comparison_check(&run.series, &s.params, &s.a_plus, &s.a_minus, q0, tol)?;
            if !report.holds {
                violations.push(format!(
                    "comparison bound u_t >= q_t fails at {} stored points (min margin {:e})",
                    report.violations.len(),
                    report.min_margin
                ));
            }
            Some(report)
        } else {
            None
        };
    let mild_residual = logistic_mild_residual(&run.series, &s.params, &s.a_plus, &s.a_minus)?;
    let last = run.norms.last().expect("at least the initial record");

    Ok(Outcome::new(
        violations,
        json!({
            "dt_requested": opts.dt,
            "dt_used": used.dt,
            "positivity_retry": retried,
            "steps": run.norms.len() - 1,
            "stored_fields": run.series.len(),
            "stationary": stationary.map(|(name, _)| name),
            "stationary_drift": drift,
            "final": { "t": last.t, "min": last.min, "max": last.max, "deviation_from_theta": last.deviation(theta) },
            "comparison": comparison,
            "mild_residual": mild_residual,
        }),
    ))
}
