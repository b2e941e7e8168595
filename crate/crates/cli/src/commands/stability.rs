use jumpfk::stability::{decay_envelope, envelope_check, logistic_decay_rate, logistic_rate};
use log::info;
use serde_json::json;

use super::{logistic_with_retry, skipped, write_run, Ctx};
use crate::error::CliError;
use crate::report::{Outcome, INITIAL_POSITIVE, J_THETA_NONNEG};

/// Decay envelope, monotone deviation and fitted decay rate of a logistic run.
pub fn stability(ctx: &Ctx) -> Result<Outcome, CliError> {
    let s = ctx.setup;
    let missing = ctx.missing(&[J_THETA_NONNEG, INITIAL_POSITIVE], "stability certificate");
    if !missing.is_empty() {
        return Ok(skipped(missing));
    }
    let st = &s.config.stability;
    let theta = s.params.theta();
    let beta = s.params.beta();
    let u0 = ctx.u0();
    let (run, used, retried) = logistic_with_retry(s, &u0, s.config.step_options())?;
    write_run(ctx.dir, &run, theta)?;

    let mut violations = Vec::new();
    let c0 = (u0.min() - theta).min(0.0);
    let d0 = (u0.max() - theta).max(0.0);
    let rate = logistic_rate(s.params.kappa_minus(), theta);
    info!("envelope over {} blocks", st.n_blocks);
    let env = decay_envelope(c0, d0, &rate, st.block_length, st.n_blocks)?;
    if !env.cross_bounds_hold() {
        violations.push(format!(
            "envelope cross-bounds exceeded by {:e}",
            env.cross_bound_excess
        ));
    }
    let sandwich = envelope_check(&run.norms, theta, &env, st.envelope_tol)?;
    if !sandwich.holds {
        violations.push("solution leaves the decay envelope".into());
    }

    let tol = used.dt * used.dt;
    let devs: Vec<f64> = run.norms.iter().map(|r| r.deviation(theta)).collect();
    let max_increase = devs
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::NEG_INFINITY, f64::max);
    if max_increase > tol {
        violations.push(format!(
            "deviation from theta increases by {max_increase:e} > dt^2"
        ));
    }

    let decay = logistic_decay_rate(&run.norms, &s.params, st.window)?;
    if !decay.slope_at_most(-beta, st.slope_tol_fraction * beta) {
        let slope = decay.fit().map_or(f64::NAN, |f| f.slope);
        violations.push(format!(
            "fitted slope {slope} exceeds -beta + {} beta = {}",
            st.slope_tol_fraction,
            -beta + st.slope_tol_fraction * beta
        ));
    }

    Ok(Outcome::new(
        violations,
        json!({
            "dt_used": used.dt,
            "positivity_retry": retried,
            "envelope": {
                "c0": c0,
                "d0": d0,
                "block_length": env.block_length,
                "c_seq": env.c_seq,
                "d_seq": env.d_seq,
                "rates": env.rates,
                "cross_bound_excess": env.cross_bound_excess,
                "limit_rate": env.limit_rate(),
                "p_origin": env.p_origin,
                "rows": sandwich.rows,
                "tol": sandwich.tol,
                "holds": sandwich.holds,
            },
            "monotone": { "max_increase": max_increase, "tol": tol },
            "decay": decay,
            "rate_bound": -beta,
        }),
    ))
}
