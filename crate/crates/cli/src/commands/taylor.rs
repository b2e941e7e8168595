use jumpfk::solver::solve_taylor_hierarchy;
use jumpfk::stability::{
    cn_coefficients, generating_function, generating_radius, k1_decay_check, taylor_bound_check,
};
use log::info;
use serde_json::json;

use super::{logistic_with_retry, skipped, Ctx};
use crate::error::CliError;
use crate::report::{write_table, Outcome, GAMMA_POSITIVE};

/// Taylor coefficients in `lambda`, their resummation against the solver, and
/// the generating-function bounds.
pub fn taylor(ctx: &Ctx) -> Result<Outcome, CliError> {
    let s = ctx.setup;
    let missing = ctx.missing(&[GAMMA_POSITIVE], "taylor bounds");
    if !missing.is_empty() {
        return Ok(skipped(missing));
    }
    let ty = &s.config.taylor;
    let theta = s.params.theta();
    let beta = s.params.beta();
    let gamma = s.params.gamma(&s.j_theta);
    let radius = generating_radius(beta, gamma);
    let xi = ty.xi.build(&s.grid, theta, &s.base_dir).expect("validated");
    let xi_norm = xi.sup_norm();
    let lambda = match ty.lambda {
        Some(l) => l,
        None if xi_norm > 0.0 => ty.radius_fraction * radius / xi_norm,
        None => 0.0,
    };
    let x = lambda.abs() * xi_norm;
    let opts = s.config.step_options();

    info!(
        "taylor hierarchy to order {} with dt = {}",
        ty.order, opts.dt
    );
    let hierarchy = solve_taylor_hierarchy(&xi, &s.params, &s.a_plus, &s.a_minus, ty.order, opts)?;
    let sum = hierarchy.resum(lambda)?;
    let u0 = xi.map(|v| theta * (lambda * v).exp());
    let (run, used, retried) = logistic_with_retry(s, &u0, opts)?;

    let mut violations = Vec::new();
    let bound = taylor_bound_check(&run.norms, &xi, lambda, theta, beta, gamma, ty.bound_tol)?;
    if !bound.holds {
        violations.push(format!(
            "deviation exceeds theta e^(-gamma t) H(|lambda| ||xi||) at {} times (max excess {:e})",
            bound.violations.len(),
            bound.max_excess()
        ));
    }
    let k1 = k1_decay_check(hierarchy.coefficient(1), gamma, ty.bound_tol);
    if !k1.holds {
        violations.push(format!(
            "k_1 exceeds theta ||xi|| e^(-gamma t) (max excess {:e})",
            k1.max_excess()
        ));
    }

    // ||k_n|| <= theta C_n ||xi||^n e^{-gamma t}, so the dropped orders sum to at most
    // theta e^{-gamma t} (H(x) - sum_{n <= N} C_n x^n / n!)
    let c = cn_coefficients(beta, gamma, ty.order)?;
    let h = generating_function(x, beta, gamma)?;
    let mut partial = 0.0;
    let mut w = 1.0;
    for (n, cn) in c.iter().enumerate().skip(1) {
        w *= x / n as f64;
        partial += cn * w;
    }
    let tail = theta * (h - partial).max(0.0);
    let step_tol = 5.0 * opts.dt * opts.dt;
    let mut resum_rows = Vec::new();
    let mut resum_ok = true;
    for (k, (a, b)) in sum.fields().iter().zip(run.series.fields()).enumerate() {
        let t = sum.time(k);
        let gap = a.distance(b)?;
        let allowed = tail * (-gamma * t).exp() + step_tol;
        resum_ok &= gap <= allowed;
        resum_rows.push(json!({ "t": t, "gap": gap, "allowed": allowed }));
    }
    if !resum_ok {
        violations
            .push("resummed hierarchy departs from the solver beyond tail bound + 5 dt^2".into());
    }

    let header: Vec<String> = std::iter::once("t".to_string())
        .chain((1..=ty.order).map(|n| format!("k{n}_sup")))
        .collect();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    write_table(
        &ctx.dir.join("coefficients.csv"),
        &header,
        (0..sum.len()).map(|k| {
            std::iter::once(sum.time(k))
                .chain(
                    hierarchy.coefficients()[1..]
                        .iter()
                        .map(|s| s.field(k).sup_norm()),
                )
                .collect()
        }),
    )?;

    Ok(Outcome::new(
        violations,
        json!({
            "lambda": lambda,
            "xi_sup": xi_norm,
            "x": x,
            "radius": radius,
            "order": ty.order,
            "c_n": c,
            "h": h,
            "tail_bound": tail,
            "dt_used": used.dt,
            "positivity_retry": retried,
            "resummation": resum_rows,
            "bound": bound,
            "k1": k1,
        }),
    ))
}
