use jumpfk::lattice::combined_kernel;
use serde_json::json;

use super::Ctx;
use crate::error::CliError;
use crate::report::{write_table, Outcome};

/// Scans `J_kappa = kappa_plus a_plus - kappa kappa_minus a_minus` over `kappa` in `[0, theta]`.
pub fn assumptions(ctx: &Ctx) -> Result<Outcome, CliError> {
    let s = ctx.setup;
    let theta = s.params.theta();
    let n = s.config.assumptions.kappa_points;
    let mut rows = Vec::with_capacity(n);
    let mut violations = Vec::new();
    for i in 0..n {
        // the last point is theta itself, not a rounded multiple
        let kappa = if i + 1 == n {
            theta
        } else {
            theta * i as f64 / (n - 1) as f64
        };
        let j = combined_kernel(&s.params, &s.a_plus, &s.a_minus, kappa)?;
        if !j.is_nonneg() {
            violations.push(format!(
                "J_kappa has negative values at kappa = {kappa} (min {:e})",
                j.min_value()
            ));
        }
        rows.push((
            kappa,
            j.min_value(),
            j.integral(),
            j.l1_mass(),
            j.is_nonneg(),
        ));
    }
    write_table(
        &ctx.dir.join("kappa_scan.csv"),
        &["kappa", "min_value", "integral", "l1_mass"],
        rows.iter().map(|r| vec![r.0, r.1, r.2, r.3]),
    )?;
    let scan: Vec<_> = rows
        .iter()
        .map(|r| json!({ "kappa": r.0, "min_value": r.1, "integral": r.2, "l1_mass": r.3, "nonneg": r.4 }))
        .collect();
    Ok(Outcome::new(
        violations,
        json!({
            "scan": scan,
            "all_nonneg": rows.iter().all(|r| r.4),
        }),
    ))
}
