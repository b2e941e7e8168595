use serde::Serialize;

use crate::error::{Error, Result};
use crate::feynman_kac::ensemble::{fk_linear_estimate, MIN_PATHS};
use crate::lattice::{convolve, Field, Kernel, SignedKernel};
use crate::params::ModelParams;
use crate::scalar::Scalar;
use crate::seed::SeedSpec;
use crate::series::FieldSeries;

/// Both sides of `u_t(x) = theta + E^x[(u0(X_t) - theta) exp(-kappa_minus int_0^t (a_minus * u_{t-s})(X_s) ds)]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityCheck<T> {
    pub points: Vec<usize>,
    /// `u(., t)` from the supplied series.
    pub lhs: Vec<T>,
    /// Monte Carlo right side.
    pub rhs: Vec<T>,
    pub stderr: Vec<T>,
    pub max_residual: T,
    pub n_paths: usize,
    pub seed: SeedSpec,
}

impl<T: Scalar> IdentityCheck<T> {
    /// True when every residual is within `k * stderr + tol`.
    pub fn holds(&self, k: T, tol: T) -> bool {
        self.lhs
            .iter()
            .zip(&self.rhs)
            .zip(&self.stderr)
            .all(|((l, r), s)| (*l - *r).abs() <= k * *s + tol)
    }
}

/// Evaluates the Feynman-Kac form of the logistic equation over paths of the
/// process generated by `L_{J_theta}`. `j_theta` must be pointwise non-negative.
#[allow(clippy::too_many_arguments)]
pub fn fk_logistic_identity_check<T: Scalar>(
    u: &FieldSeries<T>,
    u0: &Field<T>,
    params: &ModelParams<T>,
    a_minus: &Kernel<T>,
    j_theta: &SignedKernel<T>,
    t: T,
    n_paths: usize,
    seed: SeedSpec,
    eval_points: &[usize],
) -> Result<IdentityCheck<T>> {
    if !j_theta.is_nonneg() {
        return Err(Error::AssumptionViolated(format!(
            "J_theta has negative values (min {}); the representation needs J_theta >= 0",
            j_theta.min_value()
        )));
    }
    if n_paths < MIN_PATHS {
        return Err(Error::Domain(format!(
            "need at least {MIN_PATHS} paths, got {n_paths}"
        )));
    }
    u.ensure_covers(t)?;
    let kernel = Kernel::try_from(j_theta.clone())?;
    let theta = params.theta();
    let w = u.map(|f| convolve(a_minus, f).map(|c| c.scale(-params.kappa_minus())))?;
    let shifted = u0.offset(-theta);
    let est = fk_linear_estimate(&shifted, &w, &kernel, t, n_paths, seed, eval_points)?;
    let ut = u.at(t);
    let lhs: Vec<T> = eval_points.iter().map(|&x| ut.get(x)).collect();
    let rhs: Vec<T> = est.mean.iter().map(|&m| theta + m).collect();
    let max_residual = lhs
        .iter()
        .zip(&rhs)
        .fold(T::zero(), |m, (l, r)| m.max((*l - *r).abs()));
    Ok(IdentityCheck {
        points: eval_points.to_vec(),
        lhs,
        rhs,
        stderr: est.stderr,
        max_residual,
        n_paths,
        seed,
    })
}
