use serde::Serialize;

use crate::binomial::pascal;
use crate::error::{Error, Result};
use crate::lattice::Field;
use crate::scalar::Scalar;
use crate::series::{FieldSeries, NormRecord};

/// `C_0 = 0`, `C_1 = 1`, `C_n = 1 + (beta / gamma) sum_{l=1}^{n-1} C(n, l) C_l C_{n-l}`.
/// Index `n` of the result holds `C_n`.
pub fn cn_coefficients<T: Scalar>(beta: T, gamma: T, n_max: usize) -> Result<Vec<T>> {
    if !(gamma > T::zero()) {
        return Err(Error::Domain(format!("gamma must be positive, got {gamma}")));
    }
    let binom = pascal(n_max)?;
    let ratio = beta / gamma;
    let mut c = vec![T::zero(); n_max + 1];
    for n in 1..=n_max {
        let mut s = T::zero();
        for l in 1..n {
            s += T::of(binom[n][l] as f64) * c[l] * c[n - l];
        }
        c[n] = T::one() + ratio * s;
    }
    Ok(c)
}

/// `ln(gamma / (4 beta) + 1)`, the radius of convergence of `H`.
pub fn generating_radius<T: Scalar>(beta: T, gamma: T) -> T {
    (gamma / (T::of(4.0) * beta) + T::one()).ln()
}

/// `H(x) = gamma / (2 beta) - sqrt(gamma^2 / (4 beta^2) - (e^x - 1) gamma / beta)`,
/// the root of `H = e^x - 1 + (beta / gamma) H^2` with `H(0) = 0`.
pub fn generating_function<T: Scalar>(x: T, beta: T, gamma: T) -> Result<T> {
    if !(beta > T::zero() && gamma > T::zero()) {
        return Err(Error::Domain(format!(
            "need beta > 0 and gamma > 0, got {beta}, {gamma}"
        )));
    }
    let radius = generating_radius(beta, gamma);
    if !(x < radius) {
        return Err(Error::Domain(format!(
            "x = {x} is not below the radius ln(gamma / (4 beta) + 1) = {radius}"
        )));
    }
    let a = gamma / (T::of(2.0) * beta);
    Ok(a - (a * a - x.exp_m1() * gamma / beta).sqrt())
}

/// Observed values against a time-dependent bound.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundCheck<T> {
    pub times: Vec<T>,
    pub observed: Vec<T>,
    pub bound: Vec<T>,
    pub tol: T,
    /// Indices where `observed > bound + tol`.
    pub violations: Vec<usize>,
    pub holds: bool,
}

impl<T: Scalar> BoundCheck<T> {
    fn new(times: Vec<T>, observed: Vec<T>, bound: Vec<T>, tol: T) -> Self {
        let violations: Vec<usize> = (0..times.len())
            .filter(|&i| observed[i] > bound[i] + tol)
            .collect();
        Self {
            holds: violations.is_empty(),
            times,
            observed,
            bound,
            tol,
            violations,
        }
    }

    /// Largest `observed - bound`.
    pub fn max_excess(&self) -> T {
        self.observed
            .iter()
            .zip(&self.bound)
            .fold(T::neg_infinity(), |m, (o, b)| m.max(*o - *b))
    }
}

/// Checks `||u_t - theta||_inf <= theta e^{-gamma t} H(|lambda| ||xi||_inf) + tol` on
/// the norm records of the run started from `theta exp(lambda xi)`.
pub fn taylor_bound_check<T: Scalar>(
    norms: &[NormRecord<T>],
    xi: &Field<T>,
    lambda: T,
    theta: T,
    beta: T,
    gamma: T,
    tol: T,
) -> Result<BoundCheck<T>> {
    let x = lambda.abs() * xi.sup_norm();
    let h = generating_function(x, beta, gamma)?;
    let times: Vec<T> = norms.iter().map(|r| r.t).collect();
    let observed = norms.iter().map(|r| r.deviation(theta)).collect();
    let bound = times.iter().map(|&t| theta * (-gamma * t).exp() * h).collect();
    Ok(BoundCheck::new(times, observed, bound, tol))
}

/// Checks `||k_{1,t}||_inf <= theta ||xi||_inf e^{-gamma t} + tol`, reading
/// `theta xi` from the first stored field.
pub fn k1_decay_check<T: Scalar>(k1: &FieldSeries<T>, gamma: T, tol: T) -> BoundCheck<T> {
    let start = k1.first().sup_norm();
    let times = k1.times();
    let observed = k1.fields().iter().map(|f| f.sup_norm()).collect();
    let bound = times.iter().map(|&t| start * (-gamma * t).exp()).collect();
    BoundCheck::new(times, observed, bound, tol)
}
