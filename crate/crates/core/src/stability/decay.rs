use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::scalar::Scalar;
use crate::series::NormRecord;

/// Norms at or below this are treated as already converged and left out of fits.
pub const NORM_FLOOR: f64 = 1e-14;

/// Least-squares fit of `ln ||.||` against `t`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayFit<T> {
    pub times: Vec<T>,
    pub log_norms: Vec<T>,
    pub slope: T,
    pub intercept: T,
    /// Half-width of the 95% normal interval for the slope.
    pub slope_ci: T,
    pub window: (T, T),
    /// Whether points under the norm floor were dropped from the window.
    pub truncated: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DecayOutcome<T> {
    /// The deviation is below the floor throughout the window.
    Stationary,
    Fit(DecayFit<T>),
}

impl<T: Scalar> DecayOutcome<T> {
    /// `slope <= bound + tol`; a stationary run satisfies every bound.
    pub fn slope_at_most(&self, bound: T, tol: T) -> bool {
        match self {
            DecayOutcome::Stationary => true,
            DecayOutcome::Fit(fit) => fit.slope <= bound + tol,
        }
    }

    pub fn fit(&self) -> Option<&DecayFit<T>> {
        match self {
            DecayOutcome::Stationary => None,
            DecayOutcome::Fit(fit) => Some(fit),
        }
    }
}

/// Fits `ln values` against `times` over `window`, dropping values under [`NORM_FLOOR`].
pub fn log_decay_fit<T: Scalar>(times: &[T], values: &[T], window: (T, T)) -> Result<DecayOutcome<T>> {
    if times.len() != values.len() {
        return Err(Error::Domain("times and values differ in length".into()));
    }
    let (lo, hi) = window;
    if !(lo < hi) {
        return Err(Error::Domain(format!("empty window [{lo}, {hi}]")));
    }
    let eps = T::of(1e-9) * (T::one() + hi.abs());
    let in_window: Vec<(T, T)> = times
        .iter()
        .zip(values)
        .filter(|(t, _)| **t >= lo - eps && **t <= hi + eps)
        .map(|(&t, &v)| (t, v))
        .collect();
    let kept: Vec<(T, T)> = in_window
        .iter()
        .filter(|(_, v)| *v > T::of(NORM_FLOOR))
        .map(|&(t, v)| (t, v.ln()))
        .collect();
    if kept.is_empty() && !in_window.is_empty() {
        return Ok(DecayOutcome::Stationary);
    }
    if kept.len() < 3 {
        return Err(Error::Domain(format!(
            "window [{lo}, {hi}] holds {} usable points, need 3",
            kept.len()
        )));
    }
    let n = T::of_usize(kept.len());
    let tm = kept.iter().map(|p| p.0).sum::<T>() / n;
    let ym = kept.iter().map(|p| p.1).sum::<T>() / n;
    let sxx = kept.iter().map(|p| (p.0 - tm) * (p.0 - tm)).sum::<T>();
    let sxy = kept.iter().map(|p| (p.0 - tm) * (p.1 - ym)).sum::<T>();
    let slope = sxy / sxx;
    let intercept = ym - slope * tm;
    let rss = kept
        .iter()
        .map(|p| {
            let r = p.1 - intercept - slope * p.0;
            r * r
        })
        .sum::<T>();
    let se = (rss / (n - T::of(2.0)) / sxx).sqrt();
    Ok(DecayOutcome::Fit(DecayFit {
        times: kept.iter().map(|p| p.0).collect(),
        log_norms: kept.iter().map(|p| p.1).collect(),
        slope,
        intercept,
        slope_ci: T::of(1.96) * se,
        window,
        truncated: kept.len() < in_window.len(),
    }))
}

/// Fits the decay of `||u_t - theta||_inf`. The default window is `[T/2, T]`.
pub fn logistic_decay_rate<T: Scalar>(
    norms: &[NormRecord<T>],
    params: &ModelParams<T>,
    window: Option<(T, T)>,
) -> Result<DecayOutcome<T>> {
    let last = norms
        .last()
        .ok_or_else(|| Error::Domain("no norm records".into()))?
        .t;
    let window = window.unwrap_or((last * T::of(0.5), last));
    let theta = params.theta();
    let times: Vec<T> = norms.iter().map(|r| r.t).collect();
    let devs: Vec<T> = norms.iter().map(|r| r.deviation(theta)).collect();
    log_decay_fit(&times, &devs, window)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_exponential_has_zero_ci() {
        let times: Vec<f64> = (0..=20).map(|k| k as f64 * 0.5).collect();
        let values: Vec<f64> = times.iter().map(|t| 3.0 * (-0.7 * t).exp()).collect();
        let fit = log_decay_fit(&times, &values, (0.0, 10.0)).unwrap();
        let fit = fit.fit().unwrap();
        assert!((fit.slope + 0.7).abs() < 1e-12);
        assert!((fit.intercept - 3f64.ln()).abs() < 1e-12);
        assert!(fit.slope_ci < 1e-10);
        assert!(!fit.truncated);
    }

    #[test]
    fn floor_truncates_and_zero_is_stationary() {
        let times: Vec<f64> = (0..10).map(|k| k as f64).collect();
        let mut values: Vec<f64> = times.iter().map(|t| (-t).exp()).collect();
        values[8] = 0.0;
        values[9] = 1e-16;
        let fit = log_decay_fit(&times, &values, (0.0, 9.0)).unwrap();
        assert!(fit.fit().unwrap().truncated);
        assert_eq!(fit.fit().unwrap().times.len(), 8);
        let zeros = vec![0.0; 10];
        assert_eq!(log_decay_fit(&times, &zeros, (0.0, 9.0)).unwrap(), DecayOutcome::Stationary);
    }

    #[test]
    fn closed_form_slope_tends_to_minus_beta() {
        let p = ModelParams::new(2.0, 1.0, 1.0).unwrap();
        let norms: Vec<NormRecord<f64>> = (0..=400)
            .map(|k| {
                let t = k as f64 * 0.05;
                let q = crate::solver::logistic_closed_form(0.5, &p, t).unwrap();
                NormRecord { t, sup_norm: q, min: q, max: q, mean: q }
            })
            .collect();
        let early = logistic_decay_rate(&norms, &p, Some((0.0, 4.0))).unwrap();
        let late = logistic_decay_rate(&norms, &p, None).unwrap();
        let (e, l) = (early.fit().unwrap().slope, late.fit().unwrap().slope);
        // the correction to the slope on [10, 20] is at most e^{-10}
        assert!((l + 1.0).abs() < 5e-5);
        assert!((l + 1.0).abs() < (e + 1.0).abs());
    }
}
