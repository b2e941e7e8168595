use num_complex::Complex;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{Field, Grid, SignedKernel, SpectralMultiplier};
use crate::params::ModelParams;
use crate::random_fields::SpectralWeights;
use crate::scalar::Scalar;
use crate::seed::SeedSpec;

/// Real Gaussian field with covariance `B(x - y) = sum_k w_k cos(lambda_k . (x - y))`.
///
/// White noise on the sites is filtered in Fourier space by `N^{d/2} sqrt(w_k)`;
/// the transform of real noise is Hermitian, so the result is real.
pub fn sample_field<T: Scalar>(weights: &SpectralWeights<T>, seed: SeedSpec) -> Result<Field<T>> {
    let grid = weights.grid();
    let mut rng = seed.rng();
    let noise: Vec<T> = (0..grid.len())
        .map(|_| T::of(StandardNormal.sample(&mut rng)))
        .collect();
    let gain = T::of_usize(grid.len()).sqrt();
    let mut spectrum = grid.forward(&noise);
    for (c, &w) in spectrum.iter_mut().zip(weights.values()) {
        *c *= gain * w.sqrt();
    }
    Field::new(grid, grid.inverse_real(spectrum))
}

fn require_nonneg<T: Scalar>(j_theta: &SignedKernel<T>, grid: &Grid<T>) -> Result<()> {
    j_theta.grid().ensure_same(grid)?;
    if !j_theta.is_nonneg() {
        return Err(Error::AssumptionViolated(format!(
            "J_theta has negative values (min {}); the second-moment formula needs J_theta >= 0",
            j_theta.min_value()
        )));
    }
    Ok(())
}

/// `E k_{1,t}(x)^2 = theta^2 e^{-2 beta t} sum_k w_k |exp(t (J^_theta(lambda_k) - J^_theta(0)))|^2`.
pub fn second_moment_spectral<T: Scalar>(
    weights: &SpectralWeights<T>,
    j_theta: &SignedKernel<T>,
    params: &ModelParams<T>,
    t: T,
) -> Result<T> {
    require_nonneg(j_theta, weights.grid())?;
    if !(t >= T::zero()) {
        return Err(Error::Domain(format!("time must be non-negative, got {t}")));
    }
    let mass = j_theta.integral();
    let two_t = T::of(2.0) * t;
    let sum: T = weights
        .values()
        .iter()
        .zip(j_theta.symbol())
        .enumerate()
        .map(|(k, (&w, s))| {
            if k == 0 {
                w
            } else {
                w * (two_t * (s.re - mass)).exp()
            }
        })
        .sum();
    let theta = params.theta();
    Ok(theta * theta * (-two_t * params.beta()).exp() * sum)
}

/// Monte Carlo estimate with its standard error and 95% half-width.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MomentEstimate<T> {
    pub t: T,
    pub estimate: T,
    pub stderr: T,
    pub ci: T,
}

/// Estimates `E k_{1,t}^2` at each time from `n_samples` independent fields.
///
/// Each sample `xi` (stream `seed + i`) is pushed through
/// `k_{1,t} = theta e^{-beta t} exp(t L_{J_theta}) xi`; by homogeneity the
/// spatial mean of `k_{1,t}^2` is an unbiased per-sample value.
pub fn mc_second_moment<T: Scalar>(
    weights: &SpectralWeights<T>,
    j_theta: &SignedKernel<T>,
    params: &ModelParams<T>,
    times: &[T],
    n_samples: usize,
    seed: SeedSpec,
) -> Result<Vec<MomentEstimate<T>>> {
    require_nonneg(j_theta, weights.grid())?;
    if n_samples < 2 {
        return Err(Error::Domain("need at least two samples".into()));
    }
    let theta = params.theta();
    let propagators = times
        .iter()
        .map(|&t| {
            let scale = theta * (-params.beta() * t).exp();
            let m = SpectralMultiplier::semigroup(j_theta, t)?;
            let factors: Vec<Complex<T>> = m.factors().iter().map(|f| *f * scale).collect();
            SpectralMultiplier::new(weights.grid(), factors)
        })
        .collect::<Result<Vec<_>>>()?;
    let per_sample = (0..n_samples)
        .into_par_iter()
        .map(|i| {
            let xi = sample_field(weights, seed.offset(i as u64))?;
            propagators
                .iter()
                .map(|p| Ok(p.apply(&xi)?.map(|v| v * v).mean()))
                .collect::<Result<Vec<T>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(times
        .iter()
        .enumerate()
        .map(|(j, &t)| {
            let column: Vec<T> = per_sample.iter().map(|row| row[j]).collect();
            let (estimate, stderr) = crate::feynman_kac::mean_stderr(&column);
            MomentEstimate {
                t,
                estimate,
                stderr,
                ci: T::of(1.96) * stderr,
            }
        })
        .collect())
}
