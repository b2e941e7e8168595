use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::jump::{JumpPath, JumpSampler};
use crate::lattice::{Field, Grid, Kernel};
use crate::scalar::Scalar;
use crate::seed::SeedSpec;
use crate::series::FieldSeries;

/// Minimum number of paths accepted by the public estimators.
pub const MIN_PATHS: usize = 100;

/// Frozen set of paths, `n_paths` per evaluation point.
///
/// Path `i` of point number `p` uses stream `seed.stream_index + p * n_paths + i`.
/// Reusing one ensemble for several potentials gives common random numbers.
#[derive(Clone, Debug)]
pub struct PathEnsemble<T: Scalar> {
    grid: Grid<T>,
    points: Vec<usize>,
    n_paths: usize,
    horizon: T,
    seed: SeedSpec,
    paths: Vec<Vec<JumpPath<T>>>,
}

/// Monte Carlo mean and standard error at a set of lattice points.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FkEstimate<T> {
    pub points: Vec<usize>,
    pub mean: Vec<T>,
    pub stderr: Vec<T>,
    pub n_paths: usize,
    pub seed: SeedSpec,
}

impl<T: Scalar> PathEnsemble<T> {
    pub fn sample(
        sampler: &JumpSampler<T>,
        points: &[usize],
        n_paths: usize,
        horizon: T,
        seed: SeedSpec,
    ) -> Result<Self> {
        if n_paths == 0 {
            return Err(Error::Domain("ensemble needs at least one path".into()));
        }
        let paths = points
            .par_iter()
            .enumerate()
            .map(|(p, &start)| {
                (0..n_paths)
                    .map(|i| {
                        let stream = seed.offset((p * n_paths + i) as u64);
                        sampler.sample_path(start, horizon, stream)
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            grid: sampler.grid().clone(),
            points: points.to_vec(),
            n_paths,
            horizon,
            seed,
            paths,
        })
    }

    pub fn points(&self) -> &[usize] {
        &self.points
    }

    pub fn n_paths(&self) -> usize {
        self.n_paths
    }

    pub fn horizon(&self) -> T {
        self.horizon
    }

    pub fn paths(&self, point: usize) -> &[JumpPath<T>] {
        &self.paths[point]
    }

    fn check(&self, u0: &Field<T>, w: &FieldSeries<T>, t: T) -> Result<()> {
        self.grid.ensure_same(u0.grid())?;
        self.grid.ensure_same(w.grid())?;
        if !(t >= T::zero() && t <= self.horizon) {
            return Err(Error::Domain(format!(
                "evaluation time {t} outside ensemble horizon [0, {}]",
                self.horizon
            )));
        }
        w.ensure_covers(t)
    }

    fn weight(&self, point: usize, i: usize, u0: &Field<T>, w: &FieldSeries<T>, t: T) -> Result<T> {
        let path = &self.paths[point][i];
        let exponent = path.integral_at(w, t);
        if exponent > T::max_value().ln() {
            return Err(Error::EstimatorOverflow {
                point: self.points[point],
                stream_index: self.seed.offset((point * self.n_paths + i) as u64).stream_index,
                exponent: exponent.as_f64(),
                horizon: t.as_f64(),
            });
        }
        let x = path.position_at(t)?;
        Ok(u0.get(x) * exponent.exp())
    }

    /// Per-path weights `u0(X_t) exp(int_0^t W(X_{t-s}, s) ds)` for one evaluation point.
    pub fn weights(&self, point: usize, u0: &Field<T>, w: &FieldSeries<T>, t: T) -> Result<Vec<T>> {
        self.check(u0, w, t)?;
        (0..self.n_paths)
            .map(|i| self.weight(point, i, u0, w, t))
            .collect()
    }

    /// Mean and standard error of the weights at every evaluation point.
    pub fn estimate(&self, u0: &Field<T>, w: &FieldSeries<T>, t: T) -> Result<FkEstimate<T>> {
        self.check(u0, w, t)?;
        let stats = (0..self.points.len())
            .into_par_iter()
            .map(|p| {
                let weights = (0..self.n_paths)
                    .map(|i| self.weight(p, i, u0, w, t))
                    .collect::<Result<Vec<_>>>()?;
                Ok(mean_stderr(&weights))
            })
            .collect::<Result<Vec<_>>>()?;
        let (mean, stderr) = stats.into_iter().unzip();
        Ok(FkEstimate {
            points: self.points.clone(),
            mean,
            stderr,
            n_paths: self.n_paths,
            seed: self.seed,
        })
    }
}

/// Sample mean and `std / sqrt(n)`, summed in index order.
pub(crate) fn mean_stderr<T: Scalar>(values: &[T]) -> (T, T) {
    let n = T::of_usize(values.len());
    let mean = values.iter().copied().sum::<T>() / n;
    if values.len() < 2 {
        return (mean, T::zero());
    }
    let var = values.iter().map(|&v| (v - mean) * (v - mean)).sum::<T>() / (n - T::one());
    (mean, (var / n).sqrt())
}

/// Monte Carlo estimate of `E^x[u0(X_t) exp(int_0^t W(X_{t-s}, s) ds)]` for the
/// process generated by `L_J`, at each of `eval_points`.
pub fn fk_linear_estimate<T: Scalar>(
    u0: &Field<T>,
    w: &FieldSeries<T>,
    kernel: &Kernel<T>,
    t: T,
    n_paths: usize,
    seed: SeedSpec,
    eval_points: &[usize],
) -> Result<FkEstimate<T>> {
    if n_paths < MIN_PATHS {
        return Err(Error::Domain(format!(
            "need at least {MIN_PATHS} paths, got {n_paths}"
        )));
    }
    w.ensure_covers(t)?;
    let sampler = JumpSampler::new(kernel)?;
    let ensemble = PathEnsemble::sample(&sampler, eval_points, n_paths, t, seed)?;
    ensemble.estimate(u0, w, t)
}
