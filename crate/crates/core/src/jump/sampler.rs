use rand::Rng;
use rand_distr::weighted::WeightedAliasIndex;
use rand_distr::{Distribution, Exp};

use crate::error::{Error, Result};
use crate::jump::JumpPath;
use crate::lattice::{Grid, Kernel};
use crate::scalar::Scalar;
use crate::seed::SeedSpec;

/// Compound Poisson sampler for the process generated by `L_J` on the lattice.
///
/// Waiting times are exponential with rate `mu = integral J`. A jump from `x`
/// lands on `y` with probability `h^d J(x - y) / mu`, so the displacement is
/// drawn from the reflected kernel. The alias table is built once.
#[derive(Clone, Debug)]
pub struct JumpSampler<T: Scalar> {
    grid: Grid<T>,
    rate: f64,
    table: Option<(WeightedAliasIndex<f64>, Exp<f64>)>,
    offsets: Vec<usize>,
}

impl<T: Scalar> JumpSampler<T> {
    pub fn new(kernel: &Kernel<T>) -> Result<Self> {
        let grid = kernel.grid().clone();
        let rate = kernel.mass().as_f64();
        let support: Vec<(usize, f64)> = kernel
            .values()
            .iter()
            .enumerate()
            .filter(|(_, v)| **v > T::zero())
            .map(|(i, v)| (i, v.as_f64()))
            .collect();
        if !(rate > 0.0) || support.is_empty() {
            return Ok(Self {
                grid,
                rate: 0.0,
                table: None,
                offsets: Vec::new(),
            });
        }
        let offsets = support.iter().map(|&(i, _)| grid.reflect(i)).collect();
        let weights = support.into_iter().map(|(_, w)| w).collect();
        let alias = WeightedAliasIndex::new(weights)
            .map_err(|e| Error::InvalidKernel(format!("alias table: {e}")))?;
        let exp = Exp::new(rate).map_err(|e| Error::InvalidKernel(format!("jump rate: {e}")))?;
        Ok(Self {
            grid,
            rate,
            table: Some((alias, exp)),
            offsets,
        })
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    /// Total jump rate `mu`.
    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn sample_path(&self, start: usize, horizon: T, seed: SeedSpec) -> Result<JumpPath<T>> {
        let mut rng = seed.rng();
        self.sample_path_with(start, horizon, &mut rng)
    }

    pub fn sample_path_with<R: Rng + ?Sized>(
        &self,
        start: usize,
        horizon: T,
        rng: &mut R,
    ) -> Result<JumpPath<T>> {
        if start >= self.grid.len() {
            return Err(Error::Domain(format!(
                "start site {start} outside grid of {} sites",
                self.grid.len()
            )));
        }
        if !(horizon >= T::zero()) || !horizon.is_finite() {
            return Err(Error::Domain(format!("horizon must be non-negative, got {horizon}")));
        }
        let mut path = JumpPath::constant(start, horizon);
        let Some((alias, exp)) = &self.table else {
            return Ok(path);
        };
        let end = horizon.as_f64();
        let mut t = 0.0;
        let mut site = start;
        loop {
            t += exp.sample(rng);
            if t > end {
                break;
            }
            site = self.grid.shift(site, self.offsets[alias.sample(rng)]);
            path.jump_times.push(T::of(t));
            path.positions.push(site);
        }
        Ok(path)
    }
}
