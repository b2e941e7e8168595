use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::feynman_kac::duhamel::step_count;
use crate::feynman_kac::ensemble::{mean_stderr, PathEnsemble, MIN_PATHS};
use crate::jump::JumpSampler;
use crate::lattice::{Field, Kernel};
use crate::scalar::Scalar;
use crate::seed::SeedSpec;
use crate::series::FieldSeries;

/// Settings for the Picard iteration `w -> Psi w`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FixedPointOptions<T> {
    pub horizon: T,
    pub dt: T,
    pub n_paths: usize,
    pub seed: SeedSpec,
    pub max_iter: usize,
    pub tol: T,
    /// Local Lipschitz constant `M` of `V` on the ball of radius `||u0||`.
    pub lipschitz: T,
}

/// Convergence record of one time block.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlockReport<T> {
    pub start: T,
    pub end: T,
    pub iterations: usize,
    /// Sup-norm change between successive iterates.
    pub history: Vec<T>,
    /// Change produced by one further application of `Psi` to the returned iterate.
    pub residual: T,
}

#[derive(Clone, Debug)]
pub struct FixedPointSolution<T: Scalar> {
    pub series: FieldSeries<T>,
    pub stderr: FieldSeries<T>,
    pub blocks: Vec<BlockReport<T>>,
}

type Mapping<'a, T> = dyn Fn(&Field<T>) -> Field<T> + Sync + 'a;

/// One application of `Psi`: the Feynman-Kac mean with potential `V(w_s)` at
/// every site and every node of the block, using frozen paths.
#[allow(clippy::type_complexity)]
fn apply_psi<T: Scalar>(
    ensemble: &PathEnsemble<T>,
    u0: &Field<T>,
    potential: &FieldSeries<T>,
    steps: usize,
) -> Result<(Vec<Field<T>>, Vec<Field<T>>)> {
    let grid = u0.grid();
    let per_point = (0..ensemble.points().len())
        .into_par_iter()
        .map(|p| {
            (0..=steps)
                .map(|k| {
                    let t = potential.time(k);
                    let weights = ensemble.weights(p, u0, potential, t)?;
                    Ok(mean_stderr(&weights))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut means = Vec::with_capacity(steps + 1);
    let mut errs = Vec::with_capacity(steps + 1);
    for k in 0..=steps {
        let (m, e): (Vec<T>, Vec<T>) = per_point.iter().map(|row| row[k]).unzip();
        means.push(Field::new(grid, m)?);
        errs.push(Field::new(grid, e)?);
    }
    Ok((means, errs))
}

fn series_distance<T: Scalar>(a: &[Field<T>], b: &[Field<T>]) -> Result<T> {
    a.iter()
        .zip(b)
        .try_fold(T::zero(), |m, (x, y)| Ok(m.max(x.distance(y)?)))
}

/// Solves `u = Psi u` where
/// `(Psi w)_t(x) = E^x[u0(X_t) exp(int_0^t V(w_{t-s})(X_s) ds)]`.
///
/// The horizon is cut into blocks of length `1 / (2 d M)` (rounded down to the
/// time step) whenever `d T M >= 1`, `d` being the sup norm at the block start.
/// Each block freezes its own path ensemble, so the iteration is deterministic.
pub fn fk_nonlinear_fixed_point<T: Scalar>(
    u0: &Field<T>,
    v: &Mapping<'_, T>,
    kernel: &Kernel<T>,
    opts: &FixedPointOptions<T>,
) -> Result<FixedPointSolution<T>> {
    if opts.n_paths < MIN_PATHS {
        return Err(Error::Domain(format!(
            "need at least {MIN_PATHS} paths, got {}",
            opts.n_paths
        )));
    }
    if !(opts.tol > T::zero()) || opts.max_iter == 0 {
        return Err(Error::Domain("need tol > 0 and max_iter >= 1".into()));
    }
    if !(opts.lipschitz >= T::zero()) {
        return Err(Error::Domain("Lipschitz constant must be non-negative".into()));
    }
    kernel.grid().ensure_same(u0.grid())?;
    let total_steps = step_count(opts.horizon, opts.dt)?;
    let grid = u0.grid();
    let sampler = JumpSampler::new(kernel)?;
    let sites: Vec<usize> = (0..grid.len()).collect();
    let streams_per_block = (grid.len() * opts.n_paths) as u64;

    let mut fields = vec![u0.clone()];
    let mut errors = vec![Field::zeros(grid)];
    let mut blocks = Vec::new();
    let mut done = 0;
    let mut current = u0.clone();

    while done < total_steps {
        let remaining = total_steps - done;
        let d = current.sup_norm();
        let product = d * opts.lipschitz;
        let steps = if product * opts.dt * T::of_usize(remaining) < T::one() {
            remaining
        } else {
            let sub = T::one() / (T::of(2.0) * product);
            ((sub / opts.dt).floor().to_usize().unwrap_or(0)).clamp(1, remaining)
        };
        let block_len = opts.dt * T::of_usize(steps);
        let seed = opts.seed.offset(blocks.len() as u64 * streams_per_block);
        let ensemble = PathEnsemble::sample(&sampler, &sites, opts.n_paths, block_len, seed)?;

        let mut iterate = vec![current.clone(); steps + 1];
        let mut iterate_err = vec![Field::zeros(grid); steps + 1];
        let mut history = Vec::new();
        let mut converged = false;
        for _ in 0..opts.max_iter {
            let potential = FieldSeries::new(opts.dt, iterate.iter().map(v).collect())?;
            let (next, next_err) = apply_psi(&ensemble, &current, &potential, steps)?;
            let change = series_distance(&next, &iterate)?;
            history.push(change);
            iterate = next;
            iterate_err = next_err;
            if change < opts.tol {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::ConvergenceFailure {
                history: history.into_iter().map(T::as_f64).collect(),
            });
        }
        let potential = FieldSeries::new(opts.dt, iterate.iter().map(v).collect())?;
        let (again, _) = apply_psi(&ensemble, &current, &potential, steps)?;
        let residual = series_distance(&again, &iterate)?;

        blocks.push(BlockReport {
            start: opts.dt * T::of_usize(done),
            end: opts.dt * T::of_usize(done + steps),
            iterations: history.len(),
            history,
            residual,
        });
        current = iterate[steps].clone();
        fields.extend(iterate.into_iter().skip(1));
        errors.extend(iterate_err.into_iter().skip(1));
        done += steps;
    }

    Ok(FixedPointSolution {
        series: FieldSeries::new(opts.dt, fields)?,
        stderr: FieldSeries::new(opts.dt, errors)?,
        blocks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_kernel, Grid, KernelProfile};

    #[test]
    fn zero_data_is_a_fixed_point() {
        let g = Grid::<f64>::new(1, 8.0, 8).unwrap();
        let k = build_kernel(&KernelProfile::Gaussian { sigma: 1.0 }, &g).unwrap();
        let v = |f: &Field<f64>| f.scale(-1.0);
        let opts = FixedPointOptions {
            horizon: 0.5,
            dt: 0.1,
            n_paths: 100,
            seed: SeedSpec::new(1, 0),
            max_iter: 10,
            tol: 1e-12,
            lipschitz: 1.0,
        };
        let sol = fk_nonlinear_fixed_point(&Field::zeros(&g), &v, &k, &opts).unwrap();
        assert_eq!(sol.series.len(), 6);
        assert!(sol.series.sup_norm() == 0.0);
        assert_eq!(sol.blocks.len(), 1);
        assert_eq!(sol.blocks[0].iterations, 1);
    }

    #[test]
    fn large_data_subdivides_horizon() {
        let g = Grid::<f64>::new(1, 8.0, 8).unwrap();
        let k = build_kernel(&KernelProfile::Gaussian { sigma: 1.0 }, &g).unwrap();
        // V(f) = -0.5 f has Lipschitz constant 0.5; d = 2 gives blocks of 1 / (2 * 2 * 0.5) = 0.5
        let v = |f: &Field<f64>| f.scale(-0.5);
        let opts = FixedPointOptions {
            horizon: 1.0,
            dt: 0.1,
            n_paths: 100,
            seed: SeedSpec::new(1, 0),
            max_iter: 60,
            tol: 1e-10,
            lipschitz: 0.5,
        };
        let sol = fk_nonlinear_fixed_point(&Field::constant(&g, 2.0), &v, &k, &opts).unwrap();
        assert!(sol.blocks.len() >= 2);
        assert!((sol.blocks[0].end - 0.5).abs() < 1e-12);
        // constant data: dw/dt = -0.5 w^2 so w = 2 / (1 + t) up to the time quadrature
        let exact = 2.0 / 2.0;
        assert!((sol.series.last().get(3) - exact).abs() < 5e-3);
    }

    #[test]
    fn non_convergence_is_reported() {
        let g = Grid::<f64>::new(1, 8.0, 8).unwrap();
        let k = build_kernel(&KernelProfile::Gaussian { sigma: 1.0 }, &g).unwrap();
        let v = |f: &Field<f64>| f.scale(-1.0);
        let opts = FixedPointOptions {
            horizon: 0.4,
            dt: 0.1,
            n_paths: 100,
            seed: SeedSpec::new(1, 0),
            max_iter: 2,
            tol: 1e-14,
            lipschitz: 1.0,
        };
        let err = fk_nonlinear_fixed_point(&Field::constant(&g, 1.0), &v, &k, &opts).unwrap_err();
        match err {
            Error::ConvergenceFailure { history } => assert_eq!(history.len(), 2),
            other => panic!("unexpected {other:?}"),
        }
    }
}
