use num_complex::Complex;

use crate::binomial::pascal;
use crate::error::{Error, Result};
use crate::lattice::{Field, Kernel, SpectralMultiplier};
use crate::params::ModelParams;
use crate::scalar::Scalar;
use crate::series::FieldSeries;
use crate::solver::StepOptions;

/// Taylor coefficients `k_n = d^n u / d lambda^n` at `lambda = 0` of the
/// logistic solution started from `theta exp(lambda xi)`.
#[derive(Clone, Debug)]
pub struct TaylorHierarchy<T: Scalar> {
    coefficients: Vec<FieldSeries<T>>,
}

impl<T: Scalar> TaylorHierarchy<T> {
    pub fn order(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn coefficient(&self, n: usize) -> &FieldSeries<T> {
        &self.coefficients[n]
    }

    pub fn coefficients(&self) -> &[FieldSeries<T>] {
        &self.coefficients
    }

    /// `sum_{n <= n_max} lambda^n / n! k_n` at every stored time.
    pub fn resum(&self, lambda: T) -> Result<FieldSeries<T>> {
        let first = &self.coefficients[0];
        let fields = (0..first.len())
            .map(|k| {
                let mut acc = Field::zeros(first.grid());
                let mut weight = T::one();
                for (n, c) in self.coefficients.iter().enumerate() {
                    if n > 0 {
                        weight = weight * lambda / T::of_usize(n);
                    }
                    acc = acc.axpy(weight, c.field(k))?;
                }
                Ok(acc)
            })
            .collect::<Result<Vec<_>>>()?;
        FieldSeries::new(first.dt(), fields)
    }
}

/// Integrates the hierarchy
/// `dk_n/dt = kappa_plus L_{a_plus} k_n + beta k_n - kappa_minus sum_{l=0}^{n} C(n, l) k_l (a_minus * k_{n-l})`,
/// `k_{n,0} = theta xi^n`, with `k_0 = theta`.
///
/// The terms linear in `k_n` (the `l = 0` and `l = n` summands together with
/// the dispersal and growth terms) share one Fourier symbol and are integrated
/// exactly; the remaining sum over `1 <= l <= n-1` is a source from lower
/// orders, handled by the trapezoid rule. `k_1` therefore has no time error.
pub fn solve_taylor_hierarchy<T: Scalar>(
    xi: &Field<T>,
    params: &ModelParams<T>,
    a_plus: &Kernel<T>,
    a_minus: &Kernel<T>,
    n_max: usize,
    opts: StepOptions<T>,
) -> Result<TaylorHierarchy<T>> {
    if n_max < 1 {
        return Err(Error::Domain("taylor hierarchy needs n_max >= 1".into()));
    }
    a_plus.grid().ensure_same(xi.grid())?;
    a_minus.grid().ensure_same(xi.grid())?;
    let binom = pascal(n_max)?;
    let steps = opts.steps()?;
    let grid = xi.grid();
    let theta = params.theta();
    let kp = params.kappa_plus();
    let km = params.kappa_minus();
    let dt = opts.dt;
    let half = dt * T::of(0.5);

    let ap0 = a_plus.symbol()[0];
    let am0 = a_minus.symbol()[0];
    let factors: Vec<Complex<T>> = a_plus
        .symbol()
        .iter()
        .zip(a_minus.symbol())
        .map(|(&p, &m)| {
            let rate = (p - ap0) * kp + params.beta() - (m + am0) * (km * theta);
            (rate * dt).exp()
        })
        .collect();
    let propagate = SpectralMultiplier::new(grid, factors)?;
    let competition = SpectralMultiplier::convolution(a_minus);

    // k[n] at the current time, conv[n] = a_minus * k[n]
    let mut k: Vec<Field<T>> = (0..=n_max)
        .map(|n| xi.map(|v| theta * v.powi(n as i32)))
        .collect();
    k[0] = Field::constant(grid, theta);
    let mut conv: Vec<Field<T>> = k.iter().map(|f| competition.apply(f)).collect::<Result<_>>()?;

    let source = |n: usize, k: &[Field<T>], conv: &[Field<T>]| -> Result<Field<T>> {
        let mut s = Field::zeros(grid);
        for l in 1..n {
            let c = T::of(binom[n][l] as f64);
            s = s.axpy(-km * c, &k[l].mul(&conv[n - l])?)?;
        }
        Ok(s)
    };

    let mut stored: Vec<Vec<Field<T>>> = k.iter().map(|f| vec![f.clone()]).collect();
    let mut sources: Vec<Field<T>> = (0..=n_max).map(|n| source(n, &k, &conv)).collect::<Result<_>>()?;

    for step in 1..=steps {
        for n in 1..=n_max {
            let pushed = propagate.apply(&k[n].axpy(half, &sources[n])?)?;
            // sources at the new time only involve orders below n, already advanced
            let fresh = source(n, &k, &conv)?;
            k[n] = pushed.axpy(half, &fresh)?;
            conv[n] = competition.apply(&k[n])?;
            sources[n] = fresh;
        }
        if step % opts.store_every == 0 {
            for (s, f) in stored.iter_mut().zip(&k) {
                s.push(f.clone());
            }
        }
    }

    let store_dt = dt * T::of_usize(opts.store_every);
    Ok(TaylorHierarchy {
        coefficients: stored
            .into_iter()
            .map(|fields| FieldSeries::new(store_dt, fields))
            .collect::<Result<_>>()?,
    })
}
