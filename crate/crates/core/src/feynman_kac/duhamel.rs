use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{Field, Kernel, SpectralMultiplier};
use crate::scalar::Scalar;
use crate::series::FieldSeries;

/// Partial sum `sum_{j=0}^{n} Q^j(p * u0)` at time `t` and a bound on the dropped tail.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DuhamelSeries<T: Scalar> {
    #[serde(skip)]
    pub partial_sum: Field<T>,
    /// `Q^j(p * u0)` at time `t`, `j = 0..=n`.
    #[serde(skip)]
    pub terms: Vec<Field<T>>,
    /// `(t ||W||)^{n+1} / (n+1)! * ||u0|| exp(t ||W||)`.
    pub remainder_bound: T,
    pub n_terms: usize,
}

/// Number of steps `t / dt`, which must be an integer.
pub(crate) fn step_count<T: Scalar>(t: T, dt: T) -> Result<usize> {
    if !(dt > T::zero()) || !(t >= T::zero()) {
        return Err(Error::Domain(format!(
            "need t >= 0 and dt > 0, got t = {t}, dt = {dt}"
        )));
    }
    let steps = (t / dt).round();
    if (steps * dt - t).abs() > T::of(1e-9) * (T::one() + t) {
        return Err(Error::Domain(format!("time step {dt} does not divide {t}")));
    }
    Ok(steps.to_usize().unwrap_or(0))
}

/// Iterates the Duhamel operator
/// `(Q f)(t) = int_0^t exp((t - s) L_J) [W(s) f(s)] ds`
/// with exact spectral propagation and the composite trapezoid rule in `s`.
pub fn duhamel_series<T: Scalar>(
    u0: &Field<T>,
    w: &FieldSeries<T>,
    kernel: &Kernel<T>,
    t: T,
    n_terms: usize,
    dt: T,
) -> Result<DuhamelSeries<T>> {
    if n_terms < 1 {
        return Err(Error::Domain("duhamel series needs at least one term".into()));
    }
    kernel.grid().ensure_same(u0.grid())?;
    kernel.grid().ensure_same(w.grid())?;
    w.ensure_covers(t)?;
    let steps = step_count(t, dt)?;
    let propagate = SpectralMultiplier::semigroup(kernel, dt)?;
    let half = dt * T::of(0.5);

    let potential: Vec<Field<T>> = (0..=steps).map(|k| w.at(dt * T::of_usize(k))).collect();

    let mut current = Vec::with_capacity(steps + 1);
    current.push(u0.clone());
    for k in 0..steps {
        let next = propagate.apply(&current[k])?;
        current.push(next);
    }
    let mut terms = vec![current[steps].clone()];

    for _ in 0..n_terms {
        let source: Vec<Field<T>> = potential
            .iter()
            .zip(&current)
            .map(|(wk, vk)| wk.mul(vk))
            .collect::<Result<_>>()?;
        let mut next = Vec::with_capacity(steps + 1);
        next.push(Field::zeros(u0.grid()));
        for k in 0..steps {
            let pushed = propagate.apply(&next[k].axpy(half, &source[k])?)?;
            next.push(pushed.axpy(half, &source[k + 1])?);
        }
        terms.push(next[steps].clone());
        current = next;
    }

    let mut partial_sum = Field::zeros(u0.grid());
    for term in &terms {
        partial_sum = partial_sum.add(term)?;
    }

    let wt = t * w.sup_norm();
    let mut tail = T::one();
    for j in 1..=n_terms + 1 {
        tail = tail * wt / T::of_usize(j);
    }
    Ok(DuhamelSeries {
        partial_sum,
        terms,
        remainder_bound: tail * u0.sup_norm() * wt.exp(),
        n_terms,
    })
}
