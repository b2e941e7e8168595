use crate::error::{Error, Result};
use crate::lattice::{Field, Kernel, SpectralMultiplier};
use crate::scalar::Scalar;
use crate::series::FieldSeries;
use crate::solver::{Recorder, SolverRun, StepOptions};

/// Solves `du/dt = L_J u + W(t) u` by Strang splitting: half a step of the
/// potential frozen at `t_n`, the exact semigroup over `dt`, half a step of
/// the potential frozen at `t_{n+1}`.
pub fn solve_perturbed<T: Scalar>(
    u0: &Field<T>,
    w: &FieldSeries<T>,
    kernel: &Kernel<T>,
    opts: StepOptions<T>,
) -> Result<SolverRun<T>> {
    kernel.grid().ensure_same(u0.grid())?;
    kernel.grid().ensure_same(w.grid())?;
    w.ensure_covers(opts.horizon)?;
    let steps = opts.steps()?;
    let w_norm = w.sup_norm();
    let max_dt = T::of(0.1) / (kernel.mass() + w_norm);
    if opts.dt > max_dt {
        return Err(Error::StepSize(format!(
            "dt = {} exceeds 0.1 / (integral J + ||W||) = {max_dt}",
            opts.dt
        )));
    }
    let limit = T::of(10.0) * (w_norm * opts.horizon).exp() * u0.sup_norm();
    let propagate = SpectralMultiplier::semigroup(kernel, opts.dt)?;
    let half = opts.dt * T::of(0.5);
    let factor = |t: T| w.at(t).map(|v| (half * v).exp());

    let mut rec = Recorder::new(opts, u0);
    let mut u = u0.clone();
    let mut left = factor(T::zero());
    for step in 1..=steps {
        let t = rec.time(step);
        let right = factor(t);
        u = propagate.apply(&u.mul(&left)?)?.mul(&right)?;
        let sup = u.sup_norm();
        if !sup.is_finite() || sup > limit {
            return Err(Error::Instability {
                t: t.as_f64(),
                sup_norm: sup.as_f64(),
                limit: limit.as_f64(),
            });
        }
        rec.push(step, &u);
        left = right;
    }
    rec.finish()
}
