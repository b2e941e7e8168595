use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{combined_kernel, Field, Kernel, SpectralMultiplier};
use crate::params::ModelParams;
use crate::scalar::Scalar;
use crate::series::FieldSeries;
use crate::solver::{Recorder, SolverRun, StepOptions};

/// Values below this are reported as a loss of positivity.
const POSITIVITY_FLOOR: f64 = -1e-10;

/// Reaction part `F(u) = beta u - kappa_minus u (a_minus * u)`.
struct Reaction<T: Scalar> {
    beta: T,
    kappa_minus: T,
    competition: SpectralMultiplier<T>,
}

impl<T: Scalar> Reaction<T> {
    fn new(params: &ModelParams<T>, a_minus: &Kernel<T>) -> Self {
        Self {
            beta: params.beta(),
            kappa_minus: params.kappa_minus(),
            competition: SpectralMultiplier::convolution(a_minus),
        }
    }

    fn eval(&self, u: &Field<T>) -> Result<Field<T>> {
        let c = self.competition.apply(u)?;
        u.zip_with(&c, |v, cv| v * (self.beta - self.kappa_minus * cv))
    }

    /// Explicit midpoint step of length `h`.
    fn midpoint(&self, u: &Field<T>, h: T) -> Result<Field<T>> {
        let mid = u.axpy(h * T::of(0.5), &self.eval(u)?)?;
        u.axpy(h, &self.eval(&mid)?)
    }
}

/// Solves `du/dt = kappa_plus L_{a_plus} u + beta u - kappa_minus u (a_minus * u)`.
///
/// Strang splitting: a midpoint half step of the reaction, the exact spectral
/// flow of `kappa_plus L_{a_plus}` over `dt`, and another reaction half step.
/// Both `0` and `theta` are fixed points of every sub-step.
pub fn solve_logistic<T: Scalar>(
    u0: &Field<T>,
    params: &ModelParams<T>,
    a_plus: &Kernel<T>,
    a_minus: &Kernel<T>,
    opts: StepOptions<T>,
) -> Result<SolverRun<T>> {
    a_plus.grid().ensure_same(u0.grid())?;
    a_minus.grid().ensure_same(u0.grid())?;
    if u0.min() < T::zero() {
        return Err(Error::Domain(format!(
            "initial data must be non-negative, min is {}",
            u0.min()
        )));
    }
    let steps = opts.steps()?;
    let kp = params.kappa_plus();
    let max_dt = T::of(0.1) / (T::of(2.0) * kp + params.kappa_minus() * u0.sup_norm());
    if opts.dt > max_dt {
        return Err(Error::StepSize(format!(
            "dt = {} exceeds 0.1 / (2 kappa_plus + kappa_minus ||u0||) = {max_dt}",
            opts.dt
        )));
    }
    let dispersal = SpectralMultiplier::semigroup(a_plus.scaled(kp)?.as_signed(), opts.dt)?;
    let reaction = Reaction::new(params, a_minus);
    let half = opts.dt * T::of(0.5);
    let floor = T::of(POSITIVITY_FLOOR);

    let mut rec = Recorder::new(opts, u0);
    let mut u = u0.clone();
    for step in 1..=steps {
        let v = reaction.midpoint(&u, half)?;
        u = reaction.midpoint(&dispersal.apply(&v)?, half)?;
        let min = u.min();
        if min < floor || !u.sup_norm().is_finite() {
            return Err(Error::PositivityViolation {
                t: rec.time(step).as_f64(),
                min: min.as_f64(),
            });
        }
        rec.push(step, &u);
    }
    rec.finish()
}

/// `q_t = theta / (1 + exp(-beta t) (theta / q0 - 1))`, the spatially constant solution.
pub fn logistic_closed_form<T: Scalar>(q0: T, params: &ModelParams<T>, t: T) -> Result<T> {
    if !(q0 > T::zero()) {
        return Err(Error::Domain(format!("q0 must be positive, got {q0}")));
    }
    let theta = params.theta();
    Ok(theta / (T::one() + (-params.beta() * t).exp() * (theta / q0 - T::one())))
}

/// Largest deviation of a stored solution from its own mild form
/// `u_t = exp(t kappa_plus L_{a_plus}) u_0 + int_0^t exp((t-s) kappa_plus L_{a_plus}) F(u_s) ds`,
/// with the time integral done by the trapezoid rule on the stored grid.
pub fn logistic_mild_residual<T: Scalar>(
    u: &FieldSeries<T>,
    params: &ModelParams<T>,
    a_plus: &Kernel<T>,
    a_minus: &Kernel<T>,
) -> Result<T> {
    let dt = u.dt();
    let half = dt * T::of(0.5);
    let dispersal = SpectralMultiplier::semigroup(a_plus.scaled(params.kappa_plus())?.as_signed(), dt)?;
    let reaction = Reaction::new(params, a_minus);
    let mut mild = u.first().clone();
    let mut source = reaction.eval(u.first())?;
    let mut worst = T::zero();
    for k in 1..u.len() {
        let next = reaction.eval(u.field(k))?;
        mild = dispersal.apply(&mild.axpy(half, &source)?)?.axpy(half, &next)?;
        worst = worst.max(mild.distance(u.field(k))?);
        source = next;
    }
    Ok(worst)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparisonViolation<T> {
    pub t: T,
    pub index: usize,
    pub value: T,
    pub bound: T,
}

/// Outcome of checking `u_t >= q_t - tol` at every stored site and time.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparisonReport<T> {
    pub q0: T,
    pub tol: T,
    pub holds: bool,
    /// `min (u_t(x) - q_t)` over all stored points.
    pub min_margin: T,
    pub violations: Vec<ComparisonViolation<T>>,
}

/// Checks the comparison bound from below by the constant solution started at `q0`.
/// The bound needs `J_{q0} >= 0`.
pub fn comparison_check<T: Scalar>(
    u: &FieldSeries<T>,
    params: &ModelParams<T>,
    a_plus: &Kernel<T>,
    a_minus: &Kernel<T>,
    q0: T,
    tol: T,
) -> Result<ComparisonReport<T>> {
    let j = combined_kernel(params, a_plus, a_minus, q0)?;
    if !j.is_nonneg() {
        return Err(Error::AssumptionViolated(format!(
            "J_kappa with kappa = q0 = {q0} has negative values (min {})",
            j.min_value()
        )));
    }
    if u.first().min() < q0 - tol {
        return Err(Error::Domain(format!(
            "initial data must satisfy u0 >= q0 = {q0}, min is {}",
            u.first().min()
        )));
    }
    let mut min_margin = T::infinity();
    let mut violations = Vec::new();
    for (k, field) in u.fields().iter().enumerate() {
        let t = u.time(k);
        let q = logistic_closed_form(q0, params, t)?;
        for (index, &value) in field.values().iter().enumerate() {
            min_margin = min_margin.min(value - q);
            if value < q - tol {
                violations.push(ComparisonViolation {
                    t,
                    index,
                    value,
                    bound: q,
                });
            }
        }
    }
    Ok(ComparisonReport {
        q0,
        tol,
        holds: violations.is_empty(),
        min_margin,
        violations,
    })
}
