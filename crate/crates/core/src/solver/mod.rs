//! Reference time-steppers: the perturbed linear equation, the spatial
//! logistic equation and the hierarchy of Taylor coefficients in the initial
//! data, plus the spatially constant comparison solution.

mod logistic;
mod perturbed;
mod taylor;

use serde::{Deserialize, Serialize};

pub use logistic::{
    comparison_check, logistic_closed_form, logistic_mild_residual, solve_logistic, ComparisonReport,
    ComparisonViolation,
};
pub use perturbed::solve_perturbed;
pub use taylor::{solve_taylor_hierarchy, TaylorHierarchy};

use crate::error::{Error, Result};
use crate::lattice::Field;
use crate::scalar::Scalar;
use crate::series::{FieldSeries, NormRecord};

/// Time grid of a run: `horizon / dt` steps, a field stored every `store_every` steps.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepOptions<T> {
    pub horizon: T,
    pub dt: T,
    #[serde(default = "one")]
    pub store_every: usize,
}

fn one() -> usize {
    1
}

impl<T: Scalar> StepOptions<T> {
    pub fn new(horizon: T, dt: T) -> Self {
        Self {
            horizon,
            dt,
            store_every: 1,
        }
    }

    pub fn storing_every(self, store_every: usize) -> Self {
        Self {
            store_every,
            ..self
        }
    }

    pub(crate) fn steps(&self) -> Result<usize> {
        if self.store_every == 0 {
            return Err(Error::Domain("store_every must be at least 1".into()));
        }
        let steps = crate::feynman_kac::step_count(self.horizon, self.dt)?;
        if steps % self.store_every != 0 {
            return Err(Error::Domain(format!(
                "store_every = {} does not divide the {steps} steps",
                self.store_every
            )));
        }
        Ok(steps)
    }
}

/// Stored fields plus a dense per-step norm record.
#[derive(Clone, Debug)]
pub struct SolverRun<T: Scalar> {
    pub series: FieldSeries<T>,
    pub norms: Vec<NormRecord<T>>,
}

/// Collects output while stepping.
struct Recorder<T: Scalar> {
    opts: StepOptions<T>,
    fields: Vec<Field<T>>,
    norms: Vec<NormRecord<T>>,
}

impl<T: Scalar> Recorder<T> {
    fn new(opts: StepOptions<T>, u0: &Field<T>) -> Self {
        Self {
            opts,
            fields: vec![u0.clone()],
            norms: vec![NormRecord::of(T::zero(), u0)],
        }
    }

    fn time(&self, step: usize) -> T {
        self.opts.dt * T::of_usize(step)
    }

    fn push(&mut self, step: usize, u: &Field<T>) {
        self.norms.push(NormRecord::of(self.time(step), u));
        if step.is_multiple_of(self.opts.store_every) {
            self.fields.push(u.clone());
        }
    }

    fn finish(self) -> Result<SolverRun<T>> {
        let dt = self.opts.dt * T::of_usize(self.opts.store_every);
        Ok(SolverRun {
            series: FieldSeries::new(dt, self.fields)?,
            norms: self.norms,
        })
    }
}
