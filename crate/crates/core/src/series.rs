//! Fields stored on a uniform time grid `t_k = k dt`, `k = 0..=K`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Field, Grid};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct FieldSeries<T: Scalar> {
    dt: T,
    fields: Vec<Field<T>>,
}

impl<T: Scalar> FieldSeries<T> {
    pub fn new(dt: T, fields: Vec<Field<T>>) -> Result<Self> {
        if fields.is_empty() {
            return Err(Error::Domain("field series needs at least one field".into()));
        }
        if fields.len() > 1 && !(dt > T::zero()) {
            return Err(Error::Domain(format!("time step must be positive, got {dt}")));
        }
        let grid = fields[0].grid();
        for f in &fields[1..] {
            grid.ensure_same(f.grid())?;
        }
        Ok(Self { dt, fields })
    }

    /// Time-independent series on `[0, horizon]`.
    pub fn constant(field: Field<T>, horizon: T) -> Result<Self> {
        if !(horizon > T::zero()) {
            return Err(Error::Domain(format!("horizon must be positive, got {horizon}")));
        }
        Self::new(horizon, vec![field.clone(), field])
    }

    pub fn grid(&self) -> &Grid<T> {
        self.fields[0].grid()
    }

    pub fn dt(&self) -> T {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.fields.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }

    pub fn horizon(&self) -> T {
        self.dt * T::of_usize(self.fields.len() - 1)
    }

    pub fn time(&self, k: usize) -> T {
        self.dt * T::of_usize(k)
    }

    pub fn times(&self) -> Vec<T> {
        (0..self.fields.len()).map(|k| self.time(k)).collect()
    }

    pub fn fields(&self) -> &[Field<T>] {
        &self.fields
    }

    pub fn field(&self, k: usize) -> &Field<T> {
        &self.fields[k]
    }

    pub fn first(&self) -> &Field<T> {
        &self.fields[0]
    }

    pub fn last(&self) -> &Field<T> {
        &self.fields[self.fields.len() - 1]
    }

    pub fn ensure_covers(&self, t: T) -> Result<()> {
        let tol = T::of(1e-9) * (T::one() + t.abs());
        if t <= self.horizon() + tol {
            Ok(())
        } else {
            Err(Error::Coverage {
                required: t.as_f64(),
                available: self.horizon().as_f64(),
            })
        }
    }

    /// Bracketing indices and weight of `t` for linear interpolation.
    fn locate(&self, t: T) -> (usize, usize, T) {
        let last = self.fields.len() - 1;
        if last == 0 || t <= T::zero() {
            return (0, 0, T::zero());
        }
        let pos = t / self.dt;
        let k = pos.floor().to_usize().unwrap_or(last).min(last);
        if k >= last {
            return (last, last, T::zero());
        }
        let w = pos - T::of_usize(k);
        // snap to a node when within rounding of it
        if w <= T::of(1e-12) {
            (k, k, T::zero())
        } else if w >= T::one() - T::of(1e-12) {
            (k + 1, k + 1, T::zero())
        } else {
            (k, k + 1, w)
        }
    }

    /// Value at site `index` and time `t`, linear in time between stored fields.
    pub fn value_at(&self, index: usize, t: T) -> T {
        let (a, b, w) = self.locate(t);
        let va = self.fields[a].get(index);
        if a == b {
            va
        } else {
            va + w * (self.fields[b].get(index) - va)
        }
    }

    /// Whole field at time `t`, linear in time between stored fields.
    pub fn at(&self, t: T) -> Field<T> {
        let (a, b, w) = self.locate(t);
        if a == b {
            self.fields[a].clone()
        } else {
            self.fields[a]
                .zip_with(&self.fields[b], |x, y| x + w * (y - x))
                .expect("series fields share a grid")
        }
    }

    /// `sup_t ||u_t||_inf` over the stored fields.
    pub fn sup_norm(&self) -> T {
        self.fields
            .iter()
            .fold(T::zero(), |m, f| m.max(f.sup_norm()))
    }

    /// Applies `f` to every stored field.
    pub fn map(&self, f: impl Fn(&Field<T>) -> Result<Field<T>>) -> Result<Self> {
        Self::new(self.dt, self.fields.iter().map(f).collect::<Result<_>>()?)
    }

    /// Stored fields up to and including time `t` (which must be a node).
    pub fn truncated(&self, t: T) -> Result<Self> {
        self.ensure_covers(t)?;
        let k = (t / self.dt).round().to_usize().unwrap_or(0);
        if (self.time(k) - t).abs() > T::of(1e-9) * (T::one() + t) {
            return Err(Error::Domain(format!("time {t} is not a node of the series")));
        }
        Ok(Self {
            dt: self.dt,
            fields: self.fields[..=k].to_vec(),
        })
    }
}

/// Dense per-step summary of a solver state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormRecord<T> {
    pub t: T,
    pub sup_norm: T,
    pub min: T,
    pub max: T,
    pub mean: T,
}

impl<T: Scalar> NormRecord<T> {
    pub fn of(t: T, f: &Field<T>) -> Self {
        let min = f.min();
        let max = f.max();
        Self {
            t,
            sup_norm: max.abs().max(min.abs()),
            min,
            max,
            mean: f.mean(),
        }
    }

    /// `||u - c||_inf`, exact from the stored extrema.
    pub fn deviation(&self, c: T) -> T {
        (self.max - c).abs().max((c - self.min).abs())
    }
}
