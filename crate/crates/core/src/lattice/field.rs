use crate::error::{Error, Result};
use crate::lattice::Grid;
use crate::scalar::Scalar;

/// Real-valued function sampled on every site of a [`Grid`].
#[derive(Clone, Debug, PartialEq)]
pub struct Field<T: Scalar> {
    grid: Grid<T>,
    values: Vec<T>,
}

impl<T: Scalar> Field<T> {
    pub fn new(grid: &Grid<T>, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "field has {} values, grid has {} sites",
                values.len(),
                grid.len()
            )));
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self {
            grid: grid.clone(),
            values,
        })
    }

    /// Builds a field from values already known to be finite and correctly sized.
    pub(crate) fn from_raw(grid: &Grid<T>, values: Vec<T>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self {
            grid: grid.clone(),
            values,
        }
    }

    pub fn constant(grid: &Grid<T>, value: T) -> Self {
        Self::from_raw(grid, vec![value; grid.len()])
    }

    pub fn zeros(grid: &Grid<T>) -> Self {
        Self::constant(grid, T::zero())
    }

    /// Samples `f` at the lattice positions `x_i = i h` in `[0, L)^d`.
    pub fn from_fn(grid: &Grid<T>, f: impl Fn(&[T]) -> T) -> Result<Self> {
        let values = (0..grid.len()).map(|i| f(&grid.position(i))).collect();
        Self::new(grid, values)
    }

    /// Unit mass concentrated on one site: value `1 / h^d` there, zero elsewhere.
    pub fn point_mass(grid: &Grid<T>, index: usize) -> Self {
        let mut values = vec![T::zero(); grid.len()];
        values[index] = T::one() / grid.cell_volume();
        Self::from_raw(grid, values)
    }

    /// Indicator of one site.
    pub fn indicator(grid: &Grid<T>, index: usize) -> Self {
        let mut values = vec![T::zero(); grid.len()];
        values[index] = T::one();
        Self::from_raw(grid, values)
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, index: usize) -> T {
        self.values[index]
    }

    pub fn sup_norm(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> T {
        self.values.iter().copied().fold(T::infinity(), T::min)
    }

    pub fn max(&self) -> T {
        self.values.iter().copied().fold(T::neg_infinity(), T::max)
    }

    pub fn mean(&self) -> T {
        self.values.iter().copied().sum::<T>() / T::of_usize(self.values.len())
    }

    /// `h^d * sum(values)`.
    pub fn integral(&self) -> T {
        self.grid.cell_volume() * self.values.iter().copied().sum::<T>()
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self::from_raw(&self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(T, T) -> T) -> Result<Self> {
        self.grid.ensure_same(&other.grid)?;
        Ok(Self::from_raw(
            &self.grid,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        ))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn scale(&self, c: T) -> Self {
        self.map(|v| v * c)
    }

    pub fn offset(&self, c: T) -> Self {
        self.map(|v| v + c)
    }

    /// `self + c * other`.
    pub fn axpy(&self, c: T, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + c * b)
    }

    /// Sup norm of the difference.
    pub fn distance(&self, other: &Self) -> Result<T> {
        self.grid.ensure_same(&other.grid)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(T::zero(), |m, (&a, &b)| m.max((a - b).abs())))
    }
}
