use std::ops::Deref;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::Grid;
use crate::params::ModelParams;
use crate::scalar::Scalar;

/// Convolution kernel of arbitrary sign, stored at minimal-image displacements.
///
/// Entry `i` holds `J(x_i)` where `x_i` is the displacement of site `i` from the
/// origin (wrapped into `(-L/2, L/2]^d`). The discrete symbol
/// `J^(lambda_k) = h^d sum_i J(x_i) exp(-i lambda_k . x_i)` is computed once on
/// construction; `J^(0)` is the integral.
#[derive(Clone, Debug, PartialEq)]
pub struct SignedKernel<T: Scalar> {
    grid: Grid<T>,
    values: Vec<T>,
    symbol: Vec<Complex<T>>,
    l1_mass: T,
    integral: T,
    nonneg: bool,
}

impl<T: Scalar> SignedKernel<T> {
    pub fn new(grid: &Grid<T>, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "kernel has {} values, grid has {} sites",
                values.len(),
                grid.len()
            )));
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        let cell = grid.cell_volume();
        let integral = cell * values.iter().copied().sum::<T>();
        let l1_mass = cell * values.iter().map(|v| v.abs()).sum::<T>();
        let nonneg = values.iter().all(|&v| v >= T::zero());
        let symbol = grid
            .forward(&values)
            .into_iter()
            .map(|c| c * cell)
            .collect();
        Ok(Self {
            grid: grid.clone(),
            values,
            symbol,
            l1_mass,
            integral,
            nonneg,
        })
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Discrete Fourier symbol, one entry per mode.
    pub fn symbol(&self) -> &[Complex<T>] {
        &self.symbol
    }

    /// `h^d sum |J|`.
    pub fn l1_mass(&self) -> T {
        self.l1_mass
    }

    /// `h^d sum J`.
    pub fn integral(&self) -> T {
        self.integral
    }

    pub fn is_nonneg(&self) -> bool {
        self.nonneg
    }

    /// Most negative entry (zero when the kernel is non-negative).
    pub fn min_value(&self) -> T {
        self.values.iter().copied().fold(T::zero(), T::min)
    }

    pub fn scaled(&self, c: T) -> Result<Self> {
        Self::new(&self.grid, self.values.iter().map(|&v| v * c).collect())
    }

    /// `a * self + b * other`.
    pub fn combine(&self, a: T, other: &Self, b: T) -> Result<Self> {
        self.grid.ensure_same(&other.grid)?;
        Self::new(
            &self.grid,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(&x, &y)| a * x + b * y)
                .collect(),
        )
    }

    /// Reinterprets as a non-negative kernel.
    pub fn to_nonneg(&self) -> Result<Kernel<T>> {
        Kernel::try_from(self.clone())
    }
}

/// Non-negative convolution kernel; its integral is the jump rate of the generated process.
#[derive(Clone, Debug, PartialEq)]
pub struct Kernel<T: Scalar>(SignedKernel<T>);

impl<T: Scalar> Kernel<T> {
    pub fn new(grid: &Grid<T>, values: Vec<T>) -> Result<Self> {
        Self::try_from(SignedKernel::new(grid, values)?)
    }

    /// `h^d sum J`.
    pub fn mass(&self) -> T {
        self.0.integral
    }

    pub fn as_signed(&self) -> &SignedKernel<T> {
        &self.0
    }

    pub fn scaled(&self, c: T) -> Result<Self> {
        if c < T::zero() {
            return Err(Error::Domain(format!("kernel scale must be non-negative, got {c}")));
        }
        Ok(Self(self.0.scaled(c)?))
    }
}

impl<T: Scalar> TryFrom<SignedKernel<T>> for Kernel<T> {
    type Error = Error;

    fn try_from(k: SignedKernel<T>) -> Result<Self> {
        if k.nonneg {
            Ok(Self(k))
        } else {
            Err(Error::InvalidKernel(format!(
                "kernel has negative entries (min {})",
                k.min_value()
            )))
        }
    }
}

impl<T: Scalar> Deref for Kernel<T> {
    type Target = SignedKernel<T>;

    fn deref(&self) -> &SignedKernel<T> {
        &self.0
    }
}

impl<T: Scalar> AsRef<SignedKernel<T>> for Kernel<T> {
    fn as_ref(&self) -> &SignedKernel<T> {
        &self.0
    }
}

impl<T: Scalar> AsRef<SignedKernel<T>> for SignedKernel<T> {
    fn as_ref(&self) -> &SignedKernel<T> {
        self
    }
}

/// Shape of a probability kernel before it is placed on a grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelProfile<T> {
    /// Isotropic Gaussian with standard deviation `sigma` per axis.
    Gaussian { sigma: T },
    /// Uniform on the closed ball of the given radius.
    TopHat { radius: T },
    /// Values at the minimal-image displacements, in grid order.
    Tabulated { values: Vec<T> },
}

/// Places a profile on the grid and renormalizes it to unit discrete mass.
pub fn build_kernel<T: Scalar>(profile: &KernelProfile<T>, grid: &Grid<T>) -> Result<Kernel<T>> {
    let h = grid.spacing();
    let slack = T::one() - T::of(1e-12);
    let raw: Vec<T> = match profile {
        KernelProfile::Gaussian { sigma } => {
            if !(*sigma >= h * slack) {
                return Err(Error::UnresolvableKernel(format!(
                    "gaussian sigma {sigma} is below the grid spacing {h}"
                )));
            }
            let two_var = T::of(2.0) * *sigma * *sigma;
            let images = image_shifts(grid);
            (0..grid.len())
                .map(|i| {
                    let x = grid.displacement(i);
                    images
                        .iter()
                        .map(|shift| {
                            let r2 = x
                                .iter()
                                .zip(shift)
                                .fold(T::zero(), |acc, (&xi, &si)| acc + (xi + si) * (xi + si));
                            (-r2 / two_var).exp()
                        })
                        .sum()
                })
                .collect()
        }
        KernelProfile::TopHat { radius } => {
            if !(*radius >= h * slack) {
                return Err(Error::UnresolvableKernel(format!(
                    "top-hat radius {radius} is below the grid spacing {h}"
                )));
            }
            let cutoff = *radius * (T::one() + T::of(1e-12));
            (0..grid.len())
                .map(|i| {
                    let r2 = grid
                        .displacement(i)
                        .iter()
                        .fold(T::zero(), |acc, &x| acc + x * x);
                    if r2.sqrt() <= cutoff {
                        T::one()
                    } else {
                        T::zero()
                    }
                })
                .collect()
        }
        KernelProfile::Tabulated { values } => {
            if values.len() != grid.len() {
                return Err(Error::GridMismatch(format!(
                    "tabulated kernel has {} values, grid has {} sites",
                    values.len(),
                    grid.len()
                )));
            }
            if values.iter().any(|v| !v.is_finite() || *v < T::zero()) {
                return Err(Error::InvalidKernel(
                    "tabulated kernel values must be finite and non-negative".into(),
                ));
            }
            values.clone()
        }
    };
    let total = raw.iter().copied().sum::<T>() * grid.cell_volume();
    if !(total > T::zero()) {
        return Err(Error::InvalidKernel("kernel has zero mass".into()));
    }
    Kernel::new(grid, raw.into_iter().map(|v| v / total).collect())
}

/// Periodic image offsets `{-L, 0, L}^d`.
fn image_shifts<T: Scalar>(grid: &Grid<T>) -> Vec<Vec<T>> {
    let l = grid.extent();
    let mut shifts = vec![Vec::new()];
    for _ in 0..grid.dim() {
        shifts = shifts
            .into_iter()
            .flat_map(|s| {
                [-l, T::zero(), l].into_iter().map(move |o| {
                    let mut next = s.clone();
                    next.push(o);
                    next
                })
            })
            .collect();
    }
    shifts
}

/// `J_kappa = kappa_plus a_plus - kappa kappa_minus a_minus` for `kappa` in `[0, theta]`.
pub fn combined_kernel<T: Scalar>(
    params: &ModelParams<T>,
    a_plus: &Kernel<T>,
    a_minus: &Kernel<T>,
    kappa: T,
) -> Result<SignedKernel<T>> {
    a_plus.grid().ensure_same(a_minus.grid())?;
    let theta = params.theta();
    if !(kappa >= T::zero() && kappa <= theta) {
        return Err(Error::Domain(format!(
            "kappa must lie in [0, theta = {theta}], got {kappa}"
        )));
    }
    a_plus
        .as_signed()
        .combine(params.kappa_plus(), a_minus.as_signed(), -kappa * params.kappa_minus())
}
