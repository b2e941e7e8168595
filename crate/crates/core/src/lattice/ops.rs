use num_complex::Complex;

use crate::error::{Error, Result};
use crate::lattice::{Field, Grid, SignedKernel};
use crate::scalar::Scalar;

/// Diagonal operator in Fourier space, applied by one forward and one inverse transform.
#[derive(Clone, Debug)]
pub struct SpectralMultiplier<T: Scalar> {
    grid: Grid<T>,
    factors: Vec<Complex<T>>,
}

impl<T: Scalar> SpectralMultiplier<T> {
    pub fn new(grid: &Grid<T>, factors: Vec<Complex<T>>) -> Result<Self> {
        if factors.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "multiplier has {} modes, grid has {}",
                factors.len(),
                grid.len()
            )));
        }
        Ok(Self {
            grid: grid.clone(),
            factors,
        })
    }

    /// Multiplier `exp(t (J^(lambda) - J^(0)))`, the semigroup of `L_J` at time `t`.
    pub fn semigroup(kernel: &SignedKernel<T>, t: T) -> Result<Self> {
        if !(t >= T::zero()) {
            return Err(Error::Domain(format!("semigroup time must be non-negative, got {t}")));
        }
        let integral = kernel.integral();
        let factors = kernel
            .symbol()
            .iter()
            .enumerate()
            .map(|(k, &s)| {
                if k == 0 {
                    Complex::new(T::one(), T::zero())
                } else {
                    ((s - integral) * t).exp()
                }
            })
            .collect();
        Self::new(kernel.grid(), factors)
    }

    /// Convolution with the kernel.
    pub fn convolution(kernel: &SignedKernel<T>) -> Self {
        Self {
            grid: kernel.grid().clone(),
            factors: kernel.symbol().to_vec(),
        }
    }

    pub fn factors(&self) -> &[Complex<T>] {
        &self.factors
    }

    pub fn apply(&self, f: &Field<T>) -> Result<Field<T>> {
        self.grid.ensure_same(f.grid())?;
        let mut spectrum = self.grid.forward(f.values());
        for (c, m) in spectrum.iter_mut().zip(&self.factors) {
            *c *= *m;
        }
        Ok(Field::from_raw(&self.grid, self.grid.inverse_real(spectrum)))
    }
}

/// Circular convolution `(J * f)(x_i) = h^d sum_j J(x_i - x_j) f(x_j)`.
pub fn convolve<T: Scalar>(kernel: impl AsRef<SignedKernel<T>>, f: &Field<T>) -> Result<Field<T>> {
    SpectralMultiplier::convolution(kernel.as_ref()).apply(f)
}

/// `L_J f = J * f - (integral J) f`.
pub fn apply_generator<T: Scalar>(
    kernel: impl AsRef<SignedKernel<T>>,
    f: &Field<T>,
) -> Result<Field<T>> {
    let kernel = kernel.as_ref();
    convolve(kernel, f)?.axpy(-kernel.integral(), f)
}

/// `exp(t L_J) f`, evaluated exactly through the discrete symbol.
pub fn semigroup_apply<T: Scalar>(
    kernel: impl AsRef<SignedKernel<T>>,
    t: T,
    f: &Field<T>,
) -> Result<Field<T>> {
    SpectralMultiplier::semigroup(kernel.as_ref(), t)?.apply(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_kernel, KernelProfile};

    fn setup() -> (Grid<f64>, SignedKernel<f64>) {
        let g = Grid::new(1, 10.0, 32).unwrap();
        let k = build_kernel(&KernelProfile::Gaussian { sigma: 1.0 }, &g).unwrap();
        (g, k.as_signed().clone())
    }

    #[test]
    fn delta_kernel_is_identity() {
        let g = Grid::<f64>::new(1, 4.0, 8).unwrap();
        let mut v = vec![0.0; 8];
        v[0] = 1.0;
        let delta = build_kernel(&KernelProfile::Tabulated { values: v }, &g).unwrap();
        let f = Field::from_fn(&g, |x| x[0].sin()).unwrap();
        let out = convolve(&delta, &f).unwrap();
        assert!(out.distance(&f).unwrap() < 1e-14);
        // J = mu delta gives L_J f = mu (f - f) = 0
        let scaled = delta.scaled(3.0).unwrap();
        assert!(apply_generator(&scaled, &f).unwrap().sup_norm() < 1e-13);
    }

    #[test]
    fn constants_are_preserved() {
        let (g, k) = setup();
        let c = Field::constant(&g, 2.5);
        assert!(convolve(&k, &c).unwrap().distance(&c).unwrap() < 1e-13);
        assert!(apply_generator(&k, &c).unwrap().sup_norm() < 1e-13);
        assert!(semigroup_apply(&k, 3.0, &c).unwrap().distance(&c).unwrap() < 1e-13);
    }

    #[test]
    fn semigroup_at_zero_is_identity_and_rejects_negative_time() {
        let (g, k) = setup();
        let f = Field::from_fn(&g, |x| (x[0] * 0.7).cos()).unwrap();
        assert!(semigroup_apply(&k, 0.0, &f).unwrap().distance(&f).unwrap() < 1e-14);
        assert!(matches!(semigroup_apply(&k, -1.0, &f), Err(Error::Domain(_))));
    }

    #[test]
    fn semigroup_preserves_nonnegativity() {
        let (g, k) = setup();
        let f = Field::indicator(&g, 5);
        let out = semigroup_apply(&k, 0.8, &f).unwrap();
        assert!(out.min() > -1e-15);
    }

    #[test]
    fn short_time_taylor_remainder() {
        // |e^{tL} f - f - t L f| <= t^2/2 ||L^2 f||, and ||L|| <= 2 mu
        let (g, k) = setup();
        let f = Field::from_fn(&g, |x| if x[0] < 3.0 { 1.0 } else { 0.0 }).unwrap();
        let lf = apply_generator(&k, &f).unwrap();
        let llf = apply_generator(&k, &lf).unwrap();
        let c = 0.5 * llf.sup_norm() * (1.0 + 2.0 * k.integral());
        for &t in &[1e-1, 1e-2, 1e-3] {
            let exact = semigroup_apply(&k, t, &f).unwrap();
            let taylor = f.axpy(t, &lf).unwrap();
            assert!(exact.distance(&taylor).unwrap() <= c * t * t);
        }
    }

    #[test]
    fn grid_mismatch_is_reported() {
        let (_, k) = setup();
        let other = Grid::new(1, 10.0, 16).unwrap();
        let f = Field::constant(&other, 1.0);
        assert!(matches!(convolve(&k, &f), Err(Error::GridMismatch(_))));
    }
}
