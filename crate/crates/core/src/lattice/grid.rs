use std::fmt;
use std::sync::Arc;

use num_complex::Complex;
use num_traits::Zero;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Smallest admissible number of points per axis.
pub const MIN_POINTS: usize = 4;

struct Plans<T: Scalar> {
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
}

/// Periodic lattice `[0, L)^d` with `N` points per axis and spacing `h = L / N`.
///
/// Values on the lattice are stored row-major with the last axis fastest.
/// Cloning is cheap; the FFT plans are shared.
#[derive(Clone)]
pub struct Grid<T: Scalar> {
    dim: usize,
    extent: T,
    points: usize,
    plans: Arc<Plans<T>>,
}

impl<T: Scalar> PartialEq for Grid<T> {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.extent == other.extent && self.points == other.points
    }
}

impl<T: Scalar> fmt::Debug for Grid<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("dim", &self.dim)
            .field("extent", &self.extent)
            .field("points", &self.points)
            .finish()
    }
}

impl<T: Scalar> Grid<T> {
    pub fn new(dim: usize, extent: T, points: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidGrid("dimension must be at least 1".into()));
        }
        if !(extent > T::zero()) || !extent.is_finite() {
            return Err(Error::InvalidGrid(format!("extent must be positive, got {extent}")));
        }
        if points < MIN_POINTS {
            return Err(Error::InvalidGrid(format!(
                "need at least {MIN_POINTS} points per axis, got {points}"
            )));
        }
        points
            .checked_pow(dim as u32)
            .ok_or_else(|| Error::InvalidGrid("total number of points overflows".into()))?;
        let mut planner = FftPlanner::new();
        let plans = Plans {
            forward: planner.plan_fft_forward(points),
            inverse: planner.plan_fft_inverse(points),
        };
        Ok(Self {
            dim,
            extent,
            points,
            plans: Arc::new(plans),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn extent(&self) -> T {
        self.extent
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn spacing(&self) -> T {
        self.extent / T::of_usize(self.points)
    }

    /// `h^d`, the quadrature weight of one cell.
    pub fn cell_volume(&self) -> T {
        self.spacing().powi(self.dim as i32)
    }

    /// Total number of lattice sites `N^d`.
    pub fn len(&self) -> usize {
        self.points.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn ensure_same(&self, other: &Self) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!("{self:?} vs {other:?}")))
        }
    }

    /// Per-axis integer coordinates of a flat index.
    pub fn coords(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.dim];
        for axis in (0..self.dim).rev() {
            out[axis] = index % self.points;
            index /= self.points;
        }
        out
    }

    pub fn index(&self, coords: &[usize]) -> usize {
        coords
            .iter()
            .fold(0, |acc, &c| acc * self.points + (c % self.points))
    }

    /// Lattice site reached from `index` after the periodic shift encoded by `offset`.
    pub fn shift(&self, index: usize, offset: usize) -> usize {
        if self.dim == 1 {
            return (index + offset) % self.points;
        }
        let a = self.coords(index);
        let b = self.coords(offset);
        let c: Vec<usize> = a.iter().zip(&b).map(|(x, y)| (x + y) % self.points).collect();
        self.index(&c)
    }

    /// Site `-offset (mod N)` per axis.
    pub fn reflect(&self, offset: usize) -> usize {
        let c: Vec<usize> = self
            .coords(offset)
            .into_iter()
            .map(|x| (self.points - x) % self.points)
            .collect();
        self.index(&c)
    }

    /// Signed integer offset along one axis, in `(-N/2, N/2]`.
    fn signed(&self, c: usize) -> i64 {
        let n = self.points as i64;
        let c = c as i64;
        if c > n / 2 {
            c - n
        } else {
            c
        }
    }

    /// Position `i h` of a lattice site, per axis, in `[0, L)`.
    pub fn position(&self, index: usize) -> Vec<T> {
        let h = self.spacing();
        self.coords(index)
            .into_iter()
            .map(|c| T::of_usize(c) * h)
            .collect()
    }

    /// Minimal-image displacement of a lattice site from the origin.
    pub fn displacement(&self, index: usize) -> Vec<T> {
        let h = self.spacing();
        self.coords(index)
            .into_iter()
            .map(|c| T::of(self.signed(c) as f64) * h)
            .collect()
    }

    /// Angular wave vector `2 pi k / L` of a Fourier mode.
    pub fn wavevector(&self, mode: usize) -> Vec<T> {
        let scale = T::TAU() / self.extent;
        self.coords(mode)
            .into_iter()
            .map(|c| T::of(self.signed(c) as f64) * scale)
            .collect()
    }

    pub fn wavenumber_norm(&self, mode: usize) -> T {
        self.wavevector(mode)
            .into_iter()
            .fold(T::zero(), |acc, x| acc + x * x)
            .sqrt()
    }

    /// Unnormalized forward DFT over all axes.
    pub fn forward(&self, values: &[T]) -> Vec<Complex<T>> {
        debug_assert_eq!(values.len(), self.len());
        let mut data: Vec<Complex<T>> = values.iter().map(|&v| Complex::new(v, T::zero())).collect();
        self.transform(&mut data, self.plans.forward.as_ref());
        data
    }

    /// Inverse DFT including the `1 / N^d` factor; the imaginary part is dropped.
    pub fn inverse_real(&self, mut spectrum: Vec<Complex<T>>) -> Vec<T> {
        debug_assert_eq!(spectrum.len(), self.len());
        self.transform(&mut spectrum, self.plans.inverse.as_ref());
        let norm = T::one() / T::of_usize(self.len());
        spectrum.into_iter().map(|c| c.re * norm).collect()
    }

    fn transform(&self, data: &mut [Complex<T>], fft: &dyn Fft<T>) {
        let n = self.points;
        let mut scratch = vec![Complex::zero(); fft.get_inplace_scratch_len()];
        if self.dim == 1 {
            fft.process_with_scratch(data, &mut scratch);
            return;
        }
        let len = data.len();
        let mut line = vec![Complex::zero(); n];
        let mut stride = 1;
        for _ in 0..self.dim {
            let block = stride * n;
            for outer in (0..len).step_by(block) {
                for inner in 0..stride {
                    let base = outer + inner;
                    for (j, slot) in line.iter_mut().enumerate() {
                        *slot = data[base + j * stride];
                    }
                    fft.process_with_scratch(&mut line, &mut scratch);
                    for (j, value) in line.iter().enumerate() {
                        data[base + j * stride] = *value;
                    }
                }
            }
            stride *= n;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_grids() {
        assert!(Grid::<f64>::new(0, 1.0, 8).is_err());
        assert!(Grid::<f64>::new(1, 0.0, 8).is_err());
        assert!(Grid::<f64>::new(1, 1.0, 3).is_err());
    }

    #[test]
    fn spacing_times_points_is_extent() {
        let g = Grid::<f64>::new(2, 20.0, 64).unwrap();
        assert_eq!(g.spacing() * 64.0, 20.0);
        assert_eq!(g.len(), 4096);
    }

    #[test]
    fn coords_roundtrip_and_shift() {
        let g = Grid::<f64>::new(2, 1.0, 5).unwrap();
        for i in 0..g.len() {
            assert_eq!(g.index(&g.coords(i)), i);
        }
        let a = g.index(&[4, 1]);
        let b = g.index(&[2, 4]);
        assert_eq!(g.coords(g.shift(a, b)), vec![1, 0]);
        assert_eq!(g.shift(g.reflect(b), b), 0);
    }

    #[test]
    fn fft_roundtrip_2d() {
        let g = Grid::<f64>::new(2, 1.0, 6).unwrap();
        let v: Vec<f64> = (0..g.len()).map(|i| (i as f64 * 0.37).sin()).collect();
        let back = g.inverse_real(g.forward(&v));
        for (a, b) in v.iter().zip(&back) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn wavevector_signs() {
        let g = Grid::<f64>::new(1, 8.0, 8).unwrap();
        let tau = std::f64::consts::TAU;
        assert_eq!(g.wavevector(1)[0], tau / 8.0);
        assert_eq!(g.wavevector(7)[0], -tau / 8.0);
        assert_eq!(g.wavevector(4)[0], 4.0 * tau / 8.0);
    }
}
