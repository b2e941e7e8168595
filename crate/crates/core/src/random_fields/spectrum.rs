use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Grid, SignedKernel};
use crate::params::ModelParams;
use crate::scalar::Scalar;

/// Weight given to the `lambda = 0` mode, where `a / |lambda|^alpha` is undefined.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", content = "value", rename_all = "snake_case")]
pub enum ZeroMode<T> {
    /// Same density as the smallest nonzero wave number.
    #[default]
    SmallestMode,
    Zero,
    /// Density `value` (so the weight is `value / L^d`).
    Value(T),
}

/// Spectral density `B^(lambda) = a / |lambda|^alpha` on the resolved modes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumProfile<T> {
    pub alpha: T,
    pub amplitude: T,
    #[serde(default)]
    pub regularization: ZeroMode<T>,
    /// Modes with `|lambda|` above this get no weight.
    #[serde(default)]
    pub cutoff: Option<T>,
    /// Modes with `|lambda|` below this get no weight (zero mode included).
    #[serde(default)]
    pub low_cutoff: Option<T>,
}

impl<T: Scalar> SpectrumProfile<T> {
    pub fn new(alpha: T, amplitude: T) -> Self {
        Self {
            alpha,
            amplitude,
            regularization: ZeroMode::SmallestMode,
            cutoff: None,
            low_cutoff: None,
        }
    }

    fn density(&self, k: T) -> T {
        self.amplitude / k.powf(self.alpha)
    }

    /// Discrete weights `w_k = B^(lambda_k) / L^d`, so that `Var xi = sum_k w_k`.
    pub fn weights(&self, grid: &Grid<T>) -> Result<SpectralWeights<T>> {
        let d = T::of_usize(grid.dim());
        if !(self.alpha > T::zero() && self.alpha <= d) {
            return Err(Error::Config(format!(
                "spectral exponent alpha must lie in (0, {d}], got {}",
                self.alpha
            )));
        }
        if !(self.amplitude > T::zero()) {
            return Err(Error::Config(format!(
                "spectral amplitude must be positive, got {}",
                self.amplitude
            )));
        }
        let volume = grid.extent().powi(grid.dim() as i32);
        let smallest = T::TAU() / grid.extent();
        let zero = match self.regularization {
            ZeroMode::SmallestMode => self.density(smallest),
            ZeroMode::Zero => T::zero(),
            ZeroMode::Value(v) => v,
        };
        let values = (0..grid.len())
            .map(|mode| {
                let k = grid.wavenumber_norm(mode);
                let inside = self.cutoff.is_none_or(|c| k <= c) && self.low_cutoff.is_none_or(|c| k >= c);
                if !inside {
                    T::zero()
                } else if mode == 0 {
                    zero / volume
                } else {
                    self.density(k) / volume
                }
            })
            .collect();
        SpectralWeights::new(grid, values)
    }
}

/// Per-mode variances of a homogeneous Gaussian field on the lattice, in FFT order.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralWeights<T: Scalar> {
    grid: Grid<T>,
    values: Vec<T>,
}

impl<T: Scalar> SpectralWeights<T> {
    /// Weights must be finite, non-negative and even (`w_k = w_{-k}`).
    pub fn new(grid: &Grid<T>, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} spectral weights for {} modes",
                values.len(),
                grid.len()
            )));
        }
        if let Some(k) = values.iter().position(|w| !(*w >= T::zero()) || !w.is_finite()) {
            return Err(Error::Config(format!(
                "spectral weight at mode {k} is {} (must be finite and non-negative)",
                values[k]
            )));
        }
        for (k, &w) in values.iter().enumerate() {
            let mirror = values[grid.reflect(k)];
            if (w - mirror).abs() > T::of(1e-12) * (w.abs() + mirror.abs()) {
                return Err(Error::Config(format!("spectral weights are not even at mode {k}")));
            }
        }
        Ok(Self {
            grid: grid.clone(),
            values,
        })
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Pointwise variance `B(0)`.
    pub fn variance(&self) -> T {
        self.values.iter().copied().sum()
    }

    /// Covariance `B(x_index) = sum_k w_k cos(lambda_k . x)`, by direct summation.
    pub fn covariance(&self, index: usize) -> T {
        let x = self.grid.displacement(index);
        self.values
            .iter()
            .enumerate()
            .map(|(k, &w)| {
                let phase = self
                    .grid
                    .wavevector(k)
                    .iter()
                    .zip(&x)
                    .fold(T::zero(), |a, (l, y)| a + *l * *y);
                w * phase.cos()
            })
            .sum()
    }
}

/// Normalized jump symbol `J^(lambda) / m = 1 - b |lambda|^beta_spec + o(|lambda|^beta_spec)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JumpSymbolProfile<T> {
    pub b: T,
    pub beta_spec: T,
}

/// Radial description of the normalized lattice symbol of `J_theta`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SymbolScan<T> {
    /// Largest `|lambda|` up to which the symbol decreases strictly along the modes.
    pub monotone_radius: T,
    /// Largest radius inside the monotone range with `1 - J^ >= (b / 2) |lambda|^beta_spec`.
    pub split_radius: T,
    /// `sup_{|lambda| > split_radius} J^(lambda)`, or `None` when no mode lies beyond.
    pub sup_beyond: Option<T>,
}

impl<T: Scalar> JumpSymbolProfile<T> {
    pub fn new(b: T, beta_spec: T) -> Result<Self> {
        if !(b > T::zero()) || !(beta_spec > T::zero() && beta_spec <= T::of(2.0)) {
            return Err(Error::Config(format!(
                "jump symbol needs b > 0 and beta_spec in (0, 2], got b = {b}, beta_spec = {beta_spec}"
            )));
        }
        Ok(Self { b, beta_spec })
    }

    /// Scans the normalized symbol of `j_theta` by wave number.
    pub fn scan(&self, j_theta: &SignedKernel<T>, params: &ModelParams<T>) -> Result<SymbolScan<T>> {
        let grid = j_theta.grid();
        let m = params.mortality();
        let mut modes: Vec<(T, T)> = (0..grid.len())
            .map(|k| (grid.wavenumber_norm(k), j_theta.symbol()[k].re / m))
            .collect();
        modes.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite wave numbers"));
        // highest symbol value per distinct radius
        let mut radial: Vec<(T, T)> = Vec::new();
        for (k, v) in modes {
            match radial.last_mut() {
                Some(last) if (last.0 - k).abs() <= T::of(1e-12) * (T::one() + k) => last.1 = last.1.max(v),
                _ => radial.push((k, v)),
            }
        }
        let mut monotone = 0;
        while monotone + 1 < radial.len() && radial[monotone + 1].1 < radial[monotone].1 {
            monotone += 1;
        }
        if monotone == 0 {
            return Err(Error::AssumptionViolated(
                "normalized symbol is not decreasing near the origin".into(),
            ));
        }
        let half_b = self.b * T::of(0.5);
        let mut split = 0;
        while split < monotone && T::one() - radial[split + 1].1 >= half_b * radial[split + 1].0.powf(self.beta_spec) {
            split += 1;
        }
        if split == 0 {
            return Err(Error::AssumptionViolated(format!(
                "symbol does not satisfy 1 - J^ >= (b/2)|lambda|^{} on the first mode",
                self.beta_spec
            )));
        }
        let sup_beyond = radial[split + 1..].iter().map(|r| r.1).reduce(T::max);
        Ok(SymbolScan {
            monotone_radius: radial[monotone].0,
            split_radius: radial[split].0,
            sup_beyond,
        })
    }
}
