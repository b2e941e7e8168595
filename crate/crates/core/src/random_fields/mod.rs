//! Homogeneous Gaussian initial perturbations and the second moment of the
//! linearized mode `k_1` they generate.

mod exponent;
mod moments;
mod spectrum;

pub use exponent::{decay_exponent_fit, ExponentOutcome, ExponentReport, RawBound};
pub use moments::{mc_second_moment, sample_field, second_moment_spectral, MomentEstimate};
pub use spectrum::{JumpSymbolProfile, SpectralWeights, SpectrumProfile, SymbolScan, ZeroMode};

/// Geometric time grid `t_min (t_max / t_min)^{j / (n - 1)}`, `j = 0..n`.
pub fn geometric_times<T: crate::Scalar>(t_min: T, t_max: T, n: usize) -> Vec<T> {
    let ratio = t_max / t_min;
    (0..n)
        .map(|j| t_min * ratio.powf(T::of_usize(j) / T::of_usize(n.max(2) - 1)))
        .collect()
}
