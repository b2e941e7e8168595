//! Periodic lattice, fields, kernels and the spectral jump generator.

mod field;
mod grid;
mod kernel;
mod ops;

pub use field::Field;
pub use grid::{Grid, MIN_POINTS};
pub use kernel::{build_kernel, combined_kernel, Kernel, KernelProfile, SignedKernel};
pub use ops::{apply_generator, convolve, semigroup_apply, SpectralMultiplier};
