//! Nonlocal semilinear parabolic equations driven by pure-jump generators on a
//! periodic lattice: spectral solvers, Feynman-Kac Monte Carlo estimators,
//! stability certificates for the spatial logistic equation and random-field
//! second-moment decay.
//!
//! Everything numerical is generic over [`Scalar`] (`f32` or `f64`); the
//! `*64` aliases below fix the scalar to `f64`.

// `!(x > 0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod binomial;
pub mod error;
pub mod feynman_kac;
pub mod io;
pub mod jump;
pub mod lattice;
pub mod params;
pub mod random_fields;
pub mod scalar;
pub mod seed;
pub mod series;
pub mod solver;
pub mod stability;

pub use error::{Error, Result};
pub use jump::{JumpPath, JumpSampler};
pub use lattice::{Field, Grid, Kernel, KernelProfile, SignedKernel};
pub use params::ModelParams;
pub use scalar::Scalar;
pub use seed::SeedSpec;
pub use series::{FieldSeries, NormRecord};

pub type Grid64 = Grid<f64>;
pub type Field64 = Field<f64>;
pub type Kernel64 = Kernel<f64>;
pub type SignedKernel64 = SignedKernel<f64>;
pub type FieldSeries64 = FieldSeries<f64>;
pub type ModelParams64 = ModelParams<f64>;
pub type JumpPath64 = JumpPath<f64>;
pub type SolverRun64 = solver::SolverRun<f64>;
pub type TaylorHierarchy64 = solver::TaylorHierarchy<f64>;
pub type FkEstimate64 = feynman_kac::FkEstimate<f64>;
pub type DecayEnvelope64 = stability::DecayEnvelope<f64>;
pub type SpectralWeights64 = random_fields::SpectralWeights<f64>;
