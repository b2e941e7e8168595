//! Feynman-Kac estimators over jump-process paths and the Duhamel series used
//! to check them.

mod duhamel;
mod ensemble;
mod logistic;
mod nonlinear;

pub use duhamel::{duhamel_series, DuhamelSeries};
pub use ensemble::{fk_linear_estimate, FkEstimate, PathEnsemble, MIN_PATHS};
pub use logistic::{fk_logistic_identity_check, IdentityCheck};
pub use nonlinear::{fk_nonlinear_fixed_point, BlockReport, FixedPointOptions, FixedPointSolution};

pub(crate) use duhamel::step_count;
pub(crate) use ensemble::mean_stderr;
