//! Stability certificates for the logistic equation: block decay envelopes,
//! fitted decay rates, the `C_n` recursion with its generating function, and
//! the bounds built from them.

mod decay;
mod envelope;
mod generating;

pub use decay::{log_decay_fit, logistic_decay_rate, DecayFit, DecayOutcome, NORM_FLOOR};
pub use envelope::{
    decay_envelope, envelope_check, logistic_rate, DecayEnvelope, EnvelopeCheck, EnvelopeRow,
};
pub use generating::{
    cn_coefficients, generating_function, generating_radius, k1_decay_check, taylor_bound_check,
    BoundCheck,
};
