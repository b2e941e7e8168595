use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::SignedKernel;
use crate::scalar::Scalar;

/// Rates of the spatial logistic model: birth `kappa_plus`, competition
/// `kappa_minus` and mortality `m`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams<T> {
    kappa_plus: T,
    kappa_minus: T,
    mortality: T,
}

impl<T: Scalar> ModelParams<T> {
    pub fn new(kappa_plus: T, kappa_minus: T, mortality: T) -> Result<Self> {
        if !(kappa_plus > T::zero()) {
            return Err(Error::Domain(format!("kappa_plus must be positive, got {kappa_plus}")));
        }
        if !(kappa_minus > T::zero()) {
            return Err(Error::Domain(format!("kappa_minus must be positive, got {kappa_minus}")));
        }
        if !(mortality > T::zero() && mortality < kappa_plus) {
            return Err(Error::Domain(format!(
                "mortality must lie in (0, kappa_plus = {kappa_plus}), got {mortality}"
            )));
        }
        Ok(Self {
            kappa_plus,
            kappa_minus,
            mortality,
        })
    }

    pub fn kappa_plus(&self) -> T {
        self.kappa_plus
    }

    pub fn kappa_minus(&self) -> T {
        self.kappa_minus
    }

    pub fn mortality(&self) -> T {
        self.mortality
    }

    /// Positive stationary density `(kappa_plus - m) / kappa_minus`.
    pub fn theta(&self) -> T {
        self.beta() / self.kappa_minus
    }

    /// Net growth rate `kappa_plus - m`.
    pub fn beta(&self) -> T {
        self.kappa_plus - self.mortality
    }

    /// `kappa_plus - ||J_theta||_1`; equals `beta` whenever `J_theta >= 0`.
    pub fn gamma(&self, j_theta: &SignedKernel<T>) -> T {
        self.kappa_plus - j_theta.l1_mass()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_constants() {
        let p = ModelParams::new(3.0, 2.0, 1.0).unwrap();
        assert_eq!(p.beta(), 2.0);
        assert_eq!(p.theta(), 1.0);
    }

    #[test]
    fn validation() {
        assert!(ModelParams::new(0.0, 1.0, 0.5).is_err());
        assert!(ModelParams::new(1.0, -1.0, 0.5).is_err());
        assert!(ModelParams::new(1.0, 1.0, 1.0).is_err());
        assert!(ModelParams::new(1.0, 1.0, 0.0).is_err());
    }
}
