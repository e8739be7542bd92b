use serde::Serialize;

use crate::error::{domain, Result};

/// Damping coefficients of the string: Kelvin-Voigt `sigma > 0` and viscous
/// `mu >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DampingParams {
    sigma: f64,
    mu: f64,
}

impl DampingParams {
    pub fn new(sigma: f64, mu: f64) -> Result<Self> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return domain(format!("sigma must be finite and positive, got {sigma}"));
        }
        if !(mu.is_finite() && mu >= 0.0) {
            return domain(format!("mu must be finite and nonnegative, got {mu}"));
        }
        Ok(Self { sigma, mu })
    }

    #[inline]
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    #[inline]
    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// `mu * sigma`; the value 1 separates the two branches of the L2 upper
    /// bound.
    #[inline]
    pub fn mu_sigma(&self) -> f64 {
        self.mu * self.sigma
    }

    /// Sufficient condition `2 < 2 mu sigma + sigma^2 pi^2` under which a
    /// finite sup-norm gain is known to exist.
    pub fn sup_gain_certified(&self) -> bool {
        2.0 * self.mu * self.sigma + self.sigma * self.sigma * std::f64::consts::PI.powi(2) > 2.0
    }
}
