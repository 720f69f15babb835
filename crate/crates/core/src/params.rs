//! Physical rates of the master equation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The four rates: diffusion `gamma_p`, dephasing `gamma_z`, coin coupling
/// `delta` and driving amplitude `omega`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub gamma_p: f64,
    pub gamma_z: f64,
    pub delta: f64,
    pub omega: f64,
}

impl Params {
    /// Builds and validates a parameter set.
    pub fn new(gamma_p: f64, gamma_z: f64, delta: f64, omega: f64) -> Result<Self> {
        Params {
            gamma_p,
            gamma_z,
            delta,
            omega,
        }
        .validate()
    }

    /// Returns `self` unchanged if every rate is admissible.
    pub fn validate(self) -> Result<Self> {
        let named = [
            ("gamma_p", self.gamma_p),
            ("gamma_z", self.gamma_z),
            ("delta", self.delta),
            ("omega", self.omega),
        ];
        for (name, value) in named {
            if !value.is_finite() {
                return Err(Error::NonFinite { name, value });
            }
        }
        if self.gamma_p <= 0.0 {
            return Err(Error::NonPositiveDiffusion(self.gamma_p));
        }
        for (name, value) in &named[1..] {
            if *value < 0.0 {
                return Err(Error::NegativeRate {
                    name,
                    value: *value,
                });
            }
        }
        Ok(self)
    }

    /// Standard deviation of the heat kernel at time `t`, `sqrt(4 gamma_p t)`.
    pub fn diffusion_width(&self, t: f64) -> f64 {
        (4.0 * self.gamma_p * t).sqrt()
    }

    /// Half-width of the light cone `2 delta t`.
    pub fn drift(&self, t: f64) -> f64 {
        2.0 * self.delta * t
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn figure_one_rates_are_valid() {
        let p = Params::new(1e-3, 1e-3, 1e-2, 0.0).unwrap();
        assert_eq!(p.omega, 0.0);
    }

    #[test]
    fn zero_diffusion_is_rejected() {
        assert_eq!(
            Params::new(0.0, 1e-3, 1e-2, 0.0),
            Err(Error::NonPositiveDiffusion(0.0))
        );
    }

    #[test]
    fn nan_is_rejected() {
        assert!(matches!(
            Params::new(f64::NAN, 1e-3, 1e-2, 0.0),
            Err(Error::NonFinite {
                name: "gamma_p",
                ..
            })
        ));
        assert!(matches!(
            Params::new(1.0, 1.0, f64::INFINITY, 0.0),
            Err(Error::NonFinite { name: "delta", .. })
        ));
    }

    #[test]
    fn negative_rate_is_rejected() {
        assert!(matches!(
            Params::new(1.0, -1.0, 0.0, 0.0),
            Err(Error::NegativeRate {
                name: "gamma_z",
                ..
            })
        ));
    }
}
