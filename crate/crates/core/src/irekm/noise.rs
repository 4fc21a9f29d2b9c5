use crate::error::{Error, Result};

/// Observation noise with covariance σ²I.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    sigma: f64,
}

impl NoiseModel {
    pub fn new(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::param(format!("noise level must be positive, got {sigma}")));
        }
        Ok(Self { sigma })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn variance(&self) -> f64 {
        self.sigma * self.sigma
    }

    /// |C^{-1/2} v|.
    pub fn weighted_norm(&self, v: &[f64]) -> f64 {
        v.iter().map(|x| (x / self.sigma).powi(2)).sum::<f64>().sqrt()
    }
}
