use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform grid on [0, 1] with Nx steps; unknowns live on the interior
/// nodes x_i = i/Nx, i = 1..Nx-1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceGrid {
    steps: usize,
}

impl SpaceGrid {
    pub fn new(steps: usize) -> Result<Self> {
        if steps < 4 {
            return Err(Error::param(format!("space grid needs at least 3 interior nodes, got Nx = {steps}")));
        }
        Ok(Self { steps })
    }

    pub fn with_step(dx: f64) -> Result<Self> {
        if !(dx > 0.0 && dx < 1.0) {
            return Err(Error::param(format!("space step must lie in (0, 1), got {dx}")));
        }
        Self::new((1.0 / dx).round() as usize)
    }

    /// Nx.
    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn interior_count(&self) -> usize {
        self.steps - 1
    }

    pub fn dx(&self) -> f64 {
        1.0 / self.steps as f64
    }

    /// x_i for i = 0..=Nx.
    pub fn node(&self, i: usize) -> f64 {
        i as f64 / self.steps as f64
    }

    pub fn interior_nodes(&self) -> Vec<f64> {
        (1..self.steps).map(|i| self.node(i)).collect()
    }

    pub fn refined(&self, factor: usize) -> Result<Self> {
        if factor == 0 {
            return Err(Error::param("refinement factor must be positive"));
        }
        Self::new(self.steps * factor)
    }

    /// Index (1..Nx-1) of the interior node within Δx/2 of `x0`.
    pub fn locate(&self, x0: f64) -> Result<usize> {
        if !(x0 > 0.0 && x0 < 1.0) {
            return Err(Error::param(format!("observation point must lie in (0, 1), got {x0}")));
        }
        let i = (x0 * self.steps as f64).round() as usize;
        let dist = (self.node(i) - x0).abs();
        if i == 0 || i >= self.steps || dist > 0.5 * self.dx() * (1.0 + 1e-12) {
            return Err(Error::param(format!(
                "observation point {x0} is not within dx/2 of an interior node (dx = {})",
                self.dx()
            )));
        }
        Ok(i)
    }
}
