use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform grid t_j = j·T/Nt, j = 0..Nt, on [0, T].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    horizon: f64,
    steps: usize,
}

impl TimeGrid {
    pub fn new(horizon: f64, steps: usize) -> Result<Self> {
        if !(horizon > 0.0) || !horizon.is_finite() {
            return Err(Error::param(format!("time horizon must be positive, got {horizon}")));
        }
        if steps < 2 {
            return Err(Error::param(format!("time grid needs at least 2 steps, got {steps}")));
        }
        Ok(Self { horizon, steps })
    }

    /// Grid on [0, T] with step closest to `dt`.
    pub fn with_step(horizon: f64, dt: f64) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(Error::param(format!("time step must be positive, got {dt}")));
        }
        Self::new(horizon, (horizon / dt).round() as usize)
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// Nt.
    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn len(&self) -> usize {
        self.steps + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dt(&self) -> f64 {
        self.horizon / self.steps as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        if j == self.steps {
            self.horizon
        } else {
            j as f64 * self.horizon / self.steps as f64
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.steps).map(|j| self.node(j)).collect()
    }

    /// Grid refined by an integer factor.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        if factor == 0 {
            return Err(Error::param("refinement factor must be positive"));
        }
        Self::new(self.horizon, self.steps * factor)
    }
}

/// Values of a scalar function at every node of a [`TimeGrid`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    grid: TimeGrid,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: TimeGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::input(format!(
                "grid function has {} values, grid has {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if let Some(j) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::input(format!("grid function value at node {j} is not finite")));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: TimeGrid, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(grid, grid.nodes().into_iter().map(f).collect())
    }

    pub fn zeros(grid: TimeGrid) -> Self {
        Self { grid, values: vec![0.0; grid.len()] }
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub(crate) fn from_parts_unchecked(grid: TimeGrid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }
}
