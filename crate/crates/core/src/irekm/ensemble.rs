use super::pairwise_sum;
use crate::error::{Error, Result};
use crate::forward::TemporalSignal;
use crate::fraccalc::TimeGrid;

#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    particles: Vec<TemporalSignal>,
    iteration: usize,
}

impl Ensemble {
    pub fn new(particles: Vec<TemporalSignal>) -> Result<Self> {
        Self::at_iteration(particles, 0)
    }

    pub fn at_iteration(particles: Vec<TemporalSignal>, iteration: usize) -> Result<Self> {
        let first = particles.first().ok_or_else(|| Error::param("ensemble cannot be empty"))?;
        let (grid, k) = (*first.grid(), first.components());
        if particles.iter().any(|p| p.grid() != &grid || p.components() != k) {
            return Err(Error::input("ensemble particles must share one grid and component count"));
        }
        Ok(Self { particles, iteration })
    }

    pub fn len(&self) -> usize {
        self.particles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.particles.is_empty()
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    pub fn particles(&self) -> &[TemporalSignal] {
        &self.particles
    }

    pub fn particle(&self, j: usize) -> &TemporalSignal {
        &self.particles[j]
    }

    pub fn grid(&self) -> &TimeGrid {
        self.particles[0].grid()
    }

    pub fn components(&self) -> usize {
        self.particles[0].components()
    }

    /// Componentwise arithmetic mean.
    pub fn mean(&self) -> TemporalSignal {
        let flat: Vec<Vec<f64>> = self.particles.iter().map(|p| p.flat()).collect();
        let mean = mean_of(&flat);
        TemporalSignal::from_flat(*self.grid(), self.components(), &mean).expect("layout preserved")
    }
}

/// Entrywise mean of equal-length vectors with a fixed reduction order.
pub(crate) fn mean_of(rows: &[Vec<f64>]) -> Vec<f64> {
    let n = rows.len() as f64;
    let len = rows[0].len();
    let mut col = vec![0.0; rows.len()];
    (0..len)
        .map(|i| {
            for (c, r) in col.iter_mut().zip(rows) {
                *c = r[i];
            }
            pairwise_sum(&col) / n
        })
        .collect()
}
