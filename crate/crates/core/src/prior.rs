//! Product Gaussian prior over temporal signals.
//!
//! Each component is N(m_k, M_k A^{-s_k}) with A = -d²/dt² on (0, T) under
//! Dirichlet conditions, so draws are Karhunen–Loève sums
//!
//!   ρ_k(t) = m_k(t) + √M_k Σ_n λ_n^{-s_k/2} ξ_n e_n(t),
//!   λ_n = (nπ/T)²,  e_n(t) = √(2/T) sin(nπt/T).

use crate::error::{Error, Result};
use crate::forward::{Expr, TemporalSignal};
use crate::fraccalc::TimeGrid;
use crate::irekm::Ensemble;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq)]
pub struct ComponentPrior {
    pub mean: Expr,
    pub amplitude: f64,
    pub smoothness: f64,
    /// KL truncation; `None` keeps every mode the grid resolves.
    pub modes: Option<usize>,
}

impl ComponentPrior {
    pub fn new(mean: Expr, amplitude: f64, smoothness: f64) -> Result<Self> {
        let p = Self { mean, amplitude, smoothness, modes: None };
        p.validate()?;
        Ok(p)
    }

    pub fn with_modes(mut self, modes: usize) -> Result<Self> {
        self.modes = Some(modes);
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        if !(self.amplitude > 0.0 && self.amplitude.is_finite()) {
            return Err(Error::param(format!("prior amplitude must be positive, got {}", self.amplitude)));
        }
        if !(self.smoothness > 0.5 && self.smoothness.is_finite()) {
            return Err(Error::param(format!("prior smoothness must exceed 1/2, got {}", self.smoothness)));
        }
        if self.modes == Some(0) {
            return Err(Error::param("KL mode count must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PriorSpec {
    components: Vec<ComponentPrior>,
    grid: TimeGrid,
}

impl PriorSpec {
    pub fn new(components: Vec<ComponentPrior>, grid: TimeGrid) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::param("prior needs at least one component"));
        }
        for c in &components {
            c.validate()?;
        }
        Ok(Self { components, grid })
    }

    /// Same prior for every component.
    pub fn uniform(means: Vec<Expr>, amplitude: f64, smoothness: f64, grid: TimeGrid) -> Result<Self> {
        let comps = means
            .into_iter()
            .map(|m| ComponentPrior::new(m, amplitude, smoothness))
            .collect::<Result<Vec<_>>>()?;
        Self::new(comps, grid)
    }

    pub fn components(&self) -> usize {
        self.components.len()
    }

    pub fn component(&self, k: usize) -> &ComponentPrior {
        &self.components[k]
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn modes(&self, k: usize) -> usize {
        self.components[k].modes.unwrap_or_else(|| self.grid.steps().saturating_sub(1).max(1))
    }

    /// λ_n = (nπ/T)², n ≥ 1.
    pub fn eigenvalue(&self, n: usize) -> f64 {
        let w = n as f64 * PI / self.grid.horizon();
        w * w
    }

    /// Standard deviation √M_k λ_n^{-s_k/2} of the n-th KL coefficient.
    pub fn coefficient_scale(&self, k: usize, n: usize) -> f64 {
        let c = &self.components[k];
        c.amplitude.sqrt() * self.eigenvalue(n).powf(-0.5 * c.smoothness)
    }

    /// e_n at every grid node. Values at t = 0 and t = T are exactly zero.
    pub fn eigenfunction(&self, n: usize) -> Vec<f64> {
        let table = self.sine_table();
        self.eigenfunction_from(&table, n)
    }

    /// √(2/T) sin(πr/Nt) for r < 2Nt, exact zeros at r = 0 and r = Nt.
    fn sine_table(&self) -> Vec<f64> {
        let nt = self.grid.steps();
        let norm = (2.0 / self.grid.horizon()).sqrt();
        (0..2 * nt).map(|r| if r == 0 || r == nt { 0.0 } else { norm * (PI * r as f64 / nt as f64).sin() }).collect()
    }

    fn eigenfunction_from(&self, table: &[f64], n: usize) -> Vec<f64> {
        let nt = self.grid.steps();
        (0..=nt).map(|j| table[(n * j) % (2 * nt)]).collect()
    }

    pub fn mean_signal(&self) -> TemporalSignal {
        let nodes = self.grid.nodes();
        let vals = self.components.iter().map(|c| nodes.iter().map(|&t| c.mean.at_t(t)).collect()).collect();
        TemporalSignal::new(self.grid, vals).expect("mean signal has grid length")
    }

    /// Mean plus the KL sum for the given standard-normal coefficients,
    /// `xi[k][n-1]` multiplying mode n of component k.
    pub fn synthesize(&self, xi: &[Vec<f64>]) -> Result<TemporalSignal> {
        if xi.len() != self.components() {
            return Err(Error::input(format!("expected {} coefficient rows, got {}", self.components(), xi.len())));
        }
        let table = self.sine_table();
        let mut vals = self.mean_signal().values().to_vec();
        for (k, row) in xi.iter().enumerate() {
            if row.len() != self.modes(k) {
                return Err(Error::input(format!(
                    "component {k}: expected {} coefficients, got {}",
                    self.modes(k),
                    row.len()
                )));
            }
            for (idx, &z) in row.iter().enumerate() {
                if z == 0.0 {
                    continue;
                }
                let n = idx + 1;
                let a = self.coefficient_scale(k, n) * z;
                for (v, e) in vals[k].iter_mut().zip(self.eigenfunction_from(&table, n)) {
                    *v += a * e;
                }
            }
        }
        TemporalSignal::new(self.grid, vals)
    }

    /// Discrete coefficients ⟨f - m_k, e_n⟩ / (√M_k λ_n^{-s_k/2}) under the
    /// trapezoidal inner product, in which the sampled sines are orthonormal.
    pub fn project(&self, signal: &TemporalSignal) -> Result<Vec<Vec<f64>>> {
        if signal.components() != self.components() || signal.grid() != &self.grid {
            return Err(Error::input("signal does not match the prior layout"));
        }
        let table = self.sine_table();
        let mean = self.mean_signal();
        let dt = self.grid.dt();
        Ok((0..self.components())
            .map(|k| {
                let diff: Vec<f64> = signal.component(k).iter().zip(mean.component(k)).map(|(a, b)| a - b).collect();
                (1..=self.modes(k))
                    .map(|n| {
                        // endpoint terms vanish with e_n
                        let ip: f64 = diff.iter().zip(self.eigenfunction_from(&table, n)).map(|(d, e)| d * e).sum::<f64>() * dt;
                        ip / self.coefficient_scale(k, n)
                    })
                    .collect()
            })
            .collect())
    }
}

/// Seeded source of KL coefficients.
///
/// Particle p reads ChaCha stream p of the seed; component k starts at a
/// fixed word offset inside that stream, so a coefficient depends only on
/// (seed, particle, component, mode) and not on the order of generation.
#[derive(Debug, Clone)]
pub struct KlStream {
    seed: u64,
    particle: u64,
}

const COMPONENT_WORDS: u128 = 1 << 40;

impl KlStream {
    pub fn new(seed: u64, particle: u64) -> Self {
        Self { seed, particle }
    }

    pub fn coefficients(&self, component: usize, modes: usize) -> Vec<f64> {
        let mut rng = ChaCha12Rng::seed_from_u64(self.seed);
        rng.set_stream(self.particle);
        rng.set_word_pos(component as u128 * COMPONENT_WORDS);
        (0..modes).map(|_| StandardNormal.sample(&mut rng)).collect()
    }
}

/// One prior draw; coefficients are read component-major, mode-minor.
pub fn kl_sample(prior: &PriorSpec, stream: &KlStream) -> TemporalSignal {
    let xi: Vec<Vec<f64>> = (0..prior.components()).map(|k| stream.coefficients(k, prior.modes(k))).collect();
    prior.synthesize(&xi).expect("coefficient layout follows the prior")
}

pub fn initial_ensemble(prior: &PriorSpec, size: usize, seed: u64) -> Result<Ensemble> {
    if size < 2 {
        return Err(Error::param(format!("ensemble size must be at least 2, got {size}")));
    }
    let particles: Vec<TemporalSignal> =
        (0..size).into_par_iter().map(|p| kl_sample(prior, &KlStream::new(seed, p as u64))).collect();
    Ensemble::new(particles)
}
