//! Synthetic observations with seeded Gaussian noise.

use crate::error::{HarnessError, HarnessResult, Staged};
use crate::scenario::{DeltaMode, ScenarioSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};
use subdiff::forward::{observe, solve_fd, TemporalSignal};

const STAGE: &str = "synthesize";

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticData {
    /// Noise-free 𝔾(ρ†) on the inversion grid.
    pub clean: Vec<f64>,
    pub y: Vec<f64>,
    pub sigma: f64,
    /// Whitened noise level used by the stopping rule.
    pub delta: f64,
    pub noise_seed: u64,
}

/// Observed traces of the truth, solved on the data grid and restricted to
/// the inversion time nodes t_j, j = 1..Nt.
pub fn clean_observation(scenario: &ScenarioSpec) -> HarnessResult<Vec<f64>> {
    let r = scenario.grid.data_refinement;
    let tgrid = scenario.time_grid()?.refined(r).stage(STAGE)?;
    let sgrid = scenario.space_grid()?.refined(r).stage(STAGE)?;
    let spec = scenario.system_spec()?;
    let truth: TemporalSignal = scenario.truth_on(tgrid)?;
    let state = solve_fd(&spec, sgrid, tgrid, &truth, None).stage(STAGE)?;
    let fine = observe(&state, scenario.observation.x0, &scenario.observed()).stage(STAGE)?;
    let nt = scenario.grid.time_steps;
    let per = nt * r;
    Ok(fine.chunks(per).flat_map(|block| (1..=nt).map(move |i| block[i * r - 1])).collect())
}

/// Standard normal draws for level σ under `seed`. Each σ reads its own
/// ChaCha stream, so the levels of a sweep get independent noise.
pub fn noise_draws(seed: u64, sigma: f64, len: usize) -> Vec<f64> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(sigma.to_bits());
    (0..len).map(|_| StandardNormal.sample(&mut rng)).collect()
}

pub fn synthesize_data(scenario: &ScenarioSpec, sigma: f64, noise_seed: u64) -> HarnessResult<SyntheticData> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(HarnessError::validation(STAGE, format!("noise level must be nonnegative, got {sigma}")));
    }
    let clean = clean_observation(scenario)?;
    let z = noise_draws(noise_seed, sigma, clean.len());
    let y = clean.iter().zip(&z).map(|(c, n)| c + sigma * n).collect();
    let delta = match scenario.noise.delta {
        DeltaMode::Realized => z.iter().map(|v| v * v).sum::<f64>().sqrt(),
        DeltaMode::Expected => (clean.len() as f64).sqrt(),
    };
    Ok(SyntheticData { clean, y, sigma, delta, noise_seed })
}
