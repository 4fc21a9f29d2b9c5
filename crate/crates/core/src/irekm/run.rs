use super::config::IrekmConfig;
use super::ensemble::Ensemble;
use super::map::ForwardMap;
use super::metrics::{metrics, Metrics};
use super::noise::NoiseModel;
use super::step::{analysis_update, data_misfit, empirical_covariance, predict, select_nu};
use crate::error::{Error, Result};
use crate::forward::TemporalSignal;
use std::time::{Duration, Instant};

#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub n: usize,
    pub residual: f64,
    /// Relative errors of the ensemble mean; empty without a reference.
    pub errors: Vec<f64>,
    pub aggregate_error: Option<f64>,
    /// ν used for the update that follows; `None` on the final iterate.
    pub nu: Option<f64>,
    pub nu_doublings: Option<usize>,
    pub wall_time: Duration,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    Discrepancy,
    MaxIterations,
}

impl StopReason {
    pub fn name(&self) -> &'static str {
        match self {
            StopReason::Discrepancy => "discrepancy",
            StopReason::MaxIterations => "max_iterations",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    /// Ensemble mean at the discrepancy stop, or at the smallest residual
    /// seen when the iteration budget ran out.
    pub estimate: TemporalSignal,
    pub estimate_iteration: usize,
    pub history: Vec<IterationRecord>,
    pub stop_reason: StopReason,
    pub final_ensemble: Ensemble,
    pub forward_evaluations: usize,
}

impl RunOutcome {
    pub fn converged(&self) -> bool {
        self.stop_reason == StopReason::Discrepancy
    }
}

/// Runs the ensemble iteration from `initial` against data `y` with noise
/// level δ = ‖y - 𝔾(ρ†)‖. `truth`, when given, feeds the error columns.
pub fn run(
    map: &dyn ForwardMap,
    y: &[f64],
    delta: f64,
    noise: &NoiseModel,
    initial: Ensemble,
    config: &IrekmConfig,
    truth: Option<&TemporalSignal>,
) -> Result<RunOutcome> {
    config.validate()?;
    if y.len() != map.output_len() {
        return Err(Error::input(format!("data length {} differs from map output {}", y.len(), map.output_len())));
    }
    if !(delta >= 0.0) {
        return Err(Error::param(format!("δ must be nonnegative, got {delta}")));
    }
    let mut ensemble = initial;
    let mut history = Vec::new();
    let mut nu_start = config.nu0;
    let mut evaluations = 0;
    let mut best: Option<(f64, usize, TemporalSignal)> = None;
    for n in 0..=config.max_iterations {
        let clock = Instant::now();
        let pred = predict(&ensemble, map)?;
        evaluations += ensemble.len();
        let residual = data_misfit(y, &pred.mean, noise)?;
        let mean = ensemble.mean();
        let (errors, aggregate_error) = match truth {
            Some(t) => {
                let Metrics { components, aggregate } = metrics(&mean, t)?;
                (components, Some(aggregate))
            }
            None => (Vec::new(), None),
        };
        let mut record =
            IterationRecord { n, residual, errors, aggregate_error, nu: None, nu_doublings: None, wall_time: Duration::ZERO };

        if residual <= delta * config.tau {
            record.wall_time = clock.elapsed();
            history.push(record);
            return Ok(RunOutcome {
                estimate: mean,
                estimate_iteration: n,
                history,
                stop_reason: StopReason::Discrepancy,
                final_ensemble: ensemble,
                forward_evaluations: evaluations,
            });
        }
        if best.as_ref().is_none_or(|b| residual < b.0) {
            best = Some((residual, n, mean));
        }
        if n == config.max_iterations {
            record.wall_time = clock.elapsed();
            history.push(record);
            break;
        }

        let r: Vec<f64> = y.iter().zip(&pred.mean).map(|(a, b)| a - b).collect();
        let cww = empirical_covariance(&pred);
        let choice = select_nu(nu_start, &cww, noise, &r, config.xi, config.nu_doublings, config.nu_rule)?;
        ensemble = analysis_update(&ensemble, &pred, y, noise, choice.nu)?;
        if config.warm_start {
            nu_start = choice.nu;
        }
        record.nu = Some(choice.nu);
        record.nu_doublings = Some(choice.doublings);
        record.wall_time = clock.elapsed();
        history.push(record);
    }
    let (_, at, estimate) = best.expect("at least one iterate");
    Ok(RunOutcome {
        estimate,
        estimate_iteration: at,
        history,
        stop_reason: StopReason::MaxIterations,
        final_ensemble: ensemble,
        forward_evaluations: evaluations,
    })
}
