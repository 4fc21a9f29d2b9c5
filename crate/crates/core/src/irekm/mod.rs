//! Iterative regularizing ensemble Kalman method: ensemble prediction,
//! discrepancy stopping, regularized analysis with doubling ν-selection.

pub mod config;
pub mod ensemble;
pub mod map;
pub mod metrics;
pub mod noise;
pub mod run;
pub mod step;

pub use config::{IrekmConfig, NuRule};
pub use ensemble::Ensemble;
pub use map::{FdObservationMap, ForwardMap, LinearMap};
pub use metrics::{metrics, Metrics};
pub use noise::NoiseModel;
pub use run::{run, IterationRecord, RunOutcome, StopReason};
pub use step::{
    analysis_update, data_misfit, empirical_covariance, predict, select_nu, should_stop, NuChoice, Predictions,
};

/// Pairwise sum in index order; the association tree depends only on the length.
pub(crate) fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 8 {
        return v.iter().sum();
    }
    let mid = v.len() / 2;
    pairwise_sum(&v[..mid]) + pairwise_sum(&v[mid..])
}
