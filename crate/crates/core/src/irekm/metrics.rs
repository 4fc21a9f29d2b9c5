use crate::error::{Error, Result};
use crate::forward::TemporalSignal;

/// Relative L²(0, T) errors, per component and stacked.
#[derive(Debug, Clone, PartialEq)]
pub struct Metrics {
    pub components: Vec<f64>,
    pub aggregate: f64,
}

/// Squared trapezoidal L² norm of node values.
fn sq_norm(v: &[f64], dt: f64) -> f64 {
    let n = v.len() - 1;
    v.iter().enumerate().map(|(j, x)| if j == 0 || j == n { 0.5 * x * x } else { x * x }).sum::<f64>() * dt
}

pub fn metrics(estimate: &TemporalSignal, truth: &TemporalSignal) -> Result<Metrics> {
    if estimate.grid() != truth.grid() || estimate.components() != truth.components() {
        return Err(Error::input("estimate and truth have different layouts"));
    }
    let dt = truth.grid().dt();
    let (mut num_all, mut den_all) = (0.0, 0.0);
    let mut components = Vec::with_capacity(truth.components());
    for k in 0..truth.components() {
        let t = truth.component(k);
        let diff: Vec<f64> = estimate.component(k).iter().zip(t).map(|(a, b)| a - b).collect();
        let (num, den) = (sq_norm(&diff, dt), sq_norm(t, dt));
        if den == 0.0 {
            return Err(Error::UndefinedMetric(format!("truth component {k} has zero norm")));
        }
        components.push((num / den).sqrt());
        num_all += num;
        den_all += den;
    }
    Ok(Metrics { components, aggregate: (num_all / den_all).sqrt() })
}
