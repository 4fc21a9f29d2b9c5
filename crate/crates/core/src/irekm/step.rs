use super::config::NuRule;
use super::ensemble::{mean_of, Ensemble};
use super::map::ForwardMap;
use super::noise::NoiseModel;
use crate::error::{Error, Result};
use crate::forward::TemporalSignal;
use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rayon::prelude::*;

/// |C^{-1/2}(y - w)|.
pub fn data_misfit(y: &[f64], w: &[f64], noise: &NoiseModel) -> Result<f64> {
    if y.len() != w.len() {
        return Err(Error::input(format!("data length {} differs from prediction length {}", y.len(), w.len())));
    }
    let s = noise.sigma();
    Ok(y.iter().zip(w).map(|(a, b)| ((a - b) / s).powi(2)).sum::<f64>().sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Predictions {
    pub members: Vec<Vec<f64>>,
    pub mean: Vec<f64>,
}

pub fn predict(ensemble: &Ensemble, map: &dyn ForwardMap) -> Result<Predictions> {
    let members = ensemble
        .particles()
        .par_iter()
        .enumerate()
        .map(|(j, p)| {
            let w = map.evaluate(p).map_err(|e| Error::ForwardFailure { particle: j, message: e.to_string() })?;
            if w.iter().all(|v| v.is_finite()) {
                Ok(w)
            } else {
                Err(Error::ForwardFailure { particle: j, message: "non-finite prediction".into() })
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let mean = mean_of(&members);
    Ok(Predictions { members, mean })
}

pub fn should_stop(y: &[f64], mean: &[f64], delta: f64, tau: f64, noise: &NoiseModel) -> Result<bool> {
    Ok(data_misfit(y, mean, noise)? <= delta * tau)
}

/// Columns (v_j - v̄)/√(N_e - 1).
fn anomalies(rows: &[Vec<f64>]) -> DMatrix<f64> {
    let mean = mean_of(rows);
    let scale = 1.0 / ((rows.len() - 1) as f64).sqrt();
    DMatrix::from_fn(mean.len(), rows.len(), |i, j| (rows[j][i] - mean[i]) * scale)
}

/// C^{ww} from the prediction anomalies, exactly symmetric.
pub fn empirical_covariance(predictions: &Predictions) -> DMatrix<f64> {
    let a = anomalies(&predictions.members);
    let m = a.nrows();
    let mut c = DMatrix::zeros(m, m);
    for i in 0..m {
        for k in i..m {
            let v = a.row(i).dot(&a.row(k));
            c[(i, k)] = v;
            c[(k, i)] = v;
        }
    }
    c
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NuChoice {
    pub nu: f64,
    /// Number of doublings taken from the starting value.
    pub doublings: usize,
    /// Left side over right side of the acceptance inequality (≥ 1 when accepted).
    pub ratio: f64,
}

fn regularized_factor(cww: &DMatrix<f64>, noise: &NoiseModel, nu: f64) -> Result<Cholesky<f64, Dyn>> {
    let mut a = cww.clone();
    let shift = nu * noise.variance();
    for i in 0..a.nrows() {
        a[(i, i)] += shift;
    }
    Cholesky::new(a).ok_or_else(|| Error::numerical(format!("C^ww + νC is not positive definite at ν = {nu:e}")))
}

/// First ν in ν_start·2^i, i = 0..=cap, meeting the acceptance inequality.
pub fn select_nu(
    nu_start: f64,
    cww: &DMatrix<f64>,
    noise: &NoiseModel,
    residual: &[f64],
    xi: f64,
    cap: usize,
    rule: NuRule,
) -> Result<NuChoice> {
    if !(nu_start > 0.0) {
        return Err(Error::param(format!("ν must be positive, got {nu_start}")));
    }
    if cww.nrows() != residual.len() || !cww.is_square() {
        return Err(Error::input("covariance and residual sizes differ"));
    }
    let s = noise.sigma();
    let r = DVector::from_column_slice(residual);
    let rnorm = r.norm();
    let rhs = match rule {
        NuRule::Weighted => xi * rnorm / s,
        NuRule::Literal => xi * rnorm / (s * s),
    };
    let mut nu = nu_start;
    let mut ratio = f64::NAN;
    for i in 0..=cap {
        let z = regularized_factor(cww, noise, nu)?.solve(&r);
        let lhs = match rule {
            NuRule::Weighted => nu * s * z.norm(),
            NuRule::Literal => nu * z.norm() / s,
        };
        ratio = if rhs == 0.0 { f64::INFINITY } else { lhs / rhs };
        if lhs >= rhs {
            return Ok(NuChoice { nu, doublings: i, ratio });
        }
        nu *= 2.0;
    }
    Err(Error::RegularizationFailure { tried: cap + 1, last_ratio: ratio })
}

/// ρ^{(j)} += C^{ρw}(C^{ww} + νC)^{-1}(y - w^{(j)}) for every particle.
pub fn analysis_update(
    ensemble: &Ensemble,
    predictions: &Predictions,
    y: &[f64],
    noise: &NoiseModel,
    nu: f64,
) -> Result<Ensemble> {
    let ne = ensemble.len();
    if predictions.members.len() != ne {
        return Err(Error::input("predictions are not aligned with the ensemble"));
    }
    if ne < 2 {
        return Err(Error::param("analysis needs at least two particles"));
    }
    let m = y.len();
    if predictions.members.iter().any(|w| w.len() != m) {
        return Err(Error::input("prediction length differs from data length"));
    }
    if !(nu > 0.0) {
        return Err(Error::param(format!("ν must be positive, got {nu}")));
    }
    let cww = empirical_covariance(predictions);
    let chol = regularized_factor(&cww, noise, nu)?;

    let aw = anomalies(&predictions.members);
    let states: Vec<Vec<f64>> = ensemble.particles().iter().map(|p| p.flat()).collect();
    let arho = anomalies(&states);
    let innovations = DMatrix::from_fn(m, ne, |i, j| y[i] - predictions.members[j][i]);
    let solved = chol.solve(&innovations);
    // C^{ρw} X = A_ρ (A_wᵀ X)
    let increments = &arho * (aw.transpose() * solved);
    if increments.iter().any(|v| !v.is_finite()) {
        return Err(Error::numerical("analysis update produced non-finite values"));
    }

    let (grid, k) = (*ensemble.grid(), ensemble.components());
    let particles = states
        .iter()
        .enumerate()
        .map(|(j, s)| {
            let updated: Vec<f64> = s.iter().zip(increments.column(j).iter()).map(|(a, d)| a + d).collect();
            TemporalSignal::from_flat(grid, k, &updated)
        })
        .collect::<Result<Vec<_>>>()?;
    Ensemble::at_iteration(particles, ensemble.iteration() + 1)
}
