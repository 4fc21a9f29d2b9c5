//! Riemann–Liouville integral J^β f = k_β ∗ f, k_β(t) = t^{β-1}/Γ(β), by
//! product integration: f is interpolated piecewise linearly and the
//! kernel moments are integrated exactly.

use super::gamma::rgamma;
use super::grid::GridFunction;
use crate::error::{Error, Result};

/// Product-integration weights a_{i,j}/scale for a fixed `j`, in the
/// form `J^β f(t_j) = h^β/Γ(β+2) Σ_i a_{i,j} f_i`.
fn weights(beta: f64, j: usize, out: &mut Vec<f64>) {
    out.clear();
    let b1 = beta + 1.0;
    let p = |k: f64| k.powf(b1);
    let jf = j as f64;
    out.push(p(jf - 1.0) - (jf - b1) * jf.powf(beta));
    for i in 1..j {
        let d = (j - i) as f64;
        out.push(p(d + 1.0) - 2.0 * p(d) + p(d - 1.0));
    }
    out.push(1.0);
}

pub(crate) fn rl_integral_slice(beta: f64, dt: f64, f: &[f64]) -> Vec<f64> {
    let scale = dt.powf(beta) * rgamma(beta + 2.0);
    let mut out = vec![0.0; f.len()];
    let mut w = Vec::with_capacity(f.len());
    for j in 1..f.len() {
        weights(beta, j, &mut w);
        let s: f64 = w.iter().zip(&f[..=j]).map(|(a, b)| a * b).sum();
        out[j] = scale * s;
    }
    out
}

/// Discrete J^β f at every node; node 0 is 0.
pub fn rl_integral(beta: f64, f: &GridFunction) -> Result<GridFunction> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::param(format!("integral order must be positive, got {beta}")));
    }
    let grid = *f.grid();
    Ok(GridFunction::from_parts_unchecked(grid, rl_integral_slice(beta, grid.dt(), f.values())))
}

pub(crate) fn rl_derivative_slice(alpha: f64, dt: f64, f: &[f64]) -> Vec<f64> {
    let j_alpha = rl_integral_slice(alpha, dt, f);
    let mut out = vec![0.0; f.len()];
    for j in 1..f.len() {
        out[j] = (j_alpha[j] - j_alpha[j - 1]) / dt;
    }
    out
}

/// Discrete D^{1-α} f = (J^α f)' by a backward difference; node 0 is 0.
pub fn rl_derivative(alpha: f64, f: &GridFunction) -> Result<GridFunction> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::param(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let grid = *f.grid();
    Ok(GridFunction::from_parts_unchecked(grid, rl_derivative_slice(alpha, grid.dt(), f.values())))
}
