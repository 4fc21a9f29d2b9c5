use nalgebra::DVector;

use super::system::{StateField, SystemSpec, TemporalSignal};
use crate::error::{Error, Result};
use crate::fraccalc::caputo::caputo_l1_slice;

/// Pointwise estimate ρ(t) = G(x₀)^{-1} [∂_t^α u + A u + C u](x₀, t), with
/// the L1 derivative and the centred second difference. Node 0 is filled
/// by linear extrapolation from nodes 1 and 2.
pub fn direct_estimate(state: &StateField, spec: &SystemSpec, x0: f64) -> Result<TemporalSignal> {
    let k = spec.components();
    if state.components() != k {
        return Err(Error::input("state and system have different component counts"));
    }
    let sgrid = state.space_grid();
    let tgrid = *state.time_grid();
    let i = sgrid.locate(x0)?;
    let g = spec.source_matrix(sgrid.node(i));
    let det = g.determinant();
    let norm = g.norm();
    if !(det.abs() > 1e-12 * norm.powi(k as i32)) {
        return Err(Error::DegenerateConfiguration(format!(
            "source matrix G(x0) at x0 = {x0} is singular (|det| = {:.3e}, |G|_F = {norm:.3e})",
            det.abs()
        )));
    }
    let lu = g.lu();
    let inv_dx2 = 1.0 / (sgrid.dx() * sgrid.dx());
    let nt = tgrid.steps();
    let dt = tgrid.dt();
    let derivs: Vec<Vec<f64>> =
        (0..k).map(|p| caputo_l1_slice(spec.alpha()[p], dt, &state.trace(p, i))).collect();
    let c = spec.coupling();
    let mut out = vec![vec![0.0; nt + 1]; k];
    for j in 1..=nt {
        let rhs = DVector::from_fn(k, |p, _| {
            let lap = -(state.value(p, i + 1, j) - 2.0 * state.value(p, i, j) + state.value(p, i - 1, j)) * inv_dx2;
            let cu: f64 = (0..k).map(|q| c[(p, q)] * state.value(q, i, j)).sum();
            derivs[p][j] + lap + cu
        });
        let rho = lu.solve(&rhs).ok_or_else(|| Error::numerical("G(x0) solve failed"))?;
        for p in 0..k {
            out[p][j] = rho[p];
        }
    }
    for row in &mut out {
        row[0] = if nt >= 2 { 2.0 * row[1] - row[2] } else { row[1] };
    }
    TemporalSignal::new(tgrid, out)
}
