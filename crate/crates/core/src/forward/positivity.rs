use super::fd::FdSolver;
use super::space::SpaceGrid;
use super::system::SystemSpec;
use crate::error::{Error, Result};
use crate::fraccalc::rl::rl_integral_slice;
use crate::fraccalc::TimeGrid;

/// Minimum of J^{M(1-α_K)} v over components, interior nodes and t_j, j ≥ 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositivityReport {
    pub min_value: f64,
    /// 0-based component of the minimum.
    pub component: usize,
    /// Space node index (1..Nx-1) of the minimum.
    pub space_index: usize,
    /// Time node index (≥ 1) of the minimum.
    pub time_index: usize,
    /// Order M(1-α_K) of the Riemann–Liouville integral applied.
    pub order: f64,
}

/// Solves the homogeneous problem from the system's initial value and
/// reports the minimum of J^{M(1-α_K)} v (v itself when M = 0).
pub fn positivity_check(spec: &SystemSpec, sgrid: SpaceGrid, tgrid: TimeGrid, m: usize) -> Result<PositivityReport> {
    let k = spec.components();
    let c = spec.coupling();
    for a in 0..k {
        for b in 0..k {
            if a != b && c[(a, b)] > 0.0 {
                return Err(Error::config(format!(
                    "off-diagonal coupling c_{}{} = {} must be nonpositive",
                    a + 1,
                    b + 1,
                    c[(a, b)]
                )));
            }
        }
    }
    let xs = sgrid.interior_nodes();
    let initial: Vec<Vec<f64>> = spec.initial().iter().map(|e| xs.iter().map(|&x| e.at_x(x)).collect()).collect();
    for (a, g) in initial.iter().enumerate() {
        if let Some(i) = g.iter().position(|&v| v < 0.0) {
            return Err(Error::config(format!("initial value g_{} is negative at x = {}", a + 1, xs[i])));
        }
    }
    let solver = FdSolver::new(spec, sgrid, tgrid)?;
    let v = solver.solve_homogeneous(&initial)?;
    let order = m as f64 * (1.0 - spec.alpha()[k - 1]);
    let mut best = PositivityReport { min_value: f64::INFINITY, component: 0, space_index: 1, time_index: 1, order };
    for p in 0..k {
        for i in 1..sgrid.steps() {
            let trace = v.trace(p, i);
            let w = if m == 0 { trace } else { rl_integral_slice(order, tgrid.dt(), &trace) };
            for (j, &val) in w.iter().enumerate().skip(1) {
                if val < best.min_value {
                    best = PositivityReport { min_value: val, component: p, space_index: i, time_index: j, order };
                }
            }
        }
    }
    Ok(best)
}
