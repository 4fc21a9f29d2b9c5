//! The finite-difference observation map ρ ↦ (u_k(x₀, t_j))_{k, j≥1} as a
//! discrete convolution.
//!
//! The step matrix and the L1 history weights do not depend on j and the
//! source enters only through ρ(t_j), j ≥ 1. A unit impulse in ρ_ℓ at
//! t_1 therefore generates every response by a shift, and one solve per
//! source component recovers the whole (affine) map exactly.

use super::fd::FdSolver;
use super::observe::normalize_components;
use super::space::SpaceGrid;
use super::system::{SystemSpec, TemporalSignal};
use crate::error::{Error, Result};
use crate::fraccalc::TimeGrid;

#[derive(Debug, Clone)]
pub struct ResponseMap {
    tgrid: TimeGrid,
    sources: usize,
    components: Vec<usize>,
    /// kernel[c][ℓ][m]: observed component c at t_{m+1} per unit ρ_ℓ(t_1)
    kernel: Vec<Vec<Vec<f64>>>,
    /// response to the initial value alone
    offset: Vec<f64>,
}

impl ResponseMap {
    pub fn new(spec: &SystemSpec, sgrid: SpaceGrid, tgrid: TimeGrid, x0: f64, components: &[usize]) -> Result<Self> {
        let solver = FdSolver::new(spec, sgrid, tgrid)?;
        Self::from_solver(&solver, spec, x0, components)
    }

    pub fn from_solver(solver: &FdSolver, spec: &SystemSpec, x0: f64, components: &[usize]) -> Result<Self> {
        let k = solver.components();
        let tgrid = *solver.time_grid();
        let sgrid = *solver.space_grid();
        let i = sgrid.locate(x0)?;
        let comps = normalize_components(components, k)?;
        let nt = tgrid.steps();
        let zero = vec![vec![0.0; sgrid.interior_count()]; k];
        let mut kernel = vec![vec![Vec::new(); k]; comps.len()];
        for l in 0..k {
            let mut impulse = TemporalSignal::zeros(tgrid, k);
            let mut vals = impulse.values().to_vec();
            vals[l][1] = 1.0;
            impulse = TemporalSignal::new(tgrid, vals)?;
            let field = solver.solve_with_initial(Some(&impulse), &zero)?;
            for (ci, &c) in comps.iter().enumerate() {
                kernel[ci][l] = (1..=nt).map(|j| field.value(c, i, j)).collect();
            }
        }
        let mut offset = vec![0.0; comps.len() * nt];
        if spec.has_initial() {
            let field = solver.solve(&TemporalSignal::zeros(tgrid, k))?;
            for (ci, &c) in comps.iter().enumerate() {
                for j in 1..=nt {
                    offset[ci * nt + j - 1] = field.value(c, i, j);
                }
            }
        }
        Ok(Self { tgrid, sources: k, components: comps, kernel, offset })
    }

    /// Length of the observation vector.
    pub fn output_len(&self) -> usize {
        self.components.len() * self.tgrid.steps()
    }

    pub fn components(&self) -> &[usize] {
        &self.components
    }

    pub fn time_grid(&self) -> &TimeGrid {
        &self.tgrid
    }

    pub fn apply(&self, source: &TemporalSignal) -> Result<Vec<f64>> {
        if source.grid() != &self.tgrid || source.components() != self.sources {
            return Err(Error::input("source does not match the response map"));
        }
        let mut out = self.offset.clone();
        self.accumulate(source.values(), &mut out);
        Ok(out)
    }

    /// Same as [`apply`](Self::apply) on raw per-component samples (node 0 included).
    pub(crate) fn accumulate(&self, rho: &[Vec<f64>], out: &mut [f64]) {
        let nt = self.tgrid.steps();
        for (ci, kern) in self.kernel.iter().enumerate() {
            let dst = &mut out[ci * nt..(ci + 1) * nt];
            for (l, kl) in kern.iter().enumerate() {
                let r = &rho[l];
                for j in 1..=nt {
                    let mut s = 0.0;
                    for i in 1..=j {
                        s += kl[j - i] * r[i];
                    }
                    dst[j - 1] += s;
                }
            }
        }
    }

    /// Observations produced by the initial value alone.
    pub fn offset(&self) -> &[f64] {
        &self.offset
    }
}
