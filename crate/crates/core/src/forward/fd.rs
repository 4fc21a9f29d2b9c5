//! Implicit finite-difference solver: L1 scheme in time, centred second
//! difference in space, coupling treated implicitly.
//!
//! Each step solves
//!
//! ```text
//! (a_k I + T) u_k^j + Σ_ℓ c_{kℓ} u_ℓ^j
//!     = (G ρ(t_j))_k + a_k [u_k^{j-1} - Σ_{l=1}^{j-1} b_l (u_k^{j-l} - u_k^{j-l-1})]
//! ```
//!
//! with a_k = Δt^{-α_k}/Γ(2-α_k) and T = tridiag(-1, 2, -1)/Δx². The step
//! matrix does not depend on j, so it is factorized once.

use nalgebra::{DMatrix, DVector, Dyn, LU};

use super::expr::Expr;
use super::space::SpaceGrid;
use super::system::{StateField, SystemSpec, TemporalSignal};
use crate::error::{Error, Result};
use crate::fraccalc::{l1_scale, l1_weights, TimeGrid};

/// Pivot ratio below which the step matrix is reported as singular.
const PIVOT_RATIO_MIN: f64 = 1e-13;

/// Reusable solver for one system on fixed grids.
pub struct FdSolver {
    sgrid: SpaceGrid,
    tgrid: TimeGrid,
    k: usize,
    a: Vec<f64>,
    b: Vec<Vec<f64>>,
    /// g_{kℓ}(x_i), layout [k][ℓ][i - 1]
    g: Vec<Vec<Vec<f64>>>,
    initial: Vec<Vec<f64>>,
    lu: LU<f64, Dyn, Dyn>,
}

impl FdSolver {
    pub fn new(spec: &SystemSpec, sgrid: SpaceGrid, tgrid: TimeGrid) -> Result<Self> {
        spec.check_source_on(&sgrid)?;
        let k = spec.components();
        let n = sgrid.interior_count();
        let dt = tgrid.dt();
        let inv_dx2 = 1.0 / (sgrid.dx() * sgrid.dx());
        let a: Vec<f64> = spec.alpha().iter().map(|&al| l1_scale(al, dt)).collect();
        let b = spec.alpha().iter().map(|&al| l1_weights(al, tgrid.len())).collect();
        let xs = sgrid.interior_nodes();
        let g = (0..k)
            .map(|r| (0..k).map(|c| xs.iter().map(|&x| spec.source_entry(r, c).at_x(x)).collect()).collect())
            .collect();
        let initial = spec.initial().iter().map(|e| xs.iter().map(|&x| e.at_x(x)).collect()).collect();

        let c = spec.coupling();
        let mut m = DMatrix::<f64>::zeros(k * n, k * n);
        for p in 0..k {
            for i in 0..n {
                let row = p * n + i;
                m[(row, row)] = a[p] + 2.0 * inv_dx2;
                if i > 0 {
                    m[(row, row - 1)] = -inv_dx2;
                }
                if i + 1 < n {
                    m[(row, row + 1)] = -inv_dx2;
                }
                for q in 0..k {
                    m[(row, q * n + i)] += c[(p, q)];
                }
            }
        }
        let lu = m.lu();
        let diag = lu.u().diagonal();
        let max = diag.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
        let min = diag.iter().fold(f64::INFINITY, |acc, v| acc.min(v.abs()));
        if !(min > PIVOT_RATIO_MIN * max) {
            return Err(Error::numerical(format!(
                "step matrix is singular at step 1 (pivot ratio estimate {:.3e})",
                if min > 0.0 { max / min } else { f64::INFINITY }
            )));
        }
        Ok(Self { sgrid, tgrid, k, a, b, g, initial, lu })
    }

    pub fn space_grid(&self) -> &SpaceGrid {
        &self.sgrid
    }

    pub fn time_grid(&self) -> &TimeGrid {
        &self.tgrid
    }

    pub fn components(&self) -> usize {
        self.k
    }

    /// Solve with the system's own initial value.
    pub fn solve(&self, source: &TemporalSignal) -> Result<StateField> {
        self.run(Some(source), &self.initial)
    }

    /// Solve with an explicit initial profile (interior values per component).
    pub fn solve_with_initial(&self, source: Option<&TemporalSignal>, initial: &[Vec<f64>]) -> Result<StateField> {
        let n = self.sgrid.interior_count();
        if initial.len() != self.k || initial.iter().any(|v| v.len() != n) {
            return Err(Error::input(format!("initial profile must be {} components of {n} values", self.k)));
        }
        self.run(source, initial)
    }

    /// Homogeneous problem (no source) from the given initial profile.
    pub fn solve_homogeneous(&self, initial: &[Vec<f64>]) -> Result<StateField> {
        self.solve_with_initial(None, initial)
    }

    fn run(&self, source: Option<&TemporalSignal>, initial: &[Vec<f64>]) -> Result<StateField> {
        if let Some(s) = source {
            if s.grid() != &self.tgrid {
                return Err(Error::input("source is not sampled on the solver's time grid"));
            }
            if s.components() != self.k {
                return Err(Error::input(format!(
                    "source has {} components, system has {}",
                    s.components(),
                    self.k
                )));
            }
        }
        let n = self.sgrid.interior_count();
        let nt = self.tgrid.steps();
        let mut field = StateField::zeros(self.sgrid, self.tgrid, self.k);
        for (p, init) in initial.iter().enumerate() {
            field.slice_mut(p, 0).copy_from_slice(init);
        }
        let mut rhs = DVector::<f64>::zeros(self.k * n);
        let mut hist = vec![0.0; n];
        for j in 1..=nt {
            for p in 0..self.k {
                let b = &self.b[p];
                hist.copy_from_slice(field.slice(p, j - 1));
                for l in 1..j {
                    let (newer, older) = (field.slice(p, j - l), field.slice(p, j - l - 1));
                    for i in 0..n {
                        hist[i] -= b[l] * (newer[i] - older[i]);
                    }
                }
                let seg = &mut rhs.as_mut_slice()[p * n..(p + 1) * n];
                for i in 0..n {
                    seg[i] = self.a[p] * hist[i];
                }
                if let Some(s) = source {
                    for q in 0..self.k {
                        let rho = s.component(q)[j];
                        if rho != 0.0 {
                            for (dst, g) in seg.iter_mut().zip(&self.g[p][q]) {
                                *dst += g * rho;
                            }
                        }
                    }
                }
            }
            if !self.lu.solve_mut(&mut rhs) {
                return Err(Error::numerical(format!("linear solve failed at step {j}")));
            }
            if rhs.iter().any(|v| !v.is_finite()) {
                return Err(Error::numerical(format!("non-finite solution at step {j}")));
            }
            for p in 0..self.k {
                field.slice_mut(p, j).copy_from_slice(&rhs.as_slice()[p * n..(p + 1) * n]);
            }
        }
        Ok(field)
    }
}

/// One-shot finite-difference solve. `initial` overrides the system's
/// initial value when given.
pub fn solve_fd(
    spec: &SystemSpec,
    sgrid: SpaceGrid,
    tgrid: TimeGrid,
    source: &TemporalSignal,
    initial: Option<&[Expr]>,
) -> Result<StateField> {
    let solver = FdSolver::new(spec, sgrid, tgrid)?;
    match initial {
        None => solver.solve(source),
        Some(init) => {
            if init.len() != spec.components() {
                return Err(Error::input("initial value has the wrong number of components"));
            }
            let xs = sgrid.interior_nodes();
            let profile: Vec<Vec<f64>> = init.iter().map(|e| xs.iter().map(|&x| e.at_x(x)).collect()).collect();
            solver.solve_with_initial(Some(source), &profile)
        }
    }
}
