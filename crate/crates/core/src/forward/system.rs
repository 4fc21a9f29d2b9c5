use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::expr::Expr;
use super::space::SpaceGrid;
use crate::error::{Error, Result};
use crate::fraccalc::{GridFunction, TimeGrid};

/// Coupled system (∂_t^{α_k} - ∂_x² ) u_k + Σ_ℓ c_{kℓ} u_ℓ = Σ_ℓ g_{kℓ}(x) ρ_ℓ(t)
/// on (0, 1) × (0, T] with homogeneous Dirichlet data and u(·, 0) = g₀.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemSpec {
    alpha: Vec<f64>,
    coupling: DMatrix<f64>,
    source: Vec<Vec<Expr>>,
    initial: Vec<Expr>,
}

impl SystemSpec {
    /// `source[k][l]` is g_{kℓ}(x).
    pub fn new(alpha: Vec<f64>, coupling: DMatrix<f64>, source: Vec<Vec<Expr>>) -> Result<Self> {
        let k = alpha.len();
        if k == 0 {
            return Err(Error::param("system needs at least one component"));
        }
        for (i, &a) in alpha.iter().enumerate() {
            if !(a > 0.0 && a < 1.0) {
                return Err(Error::param(format!("order alpha_{} = {a} is outside (0, 1)", i + 1)));
            }
        }
        if alpha.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::param(format!("orders must be nonincreasing, got {alpha:?}")));
        }
        if coupling.nrows() != k || coupling.ncols() != k {
            return Err(Error::param(format!(
                "coupling matrix is {}x{}, expected {k}x{k}",
                coupling.nrows(),
                coupling.ncols()
            )));
        }
        if coupling.iter().any(|c| !c.is_finite()) {
            return Err(Error::param("coupling matrix has non-finite entries"));
        }
        if source.len() != k || source.iter().any(|row| row.len() != k) {
            return Err(Error::param(format!("source matrix must be {k}x{k}")));
        }
        if source.iter().flatten().any(|g| g.depends_on_t()) {
            return Err(Error::param("source matrix entries must depend on x only"));
        }
        Ok(Self { alpha, coupling, source, initial: vec![Expr::zero(); k] })
    }

    /// System with a diagonal source matrix diag(g₁, …, g_K).
    pub fn diagonal(alpha: Vec<f64>, coupling: DMatrix<f64>, g: Vec<Expr>) -> Result<Self> {
        let k = g.len();
        let source = (0..k)
            .map(|r| (0..k).map(|c| if r == c { g[r].clone() } else { Expr::zero() }).collect())
            .collect();
        Self::new(alpha, coupling, source)
    }

    pub fn with_initial(mut self, initial: Vec<Expr>) -> Result<Self> {
        if initial.len() != self.components() {
            return Err(Error::param(format!(
                "initial value has {} components, system has {}",
                initial.len(),
                self.components()
            )));
        }
        if initial.iter().any(|g| g.depends_on_t()) {
            return Err(Error::param("initial value must depend on x only"));
        }
        self.initial = initial;
        Ok(self)
    }

    pub fn components(&self) -> usize {
        self.alpha.len()
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn coupling(&self) -> &DMatrix<f64> {
        &self.coupling
    }

    pub fn source_entry(&self, k: usize, l: usize) -> &Expr {
        &self.source[k][l]
    }

    pub fn initial(&self) -> &[Expr] {
        &self.initial
    }

    pub fn has_initial(&self) -> bool {
        !self.initial.iter().all(Expr::is_zero_literal)
    }

    /// G(x).
    pub fn source_matrix(&self, x: f64) -> DMatrix<f64> {
        let k = self.components();
        DMatrix::from_fn(k, k, |r, c| self.source[r][c].at_x(x))
    }

    /// Diagonal of G(x).
    pub fn source_diagonal(&self, x: f64) -> Vec<f64> {
        (0..self.components()).map(|k| self.source[k][k].at_x(x)).collect()
    }

    /// Copy of this system with a different coupling matrix.
    pub fn with_coupling(&self, coupling: DMatrix<f64>) -> Result<Self> {
        Self::new(self.alpha.clone(), coupling, self.source.clone())?.with_initial(self.initial.clone())
    }

    pub(crate) fn check_source_on(&self, sgrid: &SpaceGrid) -> Result<()> {
        for x in sgrid.interior_nodes() {
            for (r, row) in self.source.iter().enumerate() {
                for (c, g) in row.iter().enumerate() {
                    if !g.at_x(x).is_finite() {
                        return Err(Error::param(format!("g_{}{}({x}) is not finite", r + 1, c + 1)));
                    }
                }
            }
            for (k, g) in self.initial.iter().enumerate() {
                if !g.at_x(x).is_finite() {
                    return Err(Error::param(format!("initial value g_{}({x}) is not finite", k + 1)));
                }
            }
        }
        Ok(())
    }
}

/// K temporal functions sampled on a time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TemporalSignal {
    grid: TimeGrid,
    values: Vec<Vec<f64>>,
}

impl TemporalSignal {
    pub fn new(grid: TimeGrid, values: Vec<Vec<f64>>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::input("temporal signal needs at least one component"));
        }
        for (k, v) in values.iter().enumerate() {
            if v.len() != grid.len() {
                return Err(Error::input(format!(
                    "component {} has {} samples, grid has {} nodes",
                    k + 1,
                    v.len(),
                    grid.len()
                )));
            }
            if let Some(j) = v.iter().position(|x| !x.is_finite()) {
                return Err(Error::input(format!("component {} is not finite at node {j}", k + 1)));
            }
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: TimeGrid, components: usize) -> Self {
        Self { grid, values: vec![vec![0.0; grid.len()]; components] }
    }

    pub fn from_exprs(grid: TimeGrid, exprs: &[Expr]) -> Result<Self> {
        let nodes = grid.nodes();
        Self::new(grid, exprs.iter().map(|e| nodes.iter().map(|&t| e.at_t(t)).collect()).collect())
    }

    /// Stacked vector (component-major) back into a signal.
    pub fn from_flat(grid: TimeGrid, components: usize, flat: &[f64]) -> Result<Self> {
        if flat.len() != components * grid.len() {
            return Err(Error::input(format!(
                "flat vector has length {}, expected {}",
                flat.len(),
                components * grid.len()
            )));
        }
        Self::new(grid, flat.chunks(grid.len()).map(<[f64]>::to_vec).collect())
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn components(&self) -> usize {
        self.values.len()
    }

    pub fn component(&self, k: usize) -> &[f64] {
        &self.values[k]
    }

    pub fn component_fn(&self, k: usize) -> GridFunction {
        GridFunction::new(self.grid, self.values[k].clone()).expect("validated on construction")
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn flat(&self) -> Vec<f64> {
        self.values.concat()
    }
}

/// Solution u_k(x_i, t_j) on interior space nodes and all time nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct StateField {
    sgrid: SpaceGrid,
    tgrid: TimeGrid,
    components: usize,
    /// layout [k][j][i - 1]
    data: Vec<f64>,
}

impl StateField {
    pub(crate) fn zeros(sgrid: SpaceGrid, tgrid: TimeGrid, components: usize) -> Self {
        let n = components * tgrid.len() * sgrid.interior_count();
        Self { sgrid, tgrid, components, data: vec![0.0; n] }
    }

    fn offset(&self, k: usize, j: usize) -> usize {
        (k * self.tgrid.len() + j) * self.sgrid.interior_count()
    }

    pub fn space_grid(&self) -> &SpaceGrid {
        &self.sgrid
    }

    pub fn time_grid(&self) -> &TimeGrid {
        &self.tgrid
    }

    pub fn components(&self) -> usize {
        self.components
    }

    /// u_k(x_i, t_j) for a node index i in 0..=Nx; zero on the boundary.
    pub fn value(&self, k: usize, i: usize, j: usize) -> f64 {
        if i == 0 || i >= self.sgrid.steps() {
            return 0.0;
        }
        self.data[self.offset(k, j) + i - 1]
    }

    /// Interior profile of component k at time node j.
    pub fn slice(&self, k: usize, j: usize) -> &[f64] {
        let o = self.offset(k, j);
        &self.data[o..o + self.sgrid.interior_count()]
    }

    pub(crate) fn slice_mut(&mut self, k: usize, j: usize) -> &mut [f64] {
        let o = self.offset(k, j);
        let n = self.sgrid.interior_count();
        &mut self.data[o..o + n]
    }

    /// Time trace u_k(x_i, ·) at node index i.
    pub fn trace(&self, k: usize, i: usize) -> Vec<f64> {
        (0..self.tgrid.len()).map(|j| self.value(k, i, j)).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min_value(&self) -> f64 {
        self.data.iter().fold(f64::INFINITY, |m, &v| m.min(v))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(s: &str) -> Expr {
        Expr::parse(s).unwrap()
    }

    #[test]
    fn spec_validation() {
        let c = DMatrix::from_row_slice(2, 2, &[3.0, -1.0, -1.0, 3.0]);
        assert!(SystemSpec::diagonal(vec![0.8, 0.3], c.clone(), vec![e("x+1"), e("2")]).is_ok());
        assert!(SystemSpec::diagonal(vec![0.3, 0.8], c.clone(), vec![e("x+1"), e("2")]).is_err());
        assert!(SystemSpec::diagonal(vec![1.0, 0.3], c.clone(), vec![e("x+1"), e("2")]).is_err());
        assert!(SystemSpec::diagonal(vec![0.8, 0.3], c.clone(), vec![e("t"), e("2")]).is_err());
        assert!(SystemSpec::diagonal(vec![0.8], c, vec![e("1")]).is_err());
    }

    #[test]
    fn signal_round_trips_through_flat() {
        let g = TimeGrid::new(1.0, 4).unwrap();
        let s = TemporalSignal::from_exprs(g, &[e("t"), e("1 - t")]).unwrap();
        let back = TemporalSignal::from_flat(g, 2, &s.flat()).unwrap();
        assert_eq!(s, back);
        assert_eq!(s.component(1)[4], 0.0);
    }
}
