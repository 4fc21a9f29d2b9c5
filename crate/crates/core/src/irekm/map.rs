use crate::error::{Error, Result};
use crate::forward::{observe, FdSolver, ResponseMap, SpaceGrid, SystemSpec, TemporalSignal};
use crate::fraccalc::TimeGrid;
use nalgebra::{DMatrix, DVector};

/// Parameter-to-observation map ρ ↦ 𝔾(ρ).
pub trait ForwardMap: Sync {
    fn output_len(&self) -> usize;
    fn evaluate(&self, rho: &TemporalSignal) -> Result<Vec<f64>>;
}

impl ForwardMap for ResponseMap {
    fn output_len(&self) -> usize {
        ResponseMap::output_len(self)
    }

    fn evaluate(&self, rho: &TemporalSignal) -> Result<Vec<f64>> {
        self.apply(rho)
    }
}

/// Finite-difference solve followed by point observation.
pub struct FdObservationMap {
    solver: FdSolver,
    x0: f64,
    components: Vec<usize>,
    output_len: usize,
}

impl FdObservationMap {
    pub fn new(spec: &SystemSpec, sgrid: SpaceGrid, tgrid: TimeGrid, x0: f64, components: &[usize]) -> Result<Self> {
        let solver = FdSolver::new(spec, sgrid, tgrid)?;
        sgrid.locate(x0)?;
        let mut comps = components.to_vec();
        comps.sort_unstable();
        comps.dedup();
        let output_len = comps.len() * tgrid.steps();
        Ok(Self { solver, x0, components: comps, output_len })
    }
}

impl ForwardMap for FdObservationMap {
    fn output_len(&self) -> usize {
        self.output_len
    }

    fn evaluate(&self, rho: &TemporalSignal) -> Result<Vec<f64>> {
        observe(&self.solver.solve(rho)?, self.x0, &self.components)
    }
}

/// w = A·vec(ρ), with ρ flattened component-major over all time nodes.
#[derive(Debug, Clone)]
pub struct LinearMap {
    matrix: DMatrix<f64>,
}

impl LinearMap {
    pub fn new(matrix: DMatrix<f64>) -> Self {
        Self { matrix }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }
}

impl ForwardMap for LinearMap {
    fn output_len(&self) -> usize {
        self.matrix.nrows()
    }

    fn evaluate(&self, rho: &TemporalSignal) -> Result<Vec<f64>> {
        let x = DVector::from_vec(rho.flat());
        if x.len() != self.matrix.ncols() {
            return Err(Error::input(format!("linear map expects {} inputs, got {}", self.matrix.ncols(), x.len())));
        }
        Ok((&self.matrix * x).as_slice().to_vec())
    }
}
