//! Scenario records: everything needed to reproduce one inversion study.

use crate::error::{HarnessError, HarnessResult, Staged};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use subdiff::forward::{Expr, SpaceGrid, SystemSpec, TemporalSignal};
use subdiff::fraccalc::TimeGrid;
use subdiff::irekm::{IrekmConfig, NoiseModel, NuRule};
use subdiff::prior::{ComponentPrior, PriorSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub system: SystemSection,
    #[serde(default)]
    pub grid: GridSection,
    pub truth: TruthSection,
    pub observation: ObservationSection,
    pub noise: NoiseSection,
    pub prior: PriorSection,
    #[serde(default)]
    pub irekm: IrekmSection,
    #[serde(default)]
    pub seeds: Seeds,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    pub alpha: Vec<f64>,
    /// Diagonal of G(x); ignored when `source` is given.
    #[serde(default)]
    pub g: Vec<String>,
    /// Full K×K matrix G(x), row-major.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<Vec<Vec<String>>>,
    /// Coupling matrix C; the K+1 / -1 pattern when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coupling: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub horizon: f64,
    pub time_steps: usize,
    pub space_steps: usize,
    /// Data are synthesized on a grid refined by this factor in t and x.
    pub data_refinement: usize,
}

impl Default for GridSection {
    fn default() -> Self {
        Self { horizon: 1.0, time_steps: 100, space_steps: 100, data_refinement: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruthSection {
    pub rho: Vec<String>,
    /// Replace ρ† by its projection onto the prior's KL family.
    #[serde(default)]
    pub project_onto_prior: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservationSection {
    pub x0: f64,
    /// Observed components, 1-based.
    pub components: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum DeltaMode {
    /// δ from the realized noise draw.
    #[default]
    Realized,
    /// δ = √m.
    Expected,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSection {
    /// Level used by a single inversion.
    pub sigma: f64,
    /// Levels swept by an experiment.
    #[serde(default)]
    pub levels: Vec<f64>,
    #[serde(default)]
    pub delta: DeltaMode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriorSection {
    pub means: Vec<String>,
    pub amplitude: f64,
    pub smoothness: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modes: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IrekmSection {
    pub ensemble_size: usize,
    pub nu0: f64,
    pub xi: f64,
    /// Discrepancy factor; just above 1/ξ when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    pub max_iterations: usize,
    pub nu_doublings: usize,
    pub nu_rule: String,
    pub warm_start: bool,
}

impl Default for IrekmSection {
    fn default() -> Self {
        let d = IrekmConfig::default();
        Self {
            ensemble_size: d.ensemble_size,
            nu0: d.nu0,
            xi: d.xi,
            tau: None,
            max_iterations: d.max_iterations,
            nu_doublings: d.nu_doublings,
            nu_rule: d.nu_rule.name().into(),
            warm_start: d.warm_start,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[derive(Default)]
pub struct Seeds {
    pub ensemble: u64,
    pub noise: u64,
}


const STAGE: &str = "scenario";

fn parse_all(src: &[String], what: &str) -> HarnessResult<Vec<Expr>> {
    src.iter()
        .enumerate()
        .map(|(i, s)| Expr::parse(s).map_err(|e| HarnessError::validation(STAGE, format!("{what}[{}]: {e}", i + 1))))
        .collect()
}

/// c_kk = K + 1, c_kl = -1.
pub fn standard_coupling(k: usize) -> Vec<Vec<f64>> {
    (0..k).map(|a| (0..k).map(|b| if a == b { k as f64 + 1.0 } else { -1.0 }).collect()).collect()
}

impl ScenarioSpec {
    pub fn components(&self) -> usize {
        self.system.alpha.len()
    }

    pub fn validate(&self) -> HarnessResult<()> {
        let k = self.components();
        let bad = |m: String| Err(HarnessError::validation(STAGE, m));
        if k == 0 {
            return bad("at least one component is required".into());
        }
        let sizes = [
            ("system.g", if self.system.source.is_some() { k } else { self.system.g.len() }),
            ("truth.rho", self.truth.rho.len()),
            ("prior.means", self.prior.means.len()),
        ];
        for (what, n) in sizes {
            if n != k {
                return bad(format!("{what} has {n} entries, expected {k}"));
            }
        }
        if self.grid.data_refinement == 0 {
            return bad("grid.data_refinement must be at least 1".into());
        }
        if !(self.noise.sigma > 0.0) || self.noise.levels.iter().any(|s| !(*s > 0.0)) {
            return bad("noise levels must be positive".into());
        }
        if self.observation.components.is_empty()
            || self.observation.components.iter().any(|&c| c == 0 || c > k)
        {
            return bad(format!("observation.components must be 1-based indices in 1..={k}"));
        }
        self.system_spec()?;
        self.time_grid()?;
        let sgrid = self.space_grid()?;
        let i = sgrid.locate(self.observation.x0).stage(STAGE)?;
        if (sgrid.node(i) - self.observation.x0).abs() > 1e-9 * sgrid.dx() {
            return bad(format!("observation point {} is not a node of the spatial grid", self.observation.x0));
        }
        self.truth_exprs()?;
        self.prior_spec()?;
        self.irekm_config()?.validate().stage(STAGE)?;
        Ok(())
    }

    pub fn time_grid(&self) -> HarnessResult<TimeGrid> {
        TimeGrid::new(self.grid.horizon, self.grid.time_steps).stage(STAGE)
    }

    pub fn space_grid(&self) -> HarnessResult<SpaceGrid> {
        SpaceGrid::new(self.grid.space_steps).stage(STAGE)
    }

    pub fn coupling(&self) -> Vec<Vec<f64>> {
        self.system.coupling.clone().unwrap_or_else(|| standard_coupling(self.components()))
    }

    pub fn system_spec(&self) -> HarnessResult<SystemSpec> {
        let k = self.components();
        let c = self.coupling();
        if c.len() != k || c.iter().any(|r| r.len() != k) {
            return Err(HarnessError::validation(STAGE, format!("coupling must be {k}×{k}")));
        }
        let cm = DMatrix::from_fn(k, k, |a, b| c[a][b]);
        let spec = match &self.system.source {
            Some(rows) => {
                let parsed = rows.iter().map(|r| parse_all(r, "system.source")).collect::<HarnessResult<Vec<_>>>()?;
                SystemSpec::new(self.system.alpha.clone(), cm, parsed).stage(STAGE)?
            }
            None => SystemSpec::diagonal(self.system.alpha.clone(), cm, parse_all(&self.system.g, "system.g")?)
                .stage(STAGE)?,
        };
        match &self.system.initial {
            Some(init) => spec.with_initial(parse_all(init, "system.initial")?).stage(STAGE),
            None => Ok(spec),
        }
    }

    pub fn truth_exprs(&self) -> HarnessResult<Vec<Expr>> {
        parse_all(&self.truth.rho, "truth.rho")
    }

    /// 0-based observed components.
    pub fn observed(&self) -> Vec<usize> {
        self.observation.components.iter().map(|c| c - 1).collect()
    }

    pub fn prior_spec(&self) -> HarnessResult<PriorSpec> {
        self.prior_on(self.time_grid()?, self.prior.modes)
    }

    pub(crate) fn prior_on(&self, grid: TimeGrid, modes: Option<usize>) -> HarnessResult<PriorSpec> {
        let means = parse_all(&self.prior.means, "prior.means")?;
        let comps = means
            .into_iter()
            .map(|m| {
                let c = ComponentPrior::new(m, self.prior.amplitude, self.prior.smoothness).stage(STAGE)?;
                match modes {
                    Some(n) => c.with_modes(n).stage(STAGE),
                    None => Ok(c),
                }
            })
            .collect::<HarnessResult<Vec<_>>>()?;
        PriorSpec::new(comps, grid).stage(STAGE)
    }

    pub fn irekm_config(&self) -> HarnessResult<IrekmConfig> {
        let s = &self.irekm;
        Ok(IrekmConfig {
            xi: s.xi,
            tau: s.tau.unwrap_or_else(|| IrekmConfig::default_tau(s.xi)),
            nu0: s.nu0,
            ensemble_size: s.ensemble_size,
            max_iterations: s.max_iterations,
            nu_doublings: s.nu_doublings,
            nu_rule: NuRule::parse(&s.nu_rule).stage(STAGE)?,
            warm_start: s.warm_start,
            seed: self.seeds.ensemble,
        })
    }

    pub fn noise_model(&self, sigma: f64) -> HarnessResult<NoiseModel> {
        NoiseModel::new(sigma).stage(STAGE)
    }

    /// Noise levels an experiment sweeps.
    pub fn sweep_levels(&self) -> Vec<f64> {
        if self.noise.levels.is_empty() {
            vec![self.noise.sigma]
        } else {
            self.noise.levels.clone()
        }
    }

    /// The truth on the inversion grid, projected when requested.
    pub fn truth_signal(&self) -> HarnessResult<TemporalSignal> {
        self.truth_on(self.time_grid()?)
    }

    /// The truth sampled on `grid`, which may be a refinement of the
    /// inversion grid.
    pub fn truth_on(&self, grid: TimeGrid) -> HarnessResult<TemporalSignal> {
        let exact = TemporalSignal::from_exprs(grid, &self.truth_exprs()?).stage(STAGE)?;
        if !self.truth.project_onto_prior {
            return Ok(exact);
        }
        let coarse = self.time_grid()?;
        let prior = self.prior_spec()?;
        let on_coarse = TemporalSignal::from_exprs(coarse, &self.truth_exprs()?).stage(STAGE)?;
        let coef = prior.project(&on_coarse).stage(STAGE)?;
        let modes: Vec<usize> = (0..self.components()).map(|k| prior.modes(k)).collect();
        let fine = self.prior_on(grid, Some(modes[0]))?;
        if modes.iter().any(|&m| m != modes[0]) {
            return Err(HarnessError::validation(STAGE, "projected truth needs equal KL truncation per component"));
        }
        fine.synthesize(&coef).stage(STAGE)
    }

    /// det G(x₀).
    pub fn source_determinant(&self) -> HarnessResult<f64> {
        Ok(self.system_spec()?.source_matrix(self.observation.x0).determinant())
    }

    pub fn is_degenerate(&self) -> HarnessResult<bool> {
        Ok(self.source_determinant()?.abs() < 1e-12)
    }

    pub fn from_toml(text: &str) -> HarnessResult<Self> {
        let spec: Self = toml::from_str(text).map_err(|e| HarnessError::validation("config", e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario serializes")
    }
}
