//! synthesize → prior ensemble → iteration → metrics → artifacts.

use crate::error::{HarnessError, HarnessResult, Staged};
use crate::format::{json_text, normalize_floats, num, sci};
use crate::scenario::ScenarioSpec;
use crate::synth::{synthesize_data, SyntheticData};
use serde_json::{json, Value};
use std::fs;
use std::path::{Path, PathBuf};
use subdiff::forward::{ResponseMap, TemporalSignal};
use subdiff::irekm::{run, RunOutcome};
use subdiff::prior::initial_ensemble;

/// Environment variable naming the default artifact root.
pub const OUTPUT_ROOT_VAR: &str = "SUBDIFF_OUTPUT_ROOT";

pub fn default_output_root() -> PathBuf {
    std::env::var_os(OUTPUT_ROOT_VAR).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("results"))
}

/// Command-line adjustments applied on top of a scenario.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    /// Replaces the sweep by this single level.
    pub sigma: Option<f64>,
    pub seed: Option<u64>,
    pub noise_seed: Option<u64>,
    pub ensemble_size: Option<usize>,
    pub refine: Option<usize>,
    pub max_iterations: Option<usize>,
}

impl Overrides {
    pub fn apply(&self, mut s: ScenarioSpec) -> HarnessResult<ScenarioSpec> {
        if let Some(sigma) = self.sigma {
            s.noise.sigma = sigma;
            s.noise.levels.clear();
        }
        if let Some(v) = self.seed {
            s.seeds.ensemble = v;
        }
        if let Some(v) = self.noise_seed {
            s.seeds.noise = v;
        }
        if let Some(v) = self.ensemble_size {
            s.irekm.ensemble_size = v;
        }
        if let Some(v) = self.refine {
            s.grid.data_refinement = v;
        }
        if let Some(v) = self.max_iterations {
            s.irekm.max_iterations = v;
        }
        s.validate()?;
        Ok(s)
    }
}

/// The scenario pinned to one noise level, as echoed into the summary.
pub fn at_level(scenario: &ScenarioSpec, sigma: f64) -> ScenarioSpec {
    let mut s = scenario.clone();
    s.noise.sigma = sigma;
    s.noise.levels.clear();
    s
}

#[derive(Debug, Clone)]
pub struct Inversion {
    /// Resolved scenario at the inverted level.
    pub scenario: ScenarioSpec,
    pub data: SyntheticData,
    pub truth: TemporalSignal,
    pub outcome: RunOutcome,
    pub tau: f64,
}

impl Inversion {
    /// Relative errors of the estimate per component, then the stacked one.
    pub fn terminal_errors(&self) -> (Vec<f64>, f64) {
        let m = subdiff::irekm::metrics(&self.outcome.estimate, &self.truth).expect("truth has nonzero components");
        (m.components, m.aggregate)
    }

    pub fn analysis_steps(&self) -> usize {
        self.outcome.history.iter().filter(|r| r.nu.is_some()).count()
    }

    /// Linear solves spent choosing ν: one per doubling plus the accepted one.
    pub fn nu_trials(&self) -> usize {
        self.outcome.history.iter().filter_map(|r| r.nu_doublings).map(|d| d + 1).sum()
    }
}

/// One inversion of `scenario` at its `noise.sigma`.
pub fn invert(scenario: &ScenarioSpec) -> HarnessResult<Inversion> {
    scenario.validate()?;
    let scenario = at_level(scenario, scenario.noise.sigma);
    let spec = scenario.system_spec()?;
    let map = ResponseMap::new(
        &spec,
        scenario.space_grid()?,
        scenario.time_grid()?,
        scenario.observation.x0,
        &scenario.observed(),
    )
    .stage("forward")?;
    let data = synthesize_data(&scenario, scenario.noise.sigma, scenario.seeds.noise)?;
    let truth = scenario.truth_signal()?;
    let prior = scenario.prior_spec()?;
    let config = scenario.irekm_config()?;
    let initial = initial_ensemble(&prior, config.ensemble_size, config.seed).stage("prior")?;
    let noise = scenario.noise_model(scenario.noise.sigma)?;
    let outcome = run(&map, &data.y, data.delta, &noise, initial, &config, Some(&truth)).stage("invert")?;
    Ok(Inversion { scenario, data, truth, outcome, tau: config.tau })
}

/// Artifact directory of one inversion below `root`.
pub fn run_dir(root: &Path, scenario: &ScenarioSpec) -> PathBuf {
    root.join(&scenario.name).join(format!(
        "sigma_{:e}_seed_{}_{}",
        scenario.noise.sigma, scenario.seeds.ensemble, scenario.seeds.noise
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunArtifacts {
    pub dir: PathBuf,
    pub reconstruction: PathBuf,
    pub history: PathBuf,
    pub summary: PathBuf,
    pub converged: bool,
}

fn write_csv(path: &Path, header: Vec<String>, rows: Vec<Vec<String>>) -> HarnessResult<()> {
    let io = |e: csv::Error| HarnessError::io("export", format!("{}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(&header).map_err(io)?;
    for r in rows {
        w.write_record(&r).map_err(io)?;
    }
    w.flush().map_err(|e| HarnessError::io("export", format!("{}: {e}", path.display())))
}

pub fn reconstruction_table(inv: &Inversion) -> (Vec<String>, Vec<Vec<String>>) {
    let k = inv.truth.components();
    let mut header = vec!["t".to_string()];
    header.extend((1..=k).map(|i| format!("truth_{i}")));
    header.extend((1..=k).map(|i| format!("estimate_{i}")));
    let nodes = inv.truth.grid().nodes();
    let rows = nodes
        .iter()
        .enumerate()
        .map(|(j, t)| {
            let mut r = vec![sci(*t)];
            r.extend((0..k).map(|c| sci(inv.truth.component(c)[j])));
            r.extend((0..k).map(|c| sci(inv.outcome.estimate.component(c)[j])));
            r
        })
        .collect();
    (header, rows)
}

pub fn history_table(inv: &Inversion) -> (Vec<String>, Vec<Vec<String>>) {
    let k = inv.truth.components();
    let mut header = vec!["n".to_string(), "R_n".to_string()];
    header.extend((1..=k).map(|i| format!("e_{i}")));
    header.push("E_n".into());
    header.push("nu_n".into());
    let rows = inv
        .outcome
        .history
        .iter()
        .map(|h| {
            let mut r = vec![h.n.to_string(), sci(h.residual)];
            r.extend(h.errors.iter().map(|e| sci(*e)));
            r.push(h.aggregate_error.map(sci).unwrap_or_default());
            r.push(h.nu.map(sci).unwrap_or_default());
            r
        })
        .collect();
    (header, rows)
}

/// Summary with the fixed key set; wall time only when requested.
pub fn summary(inv: &Inversion, wall_time: bool) -> Value {
    let (errs, agg) = inv.terminal_errors();
    let s = &inv.scenario;
    let config = serde_json::to_value(s).expect("scenario serializes");
    let mut timing = json!({
        "forward_evaluations": inv.outcome.forward_evaluations,
        "analysis_steps": inv.analysis_steps(),
        "nu_trials": inv.nu_trials(),
    });
    if wall_time {
        let secs: f64 = inv.outcome.history.iter().map(|h| h.wall_time.as_secs_f64()).sum();
        timing["wall_seconds"] = num(secs);
    }
    json!({
        "scenario": s.name,
        "seeds": { "ensemble": s.seeds.ensemble, "noise": s.seeds.noise },
        "config": normalize_floats(config),
        "iterations": inv.outcome.history.last().map_or(0, |h| h.n),
        "stop_reason": inv.outcome.stop_reason.name(),
        "delta": num(inv.data.delta),
        "tau": num(inv.tau),
        "terminal_errors": {
            "components": errs.into_iter().map(num).collect::<Vec<_>>(),
            "aggregate": num(agg),
            "estimate_iteration": inv.outcome.estimate_iteration,
        },
        "timing": timing,
    })
}

pub fn export(inv: &Inversion, root: &Path, wall_time: bool) -> HarnessResult<RunArtifacts> {
    let dir = run_dir(root, &inv.scenario);
    fs::create_dir_all(&dir).map_err(|e| HarnessError::io("export", format!("{}: {e}", dir.display())))?;
    let reconstruction = dir.join("reconstruction.csv");
    let history = dir.join("history.csv");
    let summary_path = dir.join("summary.json");
    let (h, r) = reconstruction_table(inv);
    write_csv(&reconstruction, h, r)?;
    let (h, r) = history_table(inv);
    write_csv(&history, h, r)?;
    fs::write(&summary_path, json_text(&summary(inv, wall_time)))
        .map_err(|e| HarnessError::io("export", format!("{}: {e}", summary_path.display())))?;
    Ok(RunArtifacts { dir, reconstruction, history, summary: summary_path, converged: inv.outcome.converged() })
}

/// Inverts every level of the scenario's sweep and writes the artifacts.
pub fn run_scenario(scenario: &ScenarioSpec, root: &Path, wall_time: bool) -> HarnessResult<Vec<RunArtifacts>> {
    scenario
        .sweep_levels()
        .into_iter()
        .map(|sigma| {
            let inv = invert(&at_level(scenario, sigma))?;
            export(&inv, root, wall_time)
        })
        .collect()
}

/// Loads a scenario from a TOML file or from the `config` echo of a summary.
pub fn load_config(path: &Path) -> HarnessResult<ScenarioSpec> {
    let text = fs::read_to_string(path).map_err(|e| HarnessError::io("config", format!("{}: {e}", path.display())))?;
    if path.extension().is_some_and(|e| e == "json") {
        let v: Value = serde_json::from_str(&text).map_err(|e| HarnessError::validation("config", e.to_string()))?;
        let cfg = v.get("config").cloned().unwrap_or(v);
        let spec: ScenarioSpec =
            serde_json::from_value(cfg).map_err(|e| HarnessError::validation("config", e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    } else {
        ScenarioSpec::from_toml(&text)
    }
}
