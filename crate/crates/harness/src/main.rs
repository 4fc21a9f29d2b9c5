use clap::{Args, Parser, Subcommand};
use serde_json::json;
use std::path::PathBuf;
use std::process::ExitCode;
use subdiff_harness::error::{HarnessError, HarnessResult};
use subdiff_harness::experiment::{self, export, invert, load_config, run_scenario, Overrides, OUTPUT_ROOT_VAR};
use subdiff_harness::format::{json_text, num, sci};
use subdiff_harness::registry::{lookup, registry};
use subdiff_harness::scenario::ScenarioSpec;
use subdiff_harness::synth::{clean_observation, synthesize_data};
use subdiff_harness::verify::{run_suite, Suite};

/// Coupled subdiffusion source inversion: forward solves, synthetic data,
/// ensemble Kalman reconstruction and verification suites.
#[derive(Parser)]
#[command(name = "subdiff", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the noise-free observed traces of a scenario as CSV.
    Forward(ScenarioArgs),
    /// Print noise-free and noisy observations as CSV; δ goes to stderr.
    Synthesize(ScenarioArgs),
    /// Invert one noise level and write artifacts.
    Invert(ScenarioArgs),
    /// Invert every noise level of a scenario and write artifacts.
    Experiment(ScenarioArgs),
    /// Run a verification suite and print a JSON report.
    Verify {
        /// fraccalc, structural, cross-solver, positivity, duhamel, direct-estimator or all
        suite: String,
    },
    /// List built-in scenarios.
    List,
}

#[derive(Args)]
struct ScenarioArgs {
    /// Built-in scenario name (see `list`).
    name: Option<String>,
    /// Scenario file: TOML, or a summary.json whose config is reused.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    sigma: Option<f64>,
    /// Ensemble seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    noise_seed: Option<u64>,
    /// Ensemble size.
    #[arg(long)]
    ne: Option<usize>,
    /// Data-grid refinement factor.
    #[arg(long)]
    refine: Option<usize>,
    #[arg(long)]
    max_iter: Option<usize>,
    /// Artifact root directory.
    #[arg(long, env = OUTPUT_ROOT_VAR, default_value = "results")]
    out: PathBuf,
    /// Add wall-clock seconds to the summary timing block.
    #[arg(long)]
    wall_time: bool,
}

impl ScenarioArgs {
    fn resolve(&self) -> HarnessResult<ScenarioSpec> {
        let base = match (&self.config, &self.name) {
            (Some(path), _) => load_config(path)?,
            (None, Some(name)) => lookup(name)?,
            (None, None) => return Err(HarnessError::validation("cli", "give a scenario name or --config")),
        };
        Overrides {
            sigma: self.sigma,
            seed: self.seed,
            noise_seed: self.noise_seed,
            ensemble_size: self.ne,
            refine: self.refine,
            max_iterations: self.max_iter,
        }
        .apply(base)
    }
}

fn print_csv(header: Vec<String>, rows: Vec<Vec<String>>) -> HarnessResult<()> {
    let mut w = csv::Writer::from_writer(std::io::stdout());
    let io = |e: csv::Error| HarnessError::io("output", e);
    w.write_record(&header).map_err(io)?;
    for r in rows {
        w.write_record(&r).map_err(io)?;
    }
    w.flush().map_err(|e| HarnessError::io("output", e))
}

/// Columns t, then one column per observed block of `series`.
fn traces(s: &ScenarioSpec, series: &[(&str, &[f64])]) -> HarnessResult<(Vec<String>, Vec<Vec<String>>)> {
    let nodes = s.time_grid()?.nodes();
    let nt = s.grid.time_steps;
    let mut header = vec!["t".to_string()];
    for (label, _) in series {
        header.extend(s.observation.components.iter().map(|c| format!("{label}_{c}")));
    }
    let rows = (1..=nt)
        .map(|j| {
            let mut r = vec![sci(nodes[j])];
            for (_, v) in series {
                r.extend(v.chunks(nt).map(|b| sci(b[j - 1])));
            }
            r
        })
        .collect();
    Ok((header, rows))
}

fn report_runs(runs: &[experiment::RunArtifacts]) -> HarnessResult<()> {
    for r in runs {
        println!("{}", r.dir.display());
    }
    match runs.iter().find(|r| !r.converged) {
        Some(r) => Err(HarnessError::NotConverged {
            stage: "invert".into(),
            message: format!("discrepancy principle not met within the iteration budget ({})", r.dir.display()),
        }),
        None => Ok(()),
    }
}

fn execute(cli: Cli) -> HarnessResult<()> {
    match cli.command {
        Command::List => {
            for s in registry() {
                let det = s.source_determinant()?;
                println!("{:<12} K={} det_G(x0)={:<10.4e} degenerate={:<5} {}", s.name, s.components(), det, det.abs() < 1e-12, s.description);
            }
            Ok(())
        }
        Command::Forward(a) => {
            let s = a.resolve()?;
            let clean = clean_observation(&s)?;
            let (h, r) = traces(&s, &[("u", &clean)])?;
            print_csv(h, r)
        }
        Command::Synthesize(a) => {
            let s = a.resolve()?;
            let d = synthesize_data(&s, s.noise.sigma, s.seeds.noise)?;
            let (h, r) = traces(&s, &[("clean", &d.clean), ("y", &d.y)])?;
            print_csv(h, r)?;
            eprint!("{}", json_text(&json!({ "sigma": num(d.sigma), "noise_seed": d.noise_seed, "delta": num(d.delta) })));
            Ok(())
        }
        Command::Invert(a) => {
            let s = a.resolve()?;
            let inv = invert(&s)?;
            report_runs(&[export(&inv, &a.out, a.wall_time)?])
        }
        Command::Experiment(a) => {
            let s = a.resolve()?;
            report_runs(&run_scenario(&s, &a.out, a.wall_time)?)
        }
        Command::Verify { suite } => {
            let report = run_suite(Suite::parse(&suite)?)?;
            print!("{}", json_text(&report.to_json()));
            if report.pass() {
                Ok(())
            } else {
                let names: Vec<&str> = report.failures().iter().map(|c| c.name.as_str()).collect();
                Err(HarnessError::Verification(names.join(", ")))
            }
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
