//! Built-in scenarios.

use crate::error::{HarnessError, HarnessResult};
use crate::scenario::*;

fn strings(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

struct Base {
    name: &'static str,
    description: &'static str,
    alpha: &'static [f64],
    g: &'static [&'static str],
    rho: &'static [&'static str],
    means: &'static [&'static str],
    x0: f64,
    observe: &'static [usize],
    levels: &'static [f64],
}

fn build(b: Base) -> ScenarioSpec {
    ScenarioSpec {
        name: b.name.into(),
        description: b.description.into(),
        system: SystemSection {
            alpha: b.alpha.to_vec(),
            g: strings(b.g),
            source: None,
            coupling: None,
            initial: None,
        },
        grid: GridSection::default(),
        truth: TruthSection { rho: strings(b.rho), project_onto_prior: false },
        observation: ObservationSection { x0: b.x0, components: b.observe.to_vec() },
        noise: NoiseSection {
            sigma: b.levels[0],
            levels: if b.levels.len() > 1 { b.levels.to_vec() } else { Vec::new() },
            delta: DeltaMode::Realized,
        },
        prior: PriorSection { means: strings(b.means), amplitude: 100.0, smoothness: 2.0, modes: None },
        irekm: IrekmSection::default(),
        seeds: Seeds::default(),
    }
}

const SIGMAS: &[f64] = &[1e-4, 1e-3, 1e-2];

// Non-degeneracy study: K = 2, α = (0.8, 0.3), x₀ = 0.5, means (1, 0).
const ND_ALPHA: &[f64] = &[0.8, 0.3];
const ND_RHO: &[&str] = &["cos(2*pi*t)", "sin(-pi*t)"];
const ND_MEANS: &[&str] = &["1", "0"];

// Measurement-influence study: α = (0.7, 0.4), g = (eˣ, 2 + x), x₀ = 0.7.
const MI_ALPHA: &[f64] = &[0.7, 0.4];
const MI_G: &[&str] = &["exp(x)", "2 + x"];
const MI_RHO: &[&str] = &["1 + 0.5*ind(t, 0.4, 0.6)", "(t - t^2)*exp(-t^2)"];
const MI_MEANS: &[&str] = &["1", "0"];

// Single-component study: same system, J^{α_k} ρ_k = t² for both k.
const SC_RHO: &[&str] = &["2/gamma(2.3)*t^1.3", "2/gamma(2.6)*t^1.6"];
// Draws are pinned to the mean at both ends, so the mean joins ρ_k(0) = 0 to ρ_k(1).
const SC_MEANS: &[&str] = &["2/gamma(2.3)*t", "2/gamma(2.6)*t"];

/// Every built-in scenario, in a fixed order.
pub fn registry() -> Vec<ScenarioSpec> {
    vec![
        // non-degeneracy study, case A: g₁(0.5) = 0
        build(Base {
            name: "ex5_1_caseA",
            description: "degenerate G(x0): g = (cos(pi x), 2), both components observed",
            alpha: ND_ALPHA,
            g: &["cos(pi*x)", "2"],
            rho: ND_RHO,
            means: ND_MEANS,
            x0: 0.5,
            observe: &[1, 2],
            levels: &[1e-4],
        }),
        // non-degeneracy study, case B: g₂(0.5) = 0
        build(Base {
            name: "ex5_1_caseB",
            description: "degenerate G(x0): g = (2, x - 0.5), both components observed",
            alpha: ND_ALPHA,
            g: &["2", "x - 0.5"],
            rho: ND_RHO,
            means: ND_MEANS,
            x0: 0.5,
            observe: &[1, 2],
            levels: &[1e-4],
        }),
        // non-degeneracy study, identifiable case
        build(Base {
            name: "ex5_2",
            description: "identifiable G(x0): g = (x + 1, 2), three noise levels",
            alpha: ND_ALPHA,
            g: &["x + 1", "2"],
            rho: ND_RHO,
            means: ND_MEANS,
            x0: 0.5,
            observe: &[1, 2],
            levels: SIGMAS,
        }),
        // measurement-influence study
        build(Base {
            name: "ex5_2_obs1",
            description: "measurement influence: observe u1 only",
            alpha: MI_ALPHA,
            g: MI_G,
            rho: MI_RHO,
            means: MI_MEANS,
            x0: 0.7,
            observe: &[1],
            levels: &[1e-4],
        }),
        build(Base {
            name: "ex5_2_obs2",
            description: "measurement influence: observe u2 only",
            alpha: MI_ALPHA,
            g: MI_G,
            rho: MI_RHO,
            means: MI_MEANS,
            x0: 0.7,
            observe: &[2],
            levels: &[1e-4],
        }),
        build(Base {
            name: "ex5_2_obs3",
            description: "measurement influence: observe both components",
            alpha: MI_ALPHA,
            g: MI_G,
            rho: MI_RHO,
            means: MI_MEANS,
            x0: 0.7,
            observe: &[1, 2],
            levels: &[1e-4],
        }),
        // single-component study
        build(Base {
            name: "ex5_3_obs1",
            description: "structural condition with mu = t^2: observe u1 only",
            alpha: MI_ALPHA,
            g: MI_G,
            rho: SC_RHO,
            means: SC_MEANS,
            x0: 0.7,
            observe: &[1],
            levels: &[1e-4],
        }),
        build(Base {
            name: "ex5_3_obs2",
            description: "structural condition with mu = t^2: observe u2 only",
            alpha: MI_ALPHA,
            g: MI_G,
            rho: SC_RHO,
            means: SC_MEANS,
            x0: 0.7,
            observe: &[2],
            levels: &[1e-4],
        }),
        // scalability study, K = 3
        build(Base {
            name: "ex5_4_k3",
            description: "scalability: three components",
            alpha: &[0.8, 0.5, 0.3],
            g: &["exp(-x)", "1 + x^2", "2 + cos(pi*x)"],
            rho: &["-t^2 + t + 1", "abs(2*t - 1)", "cos(4*pi*t)"],
            means: &["1", "1", "1"],
            x0: 0.35,
            observe: &[1, 2, 3],
            levels: SIGMAS,
        }),
        // scalability study, K = 4
        build(Base {
            name: "ex5_4_k4",
            description: "scalability: four components",
            alpha: &[0.9, 0.75, 0.4, 0.15],
            g: &["exp(x)", "2 - x^2", "2 + sin(pi*x)", "4"],
            rho: &["t*exp(1 - t^2)", "1 - abs(2*t - 1)", "sin(3*pi*t)", "t*cos(4*pi*t)"],
            means: &["t", "0", "0", "t"],
            x0: 0.35,
            observe: &[1, 2, 3, 4],
            levels: SIGMAS,
        }),
    ]
}

pub fn names() -> Vec<String> {
    registry().into_iter().map(|s| s.name).collect()
}

pub fn lookup(name: &str) -> HarnessResult<ScenarioSpec> {
    registry().into_iter().find(|s| s.name == name).ok_or_else(|| {
        HarnessError::validation("registry", format!("unknown scenario '{name}'; valid names: {}", names().join(", ")))
    })
}
