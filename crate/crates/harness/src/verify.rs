//! Invariant suites run from the command line.

use crate::error::{HarnessError, HarnessResult, Staged};
use crate::format::num;
use crate::registry::lookup;
use nalgebra::DMatrix;
use serde_json::{json, Value};
use subdiff::forward::{
    direct_estimate, duhamel_check, observe, positivity_check, solve_fd, solve_spectral, DuhamelForm, Expr, SpaceGrid,
    SpectralOptions, SystemSpec, TemporalSignal,
};
use subdiff::fraccalc::{caputo_l1, gamma, mittag_leffler, rl_integral, GridFunction, TimeGrid};
use subdiff::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    AtMost,
    Above,
    AtLeast,
}

impl Relation {
    fn symbol(self) -> &'static str {
        match self {
            Relation::AtMost => "<=",
            Relation::Above => ">",
            Relation::AtLeast => ">=",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub relation: Relation,
    pub pass: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, value: f64, relation: Relation, tolerance: f64) -> Self {
        let pass = match relation {
            Relation::AtMost => value <= tolerance,
            Relation::Above => value > tolerance,
            Relation::AtLeast => value >= tolerance,
        };
        Self { name: name.into(), value, tolerance, relation, pass }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "value": num(self.value),
            "relation": self.relation.symbol(),
            "tolerance": num(self.tolerance),
            "pass": self.pass,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Fraccalc,
    Structural,
    CrossSolver,
    Positivity,
    Duhamel,
    DirectEstimator,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 7] =
        ["fraccalc", "structural", "cross-solver", "positivity", "duhamel", "direct-estimator", "all"];

    pub fn parse(s: &str) -> HarnessResult<Self> {
        Ok(match s {
            "fraccalc" => Suite::Fraccalc,
            "structural" => Suite::Structural,
            "cross-solver" => Suite::CrossSolver,
            "positivity" => Suite::Positivity,
            "duhamel" => Suite::Duhamel,
            "direct-estimator" => Suite::DirectEstimator,
            "all" => Suite::All,
            _ => {
                return Err(HarnessError::validation(
                    "verify",
                    format!("unknown suite '{s}'; valid suites: {}", Self::NAMES.join(", ")),
                ))
            }
        })
    }

    pub fn name(self) -> &'static str {
        Self::NAMES[self as usize]
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub suite: Suite,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "suite": self.suite.name(),
            "pass": self.pass(),
            "checks": self.checks.iter().map(Check::to_json).collect::<Vec<_>>(),
        })
    }
}

pub fn run_suite(suite: Suite) -> HarnessResult<Report> {
    let checks = match suite {
        Suite::Fraccalc => fraccalc()?,
        Suite::Structural => structural()?,
        Suite::CrossSolver => cross_solver()?,
        Suite::Positivity => positivity()?,
        Suite::Duhamel => duhamel()?,
        Suite::DirectEstimator => direct_estimator()?,
        Suite::All => {
            let mut all = Vec::new();
            for s in [Suite::Fraccalc, Suite::Structural, Suite::CrossSolver, Suite::Positivity, Suite::Duhamel, Suite::DirectEstimator]
            {
                all.extend(run_suite(s)?.checks);
            }
            all
        }
    };
    Ok(Report { suite, checks })
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn rel_l2(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    let den: f64 = b.iter().map(|y| y * y).sum();
    (num / den).sqrt()
}

fn linspace(a: f64, b: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| a + (b - a) * i as f64 / (n - 1) as f64)
}

fn exprs(src: &[&str]) -> HarnessResult<Vec<Expr>> {
    src.iter().map(|s| Expr::parse(s).stage("verify")).collect()
}

fn grid_fn(g: &TimeGrid, f: impl Fn(f64) -> f64) -> HarnessResult<GridFunction> {
    GridFunction::from_fn(*g, f).stage("verify")
}

/// Mittag-Leffler identities and the fractional-calculus rules.
pub fn fraccalc() -> HarnessResult<Vec<Check>> {
    let ml = |b: f64, g: f64, z: f64| mittag_leffler(b, g, z).stage("verify");
    let mut out = Vec::new();

    let mut worst = 0.0_f64;
    for x in linspace(-5.0, 5.0, 101) {
        worst = worst.max((ml(1.0, 1.0, x)? - x.exp()).abs());
    }
    out.push(Check::new("mittag_leffler.exp", worst, Relation::AtMost, 1e-10));

    let mut worst = 0.0_f64;
    for x in linspace(0.0, 10.0, 101) {
        worst = worst.max((ml(2.0, 1.0, -x * x)? - x.cos()).abs());
    }
    out.push(Check::new("mittag_leffler.cos", worst, Relation::AtMost, 1e-10));

    let mut worst = 0.0_f64;
    for i in 0..=15 {
        let b = 0.15 + 0.05 * i as f64;
        for g in [b, 1.0, b + 1.0] {
            worst = worst.max((ml(b, g, 0.0)? - 1.0 / gamma(g)).abs());
        }
    }
    out.push(Check::new("mittag_leffler.origin", worst, Relation::AtMost, 1e-12));

    let g = TimeGrid::new(1.0, 1000).stage("verify")?;
    let tol = 10.0 * g.dt() * g.dt();
    let nodes = g.nodes();

    let f = grid_fn(&g, |t| (3.0 * t).sin() - 1.5 * t * t)?;
    let twice = rl_integral(0.5, &rl_integral(0.5, &f).stage("verify")?).stage("verify")?;
    let once = rl_integral(1.0, &f).stage("verify")?;
    out.push(Check::new("semigroup.half_half", max_diff(twice.values(), once.values()), Relation::AtMost, tol));

    let mut worst = 0.0_f64;
    for beta in [0.3, 0.5, 0.7, 1.2] {
        for gam in [1.0, 1.3, 1.6, 2.0] {
            let j = rl_integral(beta, &grid_fn(&g, |t: f64| t.powf(gam))?).stage("verify")?;
            let c = gamma(gam + 1.0) / gamma(gam + beta + 1.0);
            let exact: Vec<f64> = nodes.iter().map(|t| c * t.powf(gam + beta)).collect();
            worst = worst.max(max_diff(j.values(), &exact));
        }
    }
    out.push(Check::new("power_law.max_error", worst, Relation::AtMost, tol));

    let alpha = 0.5;
    let lin = caputo_l1(alpha, &grid_fn(&g, |t| t)?).stage("verify")?;
    let exact: Vec<f64> = nodes.iter().map(|t| t.powf(1.0 - alpha) / gamma(2.0 - alpha)).collect();
    out.push(Check::new("caputo_l1.linear", max_diff(lin.values(), &exact), Relation::AtMost, 1e-12));

    let quad_err = |steps: usize| -> HarnessResult<f64> {
        let g = TimeGrid::new(1.0, steps).stage("verify")?;
        let d = caputo_l1(alpha, &grid_fn(&g, |t| t * t)?).stage("verify")?;
        let exact: Vec<f64> = g.nodes().iter().map(|t| 2.0 * t.powf(2.0 - alpha) / gamma(3.0 - alpha)).collect();
        Ok(max_diff(d.values(), &exact))
    };
    let order = (quad_err(500)? / quad_err(1000)?).log2();
    out.push(Check::new("caputo_l1.order_quadratic", order, Relation::AtLeast, 1.4));
    Ok(out)
}

/// J^{α_k} ρ_k = t² for the single-component study sources.
pub fn structural() -> HarnessResult<Vec<Check>> {
    let g = TimeGrid::new(1.0, 100).stage("verify")?;
    let sq: Vec<f64> = g.nodes().iter().map(|t| t * t).collect();
    let mut out = Vec::new();
    for (k, (alpha, p)) in [(0.7, 1.3), (0.4, 1.6)].into_iter().enumerate() {
        let rho = grid_fn(&g, |t: f64| 2.0 / gamma(p + 1.0) * t.powf(p))?;
        let mu = rl_integral(alpha, &rho).stage("verify")?;
        out.push(Check::new(format!("structural.rho{}", k + 1), max_diff(mu.values(), &sq), Relation::AtMost, 1e-3));
    }
    Ok(out)
}

/// Observed FD traces at x₀ on an n-step grid, restricted to every r-th node.
fn fd_traces(spec: &SystemSpec, rho: &[Expr], x0: f64, n: usize, r: usize) -> HarnessResult<Vec<f64>> {
    let sg = SpaceGrid::new(n * r).stage("verify")?;
    let tg = TimeGrid::new(1.0, n * r).stage("verify")?;
    let src = TemporalSignal::from_exprs(tg, rho).stage("verify")?;
    let comps: Vec<usize> = (0..spec.components()).collect();
    let y = observe(&solve_fd(spec, sg, tg, &src, None).stage("verify")?, x0, &comps).stage("verify")?;
    Ok(y.chunks(n * r).flat_map(|b| (1..=n).map(move |i| b[i * r - 1])).collect())
}

/// Finite differences against the spectral solver at Δ = 0.01 with 64 modes.
pub fn cross_solver() -> HarnessResult<Vec<Check>> {
    let mut out = Vec::new();
    for name in ["ex5_2", "ex5_4_k3"] {
        let sc = lookup(name)?;
        let spec = sc.system_spec()?;
        let rho = sc.truth_exprs()?;
        let x0 = sc.observation.x0;
        let tg = TimeGrid::new(1.0, 100).stage("verify")?;
        let src = TemporalSignal::from_exprs(tg, &rho).stage("verify")?;
        let sol = solve_spectral(&spec, tg, Some(&src), &SpectralOptions { modes: 64, ..SpectralOptions::default() })
            .stage("verify")?;
        let reference: Vec<f64> = (0..spec.components()).flat_map(|k| sol.trace(k, x0).into_iter().skip(1)).collect();
        let e1 = rel_l2(&fd_traces(&spec, &rho, x0, 100, 1)?, &reference);
        let e2 = rel_l2(&fd_traces(&spec, &rho, x0, 100, 2)?, &reference);
        out.push(Check::new(format!("cross_solver.{name}.rel_l2"), e1, Relation::AtMost, 1e-3));
        out.push(Check::new(format!("cross_solver.{name}.halving_ratio"), e1 / e2, Relation::Above, 1.6));
    }
    Ok(out)
}

pub fn positivity() -> HarnessResult<Vec<Check>> {
    let sg = SpaceGrid::new(100).stage("verify")?;
    let tg = TimeGrid::new(1.0, 100).stage("verify")?;
    let zero = exprs(&["0", "0"])?;
    let cooperative = DMatrix::from_row_slice(2, 2, &[3.0, -1.0, -1.0, 3.0]);
    let mutual = SystemSpec::diagonal(vec![0.7, 0.4], cooperative, zero.clone())
        .stage("verify")?
        .with_initial(exprs(&["sin(pi*x)", "sin(pi*x)"])?)
        .stage("verify")?;
    let one_way = DMatrix::from_row_slice(2, 2, &[3.0, 0.0, -1.0, 3.0]);
    let one_way_sys = SystemSpec::diagonal(vec![0.7, 0.4], one_way, zero)
        .stage("verify")?
        .with_initial(exprs(&["sin(pi*x)", "0"])?)
        .stage("verify")?;

    let c = positivity_check(&mutual, sg, tg, 0).stage("verify")?;
    let t = positivity_check(&one_way_sys, sg, tg, 1).stage("verify")?;
    let weak = positivity_check(&one_way_sys, sg, tg, 0).stage("verify")?;
    Ok(vec![
        Check::new("positivity.cooperative_min", c.min_value, Relation::Above, 0.0),
        Check::new("positivity.one_way_min", t.min_value, Relation::Above, 0.0),
        Check::new("positivity.weak_maximum", weak.min_value.min(c.min_value), Relation::AtLeast, -1e-10),
    ])
}

pub fn duhamel() -> HarnessResult<Vec<Check>> {
    let sg = SpaceGrid::new(100).stage("verify")?;
    let tg = TimeGrid::new(1.0, 100).stage("verify")?;
    let scalar = SystemSpec::diagonal(vec![0.5], DMatrix::zeros(1, 1), exprs(&["sin(pi*x)"])?).stage("verify")?;
    let src = TemporalSignal::from_exprs(tg, &exprs(&["t"])?).stage("verify")?;
    let rs = duhamel_check(&scalar, &src, sg, tg, DuhamelForm::Scalar, 100).stage("verify")?;

    let sc = lookup("ex5_3_obs1")?;
    let coupled = sc.system_spec()?;
    let rho = TemporalSignal::from_exprs(tg, &sc.truth_exprs()?).stage("verify")?;
    let rc = duhamel_check(&coupled, &rho, sg, tg, DuhamelForm::Coupled, 100).stage("verify")?;
    Ok(vec![
        Check::new("duhamel.scalar", rs, Relation::AtMost, 5e-2),
        Check::new("duhamel.coupled", rc, Relation::AtMost, 5e-2),
    ])
}

/// Pointwise inversion of noise-free FD data, and rejection of a singular G(x₀).
pub fn direct_estimator() -> HarnessResult<Vec<Check>> {
    let mut out = Vec::new();
    let sc = lookup("ex5_2")?;
    let spec = sc.system_spec()?;
    let tg = sc.time_grid()?;
    let truth = sc.truth_signal()?;
    let u = solve_fd(&spec, sc.space_grid()?, tg, &truth, None).stage("verify")?;
    let est = direct_estimate(&u, &spec, sc.observation.x0).stage("verify")?;
    for k in 0..spec.components() {
        let e = rel_l2(est.component(k), truth.component(k));
        out.push(Check::new(format!("direct.ex5_2.rho{}", k + 1), e, Relation::AtMost, 5e-2));
    }

    let deg = lookup("ex5_1_caseA")?;
    let dspec = deg.system_spec()?;
    let du = solve_fd(&dspec, deg.space_grid()?, deg.time_grid()?, &deg.truth_signal()?, None).stage("verify")?;
    let rejected = matches!(direct_estimate(&du, &dspec, deg.observation.x0), Err(Error::DegenerateConfiguration(_)));
    out.push(Check::new("direct.ex5_1_caseA.rejected", rejected as u8 as f64, Relation::AtLeast, 1.0));
    Ok(out)
}
