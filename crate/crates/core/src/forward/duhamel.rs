//! Numerical checks of the fractional Duhamel representations.
//!
//! Scalar form (one component): J^{1-α} u(t) = ∫₀ᵗ v(t; s) ds where v(·; s)
//! solves the homogeneous problem from time s with initial value F(s).
//!
//! Coupled form: u(t) = ∫₀ᵗ v(t; s) ds with initial value D^{1-α} F(s),
//! applied componentwise.
//!
//! The homogeneous solves are shifted copies of one another on a uniform
//! grid, and they are linear in the initial value. Since F = G(x) ρ(t), the
//! family v(·; s) is assembled from one solve per nonzero entry of G.
//!
//! The left side always comes from the finite-difference solver. The
//! homogeneous solves on the right go through the spectral solver by
//! default, or through the finite-difference solver on request.

use super::expr::Expr;
use super::fd::FdSolver;
use super::space::SpaceGrid;
use super::spectral::{solve_spectral, SpectralOptions};
use super::system::{StateField, SystemSpec, TemporalSignal};
use crate::error::{Error, Result};
use crate::fraccalc::rl::rl_integral_slice;
use crate::fraccalc::TimeGrid;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DuhamelForm {
    Scalar,
    Coupled,
}

/// Solver used for the homogeneous problems v(·; s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HomogeneousSolver {
    FiniteDifference,
    Spectral(SpectralOptions),
}

impl Default for HomogeneousSolver {
    fn default() -> Self {
        HomogeneousSolver::Spectral(SpectralOptions { modes: 128, ..SpectralOptions::default() })
    }
}

/// max |lhs - rhs| / max |lhs| over all interior nodes and t_j, j ≥ 1.
/// `s_samples` is the number of trapezoidal panels in s and must divide Nt.
pub fn duhamel_check(
    spec: &SystemSpec,
    source: &TemporalSignal,
    sgrid: SpaceGrid,
    tgrid: TimeGrid,
    form: DuhamelForm,
    s_samples: usize,
) -> Result<f64> {
    duhamel_check_with(spec, source, sgrid, tgrid, form, s_samples, HomogeneousSolver::default())
}

/// [`duhamel_check`] with an explicit solver for the right-hand side.
pub fn duhamel_check_with(
    spec: &SystemSpec,
    source: &TemporalSignal,
    sgrid: SpaceGrid,
    tgrid: TimeGrid,
    form: DuhamelForm,
    s_samples: usize,
    homogeneous: HomogeneousSolver,
) -> Result<f64> {
    let k = spec.components();
    let nt = tgrid.steps();
    if s_samples == 0 || !nt.is_multiple_of(s_samples) {
        return Err(Error::param(format!("s_samples = {s_samples} must divide the step count {nt}")));
    }
    let stride = nt / s_samples;
    if form == DuhamelForm::Scalar && k != 1 {
        return Err(Error::config("the scalar Duhamel identity needs a single component"));
    }
    if form == DuhamelForm::Coupled {
        let scale = source.values().iter().flatten().fold(0.0_f64, |m, v| m.max(v.abs()));
        for (l, rho) in source.values().iter().enumerate() {
            if rho[0].abs() > 1e-12 * scale.max(f64::MIN_POSITIVE) {
                return Err(Error::config(format!(
                    "coupled Duhamel identity needs F(0) = 0, but rho_{}(0) = {}",
                    l + 1,
                    rho[0]
                )));
            }
        }
    }
    let solver = FdSolver::new(spec, sgrid, tgrid)?;
    let zero_init = vec![vec![0.0; sgrid.interior_count()]; k];
    let u = solver.solve_with_initial(Some(source), &zero_init)?;

    // time factors multiplying each basis solve, per (row k, column ℓ) of G
    let dt = tgrid.dt();
    let xs = sgrid.interior_nodes();
    let mut basis: Vec<(StateField, Vec<f64>)> = Vec::new();
    for p in 0..k {
        for q in 0..k {
            let e = spec.source_entry(p, q);
            if e.is_zero_literal() {
                continue;
            }
            let mut init = zero_init.clone();
            init[p] = xs.iter().map(|&x| e.at_x(x)).collect();
            if init[p].iter().all(|&v| v == 0.0) {
                continue;
            }
            let factor = match form {
                DuhamelForm::Scalar => source.component(q).to_vec(),
                // μ = J^α ρ; its backward differences are D^{1-α}ρ on each panel
                DuhamelForm::Coupled => rl_integral_slice(spec.alpha()[p], dt, source.component(q)),
            };
            let v = match homogeneous {
                HomogeneousSolver::FiniteDifference => solver.solve_homogeneous(&init)?,
                HomogeneousSolver::Spectral(opts) => {
                    let mut g0 = vec![Expr::zero(); k];
                    g0[p] = e.clone();
                    let sys = spec.clone().with_initial(g0)?;
                    solve_spectral(&sys, tgrid, None, &opts)?.to_field(sgrid)
                }
            };
            basis.push((v, factor));
        }
    }

    let ds = dt * stride as f64;
    let mut max_lhs = 0.0_f64;
    let mut max_diff = 0.0_f64;
    let mut rhs = vec![0.0; tgrid.len()];
    for p in 0..k {
        for i in 1..sgrid.steps() {
            let trace = u.trace(p, i);
            let lhs = match form {
                DuhamelForm::Scalar => rl_integral_slice(1.0 - spec.alpha()[0], dt, &trace),
                DuhamelForm::Coupled => trace,
            };
            rhs.iter_mut().for_each(|r| *r = 0.0);
            for (v, factor) in &basis {
                for j in (stride..=nt).step_by(stride) {
                    let last = j / stride;
                    let mut acc = 0.0;
                    // v(t; s) has an initial layer as s -> t, so the panel
                    // touching s = t takes v from its far end
                    match form {
                        DuhamelForm::Scalar => {
                            for m in 0..last {
                                let s_idx = m * stride;
                                let w = if m == 0 { 0.5 } else { 1.0 };
                                acc += w * factor[s_idx] * v.value(p, i, j - s_idx);
                            }
                            acc += 0.5 * factor[j] * v.value(p, i, stride);
                            acc *= ds;
                        }
                        DuhamelForm::Coupled => {
                            // D^{1-α}F constant per panel
                            for m in 1..=last {
                                let (a, b) = ((m - 1) * stride, m * stride);
                                let vm = if m == last {
                                    v.value(p, i, j - a)
                                } else {
                                    0.5 * (v.value(p, i, j - a) + v.value(p, i, j - b))
                                };
                                acc += vm * (factor[b] - factor[a]);
                            }
                        }
                    }
                    rhs[j] += acc;
                }
            }
            for j in (stride..=nt).step_by(stride) {
                max_lhs = max_lhs.max(lhs[j].abs());
                max_diff = max_diff.max((lhs[j] - rhs[j]).abs());
            }
        }
    }
    if max_lhs == 0.0 {
        return Ok(if max_diff == 0.0 { 0.0 } else { f64::INFINITY });
    }
    Ok(max_diff / max_lhs)
}
