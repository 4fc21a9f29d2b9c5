//! Truncated eigenfunction expansion of the mild solution.
//!
//! With λ_n = (nπ)², φ_n = √2 sin(nπx) and h_{k,n}(t) = t^{α_k-1}E_{α_k,α_k}(-λ_n t^{α_k}),
//! every mode obeys the Volterra system
//!
//! ```text
//! u_{k,n} = w_{k,n} - h_{k,n} ∗ (Σ_ℓ c_{kℓ} u_{ℓ,n}),
//! w_{k,n} = E_{α_k,1}(-λ_n t^{α_k}) ĝ₀_{k,n} + h_{k,n} ∗ f_{k,n},
//! ```
//!
//! which is solved by the Picard series u = Σ_m Q^m w. Convolutions use
//! product integration: f piecewise linear, kernel integrated exactly via
//! ∫₀^s h = s^α E_{α,α+1}(-λs^α) and ∫₀^s ∫₀^σ h = s^{α+1} E_{α,α+2}(-λs^α).

use std::f64::consts::{PI, SQRT_2};

use rayon::prelude::*;

use super::space::SpaceGrid;
use super::system::{StateField, SystemSpec, TemporalSignal};
use crate::error::{Error, Result};
use crate::fraccalc::mittag_leffler::eval as ml;
use crate::fraccalc::quad::gauss_legendre;
use crate::fraccalc::{gamma, TimeGrid};

/// How many Picard terms to sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PicardDepth {
    /// Exactly this many applications of Q.
    Fixed(usize),
    /// Stop once the latest term is below `tol` relative to the partial
    /// sum, per mode, but never exceed `cap` terms.
    Auto { tol: f64, cap: usize },
}

impl Default for PicardDepth {
    fn default() -> Self {
        PicardDepth::Auto { tol: 1e-13, cap: 500 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralOptions {
    pub modes: usize,
    pub picard: PicardDepth,
    /// Gauss–Legendre panels for the modal projections of g and g₀.
    pub projection_panels: usize,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        Self { modes: 64, picard: PicardDepth::default(), projection_panels: 256 }
    }
}

/// Modal coefficients u_{k,n}(t_j).
#[derive(Debug, Clone)]
pub struct SpectralSolution {
    tgrid: TimeGrid,
    /// layout [k][n][j]
    coef: Vec<Vec<Vec<f64>>>,
    depth: usize,
}

impl SpectralSolution {
    pub fn components(&self) -> usize {
        self.coef.len()
    }

    pub fn modes(&self) -> usize {
        self.coef.first().map_or(0, Vec::len)
    }

    /// Largest number of Picard terms used by any mode.
    pub fn picard_depth(&self) -> usize {
        self.depth
    }

    pub fn time_grid(&self) -> &TimeGrid {
        &self.tgrid
    }

    pub fn coefficients(&self, k: usize, n: usize) -> &[f64] {
        &self.coef[k][n]
    }

    /// u_k(x, ·) on the time grid.
    pub fn trace(&self, k: usize, x: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.tgrid.len()];
        for (n, c) in self.coef[k].iter().enumerate() {
            let phi = SQRT_2 * (PI * (n + 1) as f64 * x).sin();
            for (o, v) in out.iter_mut().zip(c) {
                *o += phi * v;
            }
        }
        out
    }

    pub fn to_field(&self, sgrid: SpaceGrid) -> StateField {
        let k = self.components();
        let mut field = StateField::zeros(sgrid, self.tgrid, k);
        let xs = sgrid.interior_nodes();
        for p in 0..k {
            let traces: Vec<Vec<f64>> = xs.iter().map(|&x| self.trace(p, x)).collect();
            for j in 0..self.tgrid.len() {
                let s = field.slice_mut(p, j);
                for (i, tr) in traces.iter().enumerate() {
                    s[i] = tr[j];
                }
            }
        }
        field
    }
}

/// Product-integration weights of h ∗ f on a uniform grid:
/// (h ∗ f)(t_j) = Σ_{i<j} left[j-i] f_i + right[j-i] f_{i+1}.
#[derive(Debug, Clone)]
pub(crate) struct ConvWeights {
    left: Vec<f64>,
    right: Vec<f64>,
}

impl ConvWeights {
    pub(crate) fn new(alpha: f64, lambda: f64, tgrid: &TimeGrid) -> Self {
        let dt = tgrid.dt();
        let nt = tgrid.steps();
        let k1 = |s: f64| if s == 0.0 { 0.0 } else { s.powf(alpha) * ml(alpha, alpha + 1.0, -lambda * s.powf(alpha)) };
        let k2 =
            |s: f64| if s == 0.0 { 0.0 } else { s.powf(alpha + 1.0) * ml(alpha, alpha + 2.0, -lambda * s.powf(alpha)) };
        let v1: Vec<f64> = (0..=nt).map(|p| k1(p as f64 * dt)).collect();
        let v2: Vec<f64> = (0..=nt).map(|p| k2(p as f64 * dt)).collect();
        let mut left = vec![0.0; nt + 1];
        let mut right = vec![0.0; nt + 1];
        for p in 1..=nt {
            let d2 = (v2[p] - v2[p - 1]) / dt;
            left[p] = v1[p] - d2;
            right[p] = d2 - v1[p - 1];
        }
        Self { left, right }
    }

    pub(crate) fn apply(&self, f: &[f64], out: &mut [f64]) {
        out[0] = 0.0;
        for j in 1..f.len() {
            let mut s = 0.0;
            for i in 0..j {
                s += self.left[j - i] * f[i] + self.right[j - i] * f[i + 1];
            }
            out[j] = s;
        }
    }
}

fn project(f: impl Fn(f64) -> f64, n: usize, panels: usize) -> f64 {
    let w = PI * n as f64;
    gauss_legendre(|x| f(x) * SQRT_2 * (w * x).sin(), 0.0, 1.0, panels)
}

/// Depth at which the a-priori tail bound (L T^{α_K})^m / Γ(α_K m + 1)
/// drops below `tol`, with L = ‖C‖_∞ max_k Γ(α_k)^{-1} max(1, T^{α_1-α_K}) K.
pub fn majorant_depth(spec: &SystemSpec, horizon: f64, tol: f64) -> usize {
    let c = spec.coupling();
    let k = spec.components();
    let norm = (0..k).map(|r| (0..k).map(|q| c[(r, q)].abs()).sum::<f64>()).fold(0.0, f64::max);
    let al = spec.alpha();
    let (a1, ak) = (al[0], al[k - 1]);
    let inv_g = al.iter().map(|&a| 1.0 / gamma(a)).fold(0.0, f64::max);
    let l = norm * inv_g * 1f64.max(horizon.powf(a1 - ak)) * k as f64;
    if l == 0.0 {
        return 0;
    }
    let base = (l * horizon.powf(ak)).ln();
    (1..100_000)
        .find(|&m| m as f64 * base - crate::fraccalc::ln_gamma(ak * m as f64 + 1.0) < tol.ln())
        .unwrap_or(100_000)
}

/// Spectral solution of the source problem (and/or the system's initial value).
pub fn solve_spectral(
    spec: &SystemSpec,
    tgrid: TimeGrid,
    source: Option<&TemporalSignal>,
    opts: &SpectralOptions,
) -> Result<SpectralSolution> {
    if opts.modes == 0 {
        return Err(Error::param("mode count must be positive"));
    }
    if opts.projection_panels == 0 {
        return Err(Error::param("projection panel count must be positive"));
    }
    if let PicardDepth::Fixed(0) | PicardDepth::Auto { cap: 0, .. } = opts.picard {
        return Err(Error::param("Picard depth must be positive"));
    }
    let k = spec.components();
    if let Some(s) = source {
        if s.grid() != &tgrid || s.components() != k {
            return Err(Error::input("source does not match the time grid or component count"));
        }
    }
    let c = spec.coupling().clone();
    let alpha = spec.alpha().to_vec();
    let nodes = tgrid.nodes();
    let len = tgrid.len();

    let results: Vec<(Vec<Vec<f64>>, usize)> = (1..=opts.modes)
        .into_par_iter()
        .map(|n| {
            let lambda = (PI * n as f64).powi(2);
            let weights: Vec<ConvWeights> = alpha.iter().map(|&a| ConvWeights::new(a, lambda, &tgrid)).collect();
            let mut w = vec![vec![0.0; len]; k];
            let mut buf = vec![0.0; len];
            for p in 0..k {
                let g0 = if spec.initial()[p].is_zero_literal() {
                    0.0
                } else {
                    project(|x| spec.initial()[p].at_x(x), n, opts.projection_panels)
                };
                if g0 != 0.0 {
                    for (wj, &t) in w[p].iter_mut().zip(&nodes) {
                        *wj = g0 * ml(alpha[p], 1.0, -lambda * t.powf(alpha[p]));
                    }
                }
                if let Some(s) = source {
                    let mut f = vec![0.0; len];
                    for q in 0..k {
                        let e = spec.source_entry(p, q);
                        if e.is_zero_literal() {
                            continue;
                        }
                        let gh = project(|x| e.at_x(x), n, opts.projection_panels);
                        for (fj, r) in f.iter_mut().zip(s.component(q)) {
                            *fj += gh * r;
                        }
                    }
                    weights[p].apply(&f, &mut buf);
                    for (wj, b) in w[p].iter_mut().zip(&buf) {
                        *wj += b;
                    }
                }
            }
            let (u, depth) = picard(&w, &weights, &c, opts.picard);
            (u, depth)
        })
        .collect();

    let mut coef = vec![Vec::with_capacity(opts.modes); k];
    let mut depth = 0;
    for (u, d) in results {
        depth = depth.max(d);
        for (p, up) in u.into_iter().enumerate() {
            coef[p].push(up);
        }
    }
    Ok(SpectralSolution { tgrid, coef, depth })
}

fn picard(w: &[Vec<f64>], weights: &[ConvWeights], c: &nalgebra::DMatrix<f64>, depth: PicardDepth) -> (Vec<Vec<f64>>, usize) {
    let k = w.len();
    let len = w[0].len();
    let mut sum = w.to_vec();
    let mut term = w.to_vec();
    let mut mix = vec![0.0; len];
    let (cap, tol) = match depth {
        PicardDepth::Fixed(m) => (m, 0.0),
        PicardDepth::Auto { tol, cap } => (cap, tol),
    };
    let scale = |v: &[Vec<f64>]| v.iter().flatten().fold(0.0_f64, |m, x| m.max(x.abs()));
    if c.iter().all(|&x| x == 0.0) {
        return (sum, 0);
    }
    let mut used = 0;
    for _ in 0..cap {
        let mut next = vec![vec![0.0; len]; k];
        for p in 0..k {
            mix.iter_mut().for_each(|m| *m = 0.0);
            for q in 0..k {
                let cq = c[(p, q)];
                if cq != 0.0 {
                    for (m, t) in mix.iter_mut().zip(&term[q]) {
                        *m -= cq * t;
                    }
                }
            }
            weights[p].apply(&mix, &mut next[p]);
        }
        for p in 0..k {
            for (s, t) in sum[p].iter_mut().zip(&next[p]) {
                *s += t;
            }
        }
        term = next;
        used += 1;
        let (t, s) = (scale(&term), scale(&sum));
        if matches!(depth, PicardDepth::Auto { .. }) && t <= tol * s {
            break;
        }
    }
    (sum, used)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn convolution_mass_matches_closed_form() {
        // ∫₀^T h = T^α E_{α,α+1}(-λT^α) = (1 - E_{α,1}(-λT^α))/λ
        let g = TimeGrid::new(1.0, 50).unwrap();
        let (a, lam) = (0.6, PI * PI);
        let w = ConvWeights::new(a, lam, &g);
        let want = (1.0 - ml(a, 1.0, -lam)) / lam;
        let mut out = vec![0.0; 51];
        w.apply(&[1.0; 51], &mut out);
        assert!((out[50] - want).abs() < 1e-12);
    }

    #[test]
    fn convolution_of_linear_data_is_exact() {
        // with λ = 0, h = t^{α-1}/Γ(α) and h ∗ t = t^{α+1}/Γ(α+2)
        let g = TimeGrid::new(1.0, 20).unwrap();
        let a = 0.4;
        let w = ConvWeights::new(a, 0.0, &g);
        let f = g.nodes();
        let mut out = vec![0.0; f.len()];
        w.apply(&f, &mut out);
        for (o, t) in out.iter().zip(g.nodes()) {
            assert!((o - t.powf(a + 1.0) / gamma(a + 2.0)).abs() < 1e-13);
        }
    }
}
