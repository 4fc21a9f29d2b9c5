//! Two-parameter Mittag-Leffler function E_{β,γ}(z) for real arguments.
//!
//! Evaluation strategy:
//!
//! * Power series with compensated summation whenever the cancellation
//!   estimate `eps · Σ|terms| / |Σ terms|` stays below [`SERIES_REL_TOL`].
//!   On the positive axis the series is always used.
//! * On the negative axis with β < 1, the algebraic asymptotic expansion
//!   `-Σ_{m≥1} z^{-m} / Γ(γ - βm)` when its smallest term is negligible.
//! * Otherwise the Hankel-contour representation of the inverse Laplace
//!   transform of `s^{β-γ} / (s^β - z)`, collapsed onto the branch cut
//!   into a real integral, plus the residues of the two poles that reach
//!   the principal sheet when 1 < β ≤ 2. Parameters γ ≥ 1 + β are first
//!   reduced through `E_{β,γ}(z) = (E_{β,γ-β}(z) - 1/Γ(γ-β)) / z`.
//!
//! The switch points are therefore chosen per call from error estimates
//! rather than from a fixed radius.

use std::f64::consts::PI;

use super::gamma::{gamma_sign, ln_gamma, rgamma};
use super::quad::adaptive_gk;
use crate::error::{Error, Result};

/// Acceptance threshold for the estimated relative rounding error of the
/// power series on the negative axis.
const SERIES_REL_TOL: f64 = 1e-12;
/// Acceptance threshold for the truncation error of the asymptotic series.
const ASYMPTOTIC_REL_TOL: f64 = 1e-15;
const MAX_SERIES_TERMS: usize = 20_000;

/// E_{β,γ}(z) = Σ_{m≥0} z^m / Γ(βm + γ).
pub fn mittag_leffler(beta: f64, gamma: f64, z: f64) -> Result<f64> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::param(format!("Mittag-Leffler order beta must be positive, got {beta}")));
    }
    if !gamma.is_finite() {
        return Err(Error::param(format!("Mittag-Leffler parameter gamma must be finite, got {gamma}")));
    }
    if !z.is_finite() {
        return Err(Error::input(format!("Mittag-Leffler argument must be finite, got {z}")));
    }
    Ok(eval(beta, gamma, z))
}

pub(crate) fn eval(beta: f64, gamma: f64, z: f64) -> f64 {
    if z == 0.0 {
        return rgamma(gamma);
    }
    if beta == 1.0 && gamma == 1.0 {
        return z.exp();
    }
    let series = power_series(beta, gamma, z);
    if z > 0.0 {
        return match series {
            SeriesOutcome::Accepted(v) | SeriesOutcome::Cancelled(v) => v,
            SeriesOutcome::Diverged => positive_asymptotic(beta, gamma, z),
        };
    }
    if let SeriesOutcome::Accepted(v) = series {
        return v;
    }
    if beta < 1.0 {
        if let Some(v) = negative_asymptotic(beta, gamma, z) {
            return v;
        }
    }
    if gamma >= 1.0 + beta {
        // downward recurrence in gamma; |z| is not small here
        let lower = eval(beta, gamma - beta, z);
        return (lower - rgamma(gamma - beta)) / z;
    }
    if beta == 1.0 {
        return unit_order(gamma, z);
    }
    if beta <= 2.0 {
        return hankel(beta, gamma, -z);
    }
    // outside the supported range (beta > 2 on the negative axis): the
    // series is the best available answer
    match series {
        SeriesOutcome::Accepted(v) | SeriesOutcome::Cancelled(v) => v,
        SeriesOutcome::Diverged => f64::NAN,
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) enum SeriesOutcome {
    Accepted(f64),
    Cancelled(f64),
    Diverged,
}

/// Power series with Neumaier summation and a rounding-error estimate.
pub(crate) fn power_series(beta: f64, gamma: f64, z: f64) -> SeriesOutcome {
    let az = z.abs();
    let ln_az = az.ln();
    let mut sum = 0.0;
    let mut comp = 0.0;
    let mut abs_sum = 0.0;
    let mut pw = 1.0_f64; // z^m while representable
    let mut use_logs = false;
    let peak = az.powf(1.0 / beta) / beta + 2.0;
    for m in 0..MAX_SERIES_TERMS {
        let arg = beta * m as f64 + gamma;
        let term = if !use_logs && arg < 170.0 {
            pw * rgamma(arg)
        } else {
            use_logs = true;
            let sign = if z < 0.0 && m % 2 == 1 { -1.0 } else { 1.0 };
            let mag = (m as f64 * ln_az - ln_gamma(arg)).exp();
            sign * gamma_sign(arg) * mag
        };
        if !term.is_finite() {
            return SeriesOutcome::Diverged;
        }
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
        abs_sum += term.abs();
        if !use_logs {
            pw *= z;
            if pw.abs() > 1e280 {
                use_logs = true;
            }
        }
        let total = sum + comp;
        if (m as f64) > peak && term.abs() <= 1e-17 * total.abs().max(1e-300) {
            let err = 4.0 * f64::EPSILON * abs_sum;
            return if err <= SERIES_REL_TOL * total.abs() {
                SeriesOutcome::Accepted(total)
            } else {
                SeriesOutcome::Cancelled(total)
            };
        }
        if m > 8 && abs_sum == 0.0 {
            return SeriesOutcome::Accepted(0.0);
        }
    }
    SeriesOutcome::Diverged
}

/// Algebraic asymptotic expansion on the negative axis (0 < β < 1).
///
/// Truncation is judged on the envelope |z|^{-m} Γ(1 - γ + βm)/π of the
/// terms so that accidental near-zeros of 1/Γ do not fake convergence.
pub(crate) fn negative_asymptotic(beta: f64, gamma: f64, z: f64) -> Option<f64> {
    let ln_az = z.abs().ln();
    let inv = 1.0 / z;
    let mut pw = 1.0;
    let mut sum = 0.0;
    let mut prev_env = f64::INFINITY;
    for m in 1..400 {
        pw *= inv;
        let y = gamma - beta * m as f64;
        let env = if y < 0.5 {
            (ln_gamma(1.0 - y) - m as f64 * ln_az).exp() / PI
        } else {
            (pw * rgamma(y)).abs()
        };
        if m > 2 && env > prev_env {
            // terms started to grow: optimal truncation reached
            break;
        }
        sum -= pw * rgamma(y);
        prev_env = env;
        if env <= 1e-17 * sum.abs() {
            break;
        }
    }
    if sum != 0.0 && prev_env <= ASYMPTOTIC_REL_TOL * sum.abs() {
        Some(sum)
    } else {
        None
    }
}

/// Leading behaviour on the positive axis when the series overflows.
fn positive_asymptotic(beta: f64, gamma: f64, z: f64) -> f64 {
    let root = z.powf(1.0 / beta);
    let lead = ((1.0 - gamma) / beta * z.ln() + root).exp() / beta;
    if lead.is_finite() {
        lead
    } else {
        f64::INFINITY
    }
}

/// sin(πx) with exact zeros at the integers.
fn sin_pi(x: f64) -> f64 {
    let r = x - 2.0 * (x / 2.0).floor();
    if r == 0.0 || r == 1.0 {
        return 0.0;
    }
    (PI * r).sin()
}

/// E_{β,γ}(-x) for x > 0, 0 < β ≤ 2, β ≠ 1, γ < 1 + β: branch-cut integral
/// plus pole residues.
pub(crate) fn hankel(beta: f64, gamma: f64, x: f64) -> f64 {
    let p = 1.0 + beta - gamma;
    debug_assert!(p > 0.0);
    let sg = sin_pi(gamma);
    let sbg = sin_pi(beta - gamma);
    let cb = (PI * beta).cos();
    let inv_p = 1.0 / p;

    let residue = if beta > 1.0 {
        let root = x.powf(1.0 / beta);
        let re = root * (PI / beta).cos();
        let im = root * (PI / beta).sin();
        let phase = im + PI * (1.0 - gamma) / beta;
        2.0 / beta * (re + (1.0 - gamma) / beta * x.ln()).exp() * phase.cos()
    } else {
        0.0
    };

    // Integrate in v = r^p which removes the r^{β-γ} endpoint factor.
    let integrand = |v: f64| -> f64 {
        if v <= 0.0 {
            return -inv_p * sbg / x;
        }
        let r = v.powf(inv_p);
        let rb = r.powf(beta);
        let num = rb * sg - x * sbg;
        let den = rb * rb + 2.0 * x * rb * cb + x * x;
        inv_p * (-r).exp() * num / den
    };

    let r_max: f64 = 60.0;
    let mut breaks = vec![0.0];
    let mut push = |r: f64| {
        if r > 0.0 && r < r_max {
            breaks.push(r.powf(p));
        }
    };
    if cb < 0.0 {
        // denominator minimum at r^β = -x cos(πβ)
        push((-x * cb).powf(1.0 / beta));
    }
    push(1.0);
    push(5.0);
    push(20.0);
    breaks.push(r_max.powf(p));
    breaks.sort_by(|a, b| a.total_cmp(b));
    breaks.dedup();

    let abs_tol = 1e-16 * residue.abs();
    let q = adaptive_gk(integrand, &breaks, abs_tol, 1e-14, 4000);
    q.value / PI + residue
}

/// E_{1,γ}(z) for z < 0.
fn unit_order(gamma: f64, z: f64) -> f64 {
    if gamma == 1.0 {
        return z.exp();
    }
    if gamma < 1.0 {
        return rgamma(gamma) + z * unit_order(gamma + 1.0, z);
    }
    if gamma >= 2.0 {
        return (unit_order(gamma - 1.0, z) - rgamma(gamma - 1.0)) / z;
    }
    // 1 < γ < 2: E = (1/Γ(γ)) ∫_0^1 exp(z (1 - v^{1/(γ-1)})) dv
    let q = 1.0 / (gamma - 1.0);
    let f = |v: f64| (z * (1.0 - v.powf(q))).exp();
    let r = adaptive_gk(f, &[0.0, 0.5, 0.9, 0.99, 1.0], 0.0, 1e-14, 4000);
    rgamma(gamma) * r.value
}
