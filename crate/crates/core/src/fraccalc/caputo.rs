use super::gamma::gamma;
use super::grid::GridFunction;
use crate::error::{Error, Result};

/// L1 history weights b_l = (l+1)^{1-α} - l^{1-α}, l = 0..n-1.
pub fn l1_weights(alpha: f64, n: usize) -> Vec<f64> {
    let e = 1.0 - alpha;
    (0..n).map(|l| ((l + 1) as f64).powf(e) - (l as f64).powf(e)).collect()
}

/// Δt^{-α}/Γ(2-α).
pub fn l1_scale(alpha: f64, dt: f64) -> f64 {
    dt.powf(-alpha) / gamma(2.0 - alpha)
}

pub(crate) fn caputo_l1_slice(alpha: f64, dt: f64, f: &[f64]) -> Vec<f64> {
    let n = f.len();
    let b = l1_weights(alpha, n);
    let a = l1_scale(alpha, dt);
    let mut out = vec![0.0; n];
    for j in 1..n {
        let mut s = 0.0;
        for l in 0..j {
            s += b[l] * (f[j - l] - f[j - l - 1]);
        }
        out[j] = a * s;
    }
    out
}

/// L1 approximation of the Caputo derivative ∂_t^α f at nodes 1..Nt;
/// node 0 is 0.
pub fn caputo_l1(alpha: f64, f: &GridFunction) -> Result<GridFunction> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::param(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let grid = *f.grid();
    Ok(GridFunction::from_parts_unchecked(grid, caputo_l1_slice(alpha, grid.dt(), f.values())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fraccalc::grid::TimeGrid;

    #[test]
    fn constants_have_zero_derivative() {
        let g = TimeGrid::new(1.0, 50).unwrap();
        let f = GridFunction::from_fn(g, |_| 3.7).unwrap();
        let d = caputo_l1(0.4, &f).unwrap();
        assert!(d.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn linear_function_is_exact() {
        // the L1 scheme integrates piecewise-linear data exactly
        let g = TimeGrid::new(1.0, 1000).unwrap();
        let f = GridFunction::from_fn(g, |t| t).unwrap();
        let d = caputo_l1(0.5, &f).unwrap();
        for (v, t) in d.values().iter().zip(g.nodes()).skip(1) {
            let want = t.sqrt() / gamma(1.5);
            assert!((v - want).abs() < 1e-3f64.powf(1.5), "t={t}");
        }
    }

    #[test]
    fn near_unit_order_approaches_difference_quotient() {
        let g = TimeGrid::new(1.0, 1000).unwrap();
        let f = GridFunction::from_fn(g, |t| (2.0 * t).sin() + t * t).unwrap();
        let d = caputo_l1(0.999, &f).unwrap();
        let v = f.values();
        for j in (10..=1000).step_by(10) {
            let bd = (v[j] - v[j - 1]) / g.dt();
            assert!(((d.values()[j] - bd) / bd).abs() < 1e-2, "j={j}");
        }
    }
}
