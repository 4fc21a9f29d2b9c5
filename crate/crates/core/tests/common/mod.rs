#![allow(dead_code)]

use nalgebra::DMatrix;
use subdiff::forward::{Expr, SpaceGrid, SystemSpec, TemporalSignal};
use subdiff::fraccalc::TimeGrid;

pub fn e(src: &str) -> Expr {
    Expr::parse(src).unwrap()
}

pub fn exprs(src: &[&str]) -> Vec<Expr> {
    src.iter().map(|s| e(s)).collect()
}

/// c_kk = K + 1, c_kl = -1.
pub fn standard_coupling(k: usize) -> DMatrix<f64> {
    DMatrix::from_fn(k, k, |a, b| if a == b { k as f64 + 1.0 } else { -1.0 })
}

pub fn grids(steps: usize) -> (SpaceGrid, TimeGrid) {
    (SpaceGrid::new(steps).unwrap(), TimeGrid::new(1.0, steps).unwrap())
}

pub fn signal(tgrid: &TimeGrid, src: &[&str]) -> TemporalSignal {
    TemporalSignal::from_exprs(*tgrid, &exprs(src)).unwrap()
}

pub fn ex5_2() -> (SystemSpec, Vec<&'static str>) {
    let spec = SystemSpec::diagonal(vec![0.8, 0.3], standard_coupling(2), exprs(&["x + 1", "2"])).unwrap();
    (spec, vec!["cos(2*pi*t)", "sin(-pi*t)"])
}

pub fn ex5_4_k3() -> (SystemSpec, Vec<&'static str>) {
    let spec = SystemSpec::diagonal(
        vec![0.8, 0.5, 0.3],
        standard_coupling(3),
        exprs(&["exp(-x)", "1 + x^2", "2 + cos(pi*x)"]),
    )
    .unwrap();
    (spec, vec!["-t^2 + t + 1", "abs(2*t - 1)", "cos(4*pi*t)"])
}

pub fn rel_l2(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    let den: f64 = b.iter().map(|y| y * y).sum();
    (num / den).sqrt()
}
