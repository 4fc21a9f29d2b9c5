mod common;

use common::*;
use nalgebra::DMatrix;
use proptest::prelude::*;
use subdiff::forward::{
    direct_estimate, duhamel_check, duhamel_check_with, indicator_data, indicator_data_for, positivity_check, solve_fd, spread_index,
    DuhamelForm, HomogeneousSolver, StateField, SystemSpec, TemporalSignal,
};
use subdiff::Error;

#[test]
fn indicator_examples() {
    let (sg, _) = grids(100);
    let c = DMatrix::from_row_slice(2, 2, &[3.0, -1.0, -1.0, 3.0]);
    let spec = SystemSpec::diagonal(vec![0.6, 0.4], c.clone(), exprs(&["sin(pi*x)", "0"])).unwrap();
    let d = indicator_data(&spec, &sg).with_index();
    assert_eq!(d.r, vec![true, false]);
    assert_eq!(d.q, vec![vec![true; 2]; 2]);
    assert_eq!(d.index, Some(1));

    let pos = indicator_data_for(&exprs(&["1 + x", "exp(x)"]), &c, &sg);
    assert_eq!(pos.r, vec![true, true]);
    assert_eq!(spread_index(&pos.r, &pos.q), Some(0));

    let diag = indicator_data_for(&exprs(&["sin(pi*x)", "0"]), &DMatrix::from_diagonal_element(2, 2, 2.0), &sg);
    assert_eq!(diag.q, vec![vec![true, false], vec![false, true]]);
    assert_eq!(spread_index(&diag.r, &diag.q), None);

    // a bump supported between grid nodes is invisible on the grid
    let bump = indicator_data_for(&exprs(&["ind(x, 0.501, 0.509)"]), &DMatrix::zeros(1, 1), &sg);
    assert_eq!(bump.r, vec![false]);
}

#[test]
fn spread_index_examples() {
    let lower = vec![vec![true, false], vec![true, true]];
    assert_eq!(spread_index(&[true, false], &lower), Some(1));
    assert_eq!(spread_index(&[false, true], &lower), None);
    // a chain needs K - 1 hops
    let k = 5;
    let chain: Vec<Vec<bool>> = (0..k).map(|a| (0..k).map(|b| a == b || a == b + 1).collect()).collect();
    let mut r = vec![false; k];
    r[0] = true;
    assert_eq!(spread_index(&r, &chain), Some(k - 1));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn spread_index_matches_brute_force(
        k in 1usize..7,
        bits in prop::collection::vec(any::<bool>(), 49),
        rbits in prop::collection::vec(any::<bool>(), 7),
    ) {
        let q: Vec<Vec<bool>> = (0..k).map(|a| (0..k).map(|b| a == b || bits[a * 7 + b]).collect()).collect();
        let r: Vec<bool> = rbits[..k].to_vec();
        // integer powers of Q applied to r; reachable sets only grow
        let mut v: Vec<u64> = r.iter().map(|&b| b as u64).collect();
        let mut prev: Vec<bool> = r.clone();
        let mut first = None;
        for m in 0..=k {
            let support: Vec<bool> = v.iter().map(|&x| x > 0).collect();
            prop_assert!(prev.iter().zip(&support).all(|(p, s)| !p || *s));
            if first.is_none() && support.iter().all(|&s| s) {
                first = Some(m);
            }
            prev = support;
            v = (0..k).map(|a| (0..k).filter(|&b| q[a][b]).map(|b| v[b]).sum::<u64>().min(1 << 40)).collect();
        }
        prop_assert_eq!(spread_index(&r, &q), first);
    }
}

#[test]
fn cooperative_pair_is_strictly_positive() {
    let c = DMatrix::from_row_slice(2, 2, &[3.0, -1.0, -1.0, 3.0]);
    let spec = SystemSpec::diagonal(vec![0.7, 0.4], c, exprs(&["0", "0"]))
        .unwrap()
        .with_initial(exprs(&["sin(pi*x)", "sin(pi*x)"]))
        .unwrap();
    let (sg, tg) = grids(100);
    let rep = positivity_check(&spec, sg, tg, 0).unwrap();
    assert!(rep.min_value > 0.0, "{rep:?}");
    assert_eq!(rep.order, 0.0);
}

#[test]
fn one_way_coupling_spreads_positivity() {
    let c = DMatrix::from_row_slice(2, 2, &[3.0, 0.0, -1.0, 3.0]);
    let spec = SystemSpec::diagonal(vec![0.7, 0.4], c, exprs(&["0", "0"]))
        .unwrap()
        .with_initial(exprs(&["sin(pi*x)", "0"]))
        .unwrap();
    let (sg, tg) = grids(100);
    let d = indicator_data_for(spec.initial(), spec.coupling(), &sg).with_index();
    assert_eq!(d.index, Some(1));
    let rep = positivity_check(&spec, sg, tg, 1).unwrap();
    assert!(rep.min_value > 0.0, "{rep:?}");
    assert!((rep.order - 0.6).abs() < 1e-15);
}

#[test]
fn zero_initial_value_gives_zero_minimum() {
    let (sg, tg) = grids(40);
    let spec = SystemSpec::diagonal(vec![0.5, 0.5], standard_coupling(2), exprs(&["1", "1"])).unwrap();
    let rep = positivity_check(&spec, sg, tg, 1).unwrap();
    assert_eq!(rep.min_value, 0.0);
}

#[test]
fn positivity_preconditions_are_enforced() {
    let (sg, tg) = grids(40);
    let c = DMatrix::from_row_slice(2, 2, &[3.0, 1.0, -1.0, 3.0]);
    let spec = SystemSpec::diagonal(vec![0.5, 0.5], c, exprs(&["0", "0"]))
        .unwrap()
        .with_initial(exprs(&["sin(pi*x)", "0"]))
        .unwrap();
    assert!(matches!(positivity_check(&spec, sg, tg, 0), Err(Error::InvalidConfiguration(_))));
    let neg = SystemSpec::diagonal(vec![0.5, 0.5], standard_coupling(2), exprs(&["0", "0"]))
        .unwrap()
        .with_initial(exprs(&["sin(pi*x) - 0.5", "0"]))
        .unwrap();
    assert!(matches!(positivity_check(&neg, sg, tg, 0), Err(Error::InvalidConfiguration(_))));
}

#[test]
fn duhamel_zero_source() {
    let (sg, tg) = grids(20);
    let spec = SystemSpec::diagonal(vec![0.5], DMatrix::zeros(1, 1), exprs(&["sin(pi*x)"])).unwrap();
    let r = duhamel_check(&spec, &TemporalSignal::zeros(tg, 1), sg, tg, DuhamelForm::Scalar, 20).unwrap();
    assert_eq!(r, 0.0);
}

#[test]
fn duhamel_scalar_identity() {
    let (sg, tg) = grids(100);
    let spec = SystemSpec::diagonal(vec![0.5], DMatrix::zeros(1, 1), exprs(&["sin(pi*x)"])).unwrap();
    let r = duhamel_check(&spec, &signal(&tg, &["t"]), sg, tg, DuhamelForm::Scalar, 100).unwrap();
    assert!(r <= 5e-2, "{r}");
}

#[test]
fn duhamel_coupled_identity_on_structural_sources() {
    let (sg, tg) = grids(100);
    let spec = SystemSpec::diagonal(vec![0.7, 0.4], standard_coupling(2), exprs(&["exp(x)", "2 + x"])).unwrap();
    let rho = signal(&tg, &["2/gamma(2.3)*t^1.3", "2/gamma(2.6)*t^1.6"]);
    let r = duhamel_check(&spec, &rho, sg, tg, DuhamelForm::Coupled, 100).unwrap();
    assert!(r <= 5e-2, "{r}");
    let fd = duhamel_check_with(&spec, &rho, sg, tg, DuhamelForm::Coupled, 100, HomogeneousSolver::FiniteDifference)
        .unwrap();
    assert!(fd <= 5e-2, "{fd}");
}

#[test]
fn duhamel_residual_shrinks_with_the_grid() {
    let spec = SystemSpec::diagonal(vec![0.7, 0.4], standard_coupling(2), exprs(&["exp(x)", "2 + x"])).unwrap();
    let res: Vec<f64> = [25usize, 50, 100]
        .iter()
        .map(|&n| {
            let (sg, tg) = grids(n);
            let rho = signal(&tg, &["2/gamma(2.3)*t^1.3", "2/gamma(2.6)*t^1.6"]);
            duhamel_check(&spec, &rho, sg, tg, DuhamelForm::Coupled, n).unwrap()
        })
        .collect();
    assert!(res[0] / res[1] > 1.6 && res[1] / res[2] > 1.6, "{res:?}");
}

#[test]
fn duhamel_preconditions() {
    let (sg, tg) = grids(20);
    let spec = SystemSpec::diagonal(vec![0.7, 0.4], standard_coupling(2), exprs(&["exp(x)", "2 + x"])).unwrap();
    let rho = signal(&tg, &["1", "t"]);
    assert!(matches!(
        duhamel_check(&spec, &rho, sg, tg, DuhamelForm::Coupled, 20),
        Err(Error::InvalidConfiguration(_))
    ));
    assert!(duhamel_check(&spec, &rho, sg, tg, DuhamelForm::Scalar, 20).is_err());
    assert!(duhamel_check(&spec, &signal(&tg, &["t", "t"]), sg, tg, DuhamelForm::Coupled, 7).is_err());
}

#[test]
fn direct_estimate_recovers_example_source() {
    let (spec, src) = ex5_2();
    let (sg, tg) = grids(100);
    let truth = signal(&tg, &src);
    let u = solve_fd(&spec, sg, tg, &truth, None).unwrap();
    let est = direct_estimate(&u, &spec, 0.5).unwrap();
    for k in 0..2 {
        let e = rel_l2(est.component(k), truth.component(k));
        assert!(e <= 5e-2, "component {k}: {e}");
    }
}

#[test]
fn direct_estimate_detects_degenerate_observation_point() {
    let spec = SystemSpec::diagonal(vec![0.8, 0.3], standard_coupling(2), exprs(&["cos(pi*x)", "2"])).unwrap();
    let (sg, tg) = grids(100);
    let u = solve_fd(&spec, sg, tg, &signal(&tg, &["cos(2*pi*t)", "sin(-pi*t)"]), None).unwrap();
    assert!(matches!(direct_estimate(&u, &spec, 0.5), Err(Error::DegenerateConfiguration(_))));
    assert!(direct_estimate(&u, &spec, 0.3).is_ok());
}

#[test]
fn direct_estimate_of_zero_state() {
    let (spec, _) = ex5_2();
    let (sg, tg) = grids(30);
    let zero: StateField = solve_fd(&spec, sg, tg, &TemporalSignal::zeros(tg, 2), None).unwrap();
    let est = direct_estimate(&zero, &spec, 0.5).unwrap();
    assert!(est.values().iter().flatten().all(|&v| v == 0.0));
}
