use proptest::prelude::*;
use subdiff_harness::experiment::{at_level, Overrides};
use subdiff_harness::registry::{lookup, names, registry};
use subdiff_harness::scenario::{DeltaMode, ScenarioSpec};
use subdiff_harness::HarnessError;

#[test]
fn registry_has_every_experiment_once() {
    let want = [
        "ex5_1_caseA",
        "ex5_1_caseB",
        "ex5_2",
        "ex5_2_obs1",
        "ex5_2_obs2",
        "ex5_2_obs3",
        "ex5_3_obs1",
        "ex5_3_obs2",
        "ex5_4_k3",
        "ex5_4_k4",
    ];
    assert_eq!(names(), want);
    for s in registry() {
        s.validate().unwrap();
    }
}

#[test]
fn registry_defaults() {
    for s in registry() {
        assert_eq!((s.grid.time_steps, s.grid.space_steps, s.grid.horizon, s.grid.data_refinement), (100, 100, 1.0, 1));
        assert_eq!((s.prior.amplitude, s.prior.smoothness), (100.0, 2.0));
        let c = s.irekm_config().unwrap();
        assert_eq!((c.ensemble_size, c.nu0, c.xi), (200, 0.01, 0.8));
        assert!(c.tau * c.xi > 1.0);
        let k = s.components();
        let coupling = s.coupling();
        for a in 0..k {
            for b in 0..k {
                assert_eq!(coupling[a][b], if a == b { k as f64 + 1.0 } else { -1.0 });
            }
        }
        assert_eq!(s.noise.delta, DeltaMode::Realized);
    }
}

#[test]
fn lookup_reports_degeneracy() {
    let s = lookup("ex5_2").unwrap();
    assert_eq!((s.components(), s.observation.x0), (2, 0.5));
    assert!((s.source_determinant().unwrap() - 3.0).abs() < 1e-15);
    assert!(!s.is_degenerate().unwrap());
    assert_eq!(s.sweep_levels(), vec![1e-4, 1e-3, 1e-2]);

    let a = lookup("ex5_1_caseA").unwrap();
    assert!(a.source_determinant().unwrap().abs() < 1e-15);
    assert!(a.is_degenerate().unwrap());
    assert!(lookup("ex5_1_caseB").unwrap().is_degenerate().unwrap());
    for n in ["ex5_2_obs1", "ex5_3_obs2", "ex5_4_k3", "ex5_4_k4"] {
        assert!(!lookup(n).unwrap().is_degenerate().unwrap(), "{n}");
    }
}

#[test]
fn unknown_name_lists_valid_names() {
    let err = lookup("ex9").unwrap_err();
    assert_eq!(err.exit_code(), 2);
    let msg = err.to_string();
    for n in names() {
        assert!(msg.contains(&n), "{msg}");
    }
}

#[test]
fn single_component_sources_share_their_endpoint_values_with_the_means() {
    for n in ["ex5_3_obs1", "ex5_3_obs2"] {
        let s = lookup(n).unwrap();
        let truth = s.truth_signal().unwrap();
        let mean = s.prior_spec().unwrap().mean_signal();
        for k in 0..2 {
            assert_eq!(truth.component(k)[0], 0.0);
            assert!((truth.component(k)[100] - mean.component(k)[100]).abs() < 1e-15);
        }
    }
}

#[test]
fn toml_round_trip() {
    for s in registry() {
        let text = s.to_toml();
        assert_eq!(ScenarioSpec::from_toml(&text).unwrap(), s, "{text}");
    }
}

#[test]
fn minimal_toml_takes_defaults() {
    let text = r#"
name = "mine"
[system]
alpha = [0.5]
g = ["sin(pi*x)"]
[truth]
rho = ["t"]
[observation]
x0 = 0.3
components = [1]
[noise]
sigma = 1e-3
[prior]
means = ["0"]
amplitude = 10.0
smoothness = 1.5
"#;
    let s = ScenarioSpec::from_toml(text).unwrap();
    assert_eq!(s.grid.time_steps, 100);
    assert_eq!(s.irekm.ensemble_size, 200);
    assert_eq!(s.observed(), vec![0]);
}

fn invalid(mutate: impl FnOnce(&mut ScenarioSpec)) -> HarnessError {
    let mut s = lookup("ex5_2").unwrap();
    mutate(&mut s);
    s.validate().unwrap_err()
}

#[test]
fn validation_failures() {
    let cases: Vec<HarnessError> = vec![
        invalid(|s| s.observation.components = vec![0]),
        invalid(|s| s.observation.components = vec![3]),
        invalid(|s| s.observation.x0 = 0.505),
        invalid(|s| {
            s.truth.rho.pop();
        }),
        invalid(|s| s.prior.means[0] = "1 +".into()),
        invalid(|s| s.system.g[1] = "foo(x)".into()),
        invalid(|s| s.noise.sigma = 0.0),
        invalid(|s| s.irekm.ensemble_size = 1),
        invalid(|s| s.irekm.nu_rule = "both".into()),
        invalid(|s| s.prior.smoothness = 0.5),
        invalid(|s| s.grid.data_refinement = 0),
        invalid(|s| s.irekm.tau = Some(1.0)),
    ];
    for e in cases {
        assert_eq!(e.exit_code(), 2, "{e}");
    }
    assert!(ScenarioSpec::from_toml("name = 1").is_err());
    assert!(ScenarioSpec::from_toml(&lookup("ex5_2").unwrap().to_toml().replace("[grid]", "[grid]\nbogus = 1")).is_err());
}

#[test]
fn overrides_apply_and_pin_the_level() {
    let o = Overrides {
        sigma: Some(5e-3),
        seed: Some(9),
        noise_seed: Some(11),
        ensemble_size: Some(20),
        refine: Some(2),
        max_iterations: Some(3),
    };
    let s = o.apply(lookup("ex5_2").unwrap()).unwrap();
    assert_eq!(s.sweep_levels(), vec![5e-3]);
    assert_eq!((s.seeds.ensemble, s.seeds.noise), (9, 11));
    assert_eq!((s.irekm.ensemble_size, s.grid.data_refinement, s.irekm.max_iterations), (20, 2, 3));
    assert!(Overrides { ensemble_size: Some(0), ..Overrides::default() }.apply(lookup("ex5_2").unwrap()).is_err());
    let pinned = at_level(&lookup("ex5_4_k4").unwrap(), 1e-3);
    assert_eq!(pinned.sweep_levels(), vec![1e-3]);
}

#[test]
fn projected_truth_lies_in_the_prior_family() {
    let mut s = lookup("ex5_2").unwrap();
    s.truth.project_onto_prior = true;
    s.prior.modes = Some(6);
    let truth = s.truth_signal().unwrap();
    let prior = s.prior_spec().unwrap();
    let again = prior.synthesize(&prior.project(&truth).unwrap()).unwrap();
    for (a, b) in truth.values().iter().flatten().zip(again.values().iter().flatten()) {
        assert!((a - b).abs() < 1e-12);
    }
    // refined samples agree with the coarse ones at shared nodes
    let fine = s.truth_on(s.time_grid().unwrap().refined(2).unwrap()).unwrap();
    for j in 0..=100 {
        assert!((fine.component(0)[2 * j] - truth.component(0)[j]).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn config_echo_survives_json(sigma in 1e-6f64..1e-1, seed in any::<u64>(), ne in 2usize..500) {
        let o = Overrides { sigma: Some(sigma), seed: Some(seed), ensemble_size: Some(ne), ..Overrides::default() };
        let s = o.apply(lookup("ex5_2_obs3").unwrap()).unwrap();
        let v = subdiff_harness::format::normalize_floats(serde_json::to_value(&s).unwrap());
        let text = subdiff_harness::format::json_text(&v);
        let back: ScenarioSpec = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, s);
    }
}
