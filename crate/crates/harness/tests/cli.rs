use std::process::Command;

fn subdiff() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_subdiff"));
    c.env_remove("SUBDIFF_OUTPUT_ROOT");
    c
}

#[test]
fn list_shows_every_scenario() {
    let out = subdiff().arg("list").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 10);
    assert!(text.lines().any(|l| l.starts_with("ex5_1_caseA") && l.contains("degenerate=true")));
    assert!(text.lines().any(|l| l.starts_with("ex5_2 ") && l.contains("degenerate=false")));
}

#[test]
fn validation_errors_exit_with_two() {
    let out = subdiff().args(["invert", "nope"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("ex5_4_k4"));
    let out = subdiff().args(["invert", "ex5_2", "--ne", "1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = subdiff().args(["verify", "everything"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_reports_json() {
    let out = subdiff().args(["verify", "structural"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["suite"], "structural");
    assert_eq!(v["pass"], true);
    let checks = v["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 2);
    for c in checks {
        for key in ["name", "value", "tolerance", "pass"] {
            assert!(c.get(key).is_some());
        }
    }
}

#[test]
fn failed_verification_exits_with_three() {
    // the first-order FD trace misses the 1e-3 cross-solver tolerance
    let out = subdiff().args(["verify", "cross-solver"]).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["pass"], false);
}

#[test]
fn unconverged_inversion_exits_with_four_and_keeps_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = subdiff()
        .args(["invert", "ex5_2", "--ne", "20", "--max-iter", "2"])
        .env("SUBDIFF_OUTPUT_ROOT", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4), "{}", String::from_utf8_lossy(&out.stderr));
    let run = dir.path().join("ex5_2").join("sigma_1e-4_seed_0_0");
    for f in ["reconstruction.csv", "history.csv", "summary.json"] {
        assert!(run.join(f).is_file(), "{f}");
    }
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(run.join("summary.json")).unwrap()).unwrap();
    assert_eq!(v["stop_reason"], "max_iterations");
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(|k| k.as_str()).collect();
    assert_eq!(
        keys,
        ["scenario", "seeds", "config", "iterations", "stop_reason", "delta", "tau", "terminal_errors", "timing"]
    );
    assert!(v["timing"].get("wall_seconds").is_none());
}

#[test]
fn summary_config_reruns_identically() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let status = subdiff()
        .args(["invert", "ex5_2_obs3", "--ne", "30", "--sigma", "1e-2", "--seed", "3", "--noise-seed", "5", "--out"])
        .arg(a.path())
        .status()
        .unwrap();
    assert!(status.success());
    let run = a.path().join("ex5_2_obs3").join("sigma_1e-2_seed_3_5");
    let status = subdiff().arg("invert").arg("--config").arg(run.join("summary.json")).arg("--out").arg(b.path()).status().unwrap();
    assert!(status.success());
    let rerun = b.path().join("ex5_2_obs3").join("sigma_1e-2_seed_3_5");
    for f in ["reconstruction.csv", "history.csv", "summary.json"] {
        assert_eq!(std::fs::read(run.join(f)).unwrap(), std::fs::read(rerun.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn toml_scenario_file_is_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.toml");
    let mut s = subdiff_harness::registry::lookup("ex5_1_caseB").unwrap();
    s.name = "custom".into();
    s.grid.time_steps = 20;
    s.grid.space_steps = 20;
    std::fs::write(&path, s.to_toml()).unwrap();
    let out = subdiff().arg("forward").arg("--config").arg(&path).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next().unwrap(), "t,u_1,u_2");
    assert_eq!(text.lines().count(), 21);
}

#[test]
fn synthesize_prints_data_and_delta() {
    let out = subdiff().args(["synthesize", "ex5_2_obs1", "--sigma", "1e-3", "--noise-seed", "2"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next().unwrap(), "t,clean_1,y_1");
    let meta: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(meta["noise_seed"], 2);
    assert!(meta["delta"].as_f64().unwrap() > 5.0);
}
