use std::fs;
use std::path::{Path, PathBuf};

use airdrop_forge_cli::{emit_plot_data, run, CliError, PlotSource};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures/golden")
        .join(name)
}

fn exec(args: &[&str]) -> i32 {
    run(std::iter::once("airdrop-forge").chain(args.iter().copied()))
}

fn mechanism_params(dir: &Path, edit: impl FnOnce(&mut serde_json::Value)) -> PathBuf {
    let mut v: serde_json::Value =
        serde_json::from_slice(&fs::read(fixture("mechanism.json")).unwrap()).unwrap();
    edit(&mut v);
    let path = dir.join("params.json");
    fs::write(&path, serde_json::to_vec(&v).unwrap()).unwrap();
    path
}

#[test]
fn detect_writes_one_report_per_group() {
    let out = tempfile::tempdir().unwrap();
    let code = exec(&[
        "detect",
        "--ledger",
        fixture("ledger.csv").to_str().unwrap(),
        "--groups",
        fixture("groups.json").to_str().unwrap(),
        "--out",
        out.path().to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    for g in 0..4 {
        assert!(out.path().join(format!("group-{g:03}.detection.json")).exists());
    }
    let manifest: serde_json::Value =
        serde_json::from_slice(&fs::read(out.path().join("run_manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "detect");
    assert_eq!(manifest["inputs"].as_array().unwrap().len(), 2);
    assert_eq!(manifest["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn hunter_count_mismatch_is_a_precondition_error() {
    let dir = tempfile::tempdir().unwrap();
    let params = mechanism_params(dir.path(), |v| v["hunters_M"] = 3.into());
    let out = dir.path().join("out");
    let code = exec(&["solve", "--params", params.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code, 1);
    // nothing is written when the run fails
    assert!(!out.exists());
}

#[test]
fn missing_root_exits_with_solver_code() {
    let dir = tempfile::tempdir().unwrap();
    let params = mechanism_params(dir.path(), |v| {
        v["hunters"] = serde_json::json!([{"capability": 0, "variable_cost": 1, "fixed_cost": 0}]);
    });
    let out = dir.path().join("out");
    let code = exec(&["solve", "--params", params.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code, 2);
}

#[test]
fn batch_solve_writes_indexed_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let one: serde_json::Value =
        serde_json::from_slice(&fs::read(fixture("mechanism.json")).unwrap()).unwrap();
    let params = dir.path().join("batch.json");
    fs::write(&params, serde_json::to_vec(&vec![one.clone(), one]).unwrap()).unwrap();
    let out = dir.path().join("out");
    let code = exec(&["solve", "--params", params.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.join("solution_000.json").exists());
    assert!(out.join("sweep_001.csv").exists());
}

#[test]
fn verify_exit_code_follows_the_checks() {
    let dir = tempfile::tempdir().unwrap();
    // the interior closed-form ratio disagrees with the boundary grid maximum
    let code = exec(&["verify", "--params", fixture("mechanism.json").to_str().unwrap()]);
    assert_eq!(code, 1);

    let params = mechanism_params(dir.path(), |v| {
        v["T"] = 1e7.into();
        v["detected_rewards"] = serde_json::json!([50, 50]);
    });
    let out = dir.path().join("verify");
    let code = exec(&["verify", "--params", params.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.join("verify.json").exists());
}

#[test]
fn input_errors_exit_one() {
    let out = tempfile::tempdir().unwrap();
    let o = out.path().to_str().unwrap();
    assert_eq!(exec(&["detect", "--ledger", "/nonexistent.csv", "--groups", "/nonexistent.json", "--out", o]), 1);
    assert_eq!(exec(&["bogus"]), 1);
    assert_eq!(exec(&["solve", "--params", "/nonexistent.json", "--out", o]), 1);
    let ledger = fixture("ledger.csv");
    let groups = fixture("groups.json");
    let bad_tol = [
        "detect", "--ledger", ledger.to_str().unwrap(), "--groups", groups.to_str().unwrap(),
        "--out", o, "--value-tolerance", "1.5",
    ];
    assert_eq!(exec(&bad_tol), 1);
}

#[test]
fn generator_seed_flag_overrides_spec() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let spec = fixture("spec.json");
    for (out, seed) in [(&a, "1"), (&b, "2")] {
        let code = exec(&["gen", "--spec", spec.to_str().unwrap(), "--seed", seed, "--out", out.to_str().unwrap()]);
        assert_eq!(code, 0);
    }
    assert_ne!(fs::read(a.join("ledger.csv")).unwrap(), fs::read(b.join("ledger.csv")).unwrap());
    let meta: serde_json::Value = serde_json::from_slice(&fs::read(a.join("metadata.json")).unwrap()).unwrap();
    assert_eq!(meta["generator"], "xoshiro256starstar-splitmix64");
    assert_eq!(meta["seed"], 1);
}

#[test]
fn plot_kinds() {
    let reports = [];
    let err = emit_plot_data("fig2", &PlotSource::Detection(&reports)).unwrap_err();
    assert!(matches!(err, CliError::UnknownKind(_)));
    assert_eq!(err.code(), "UNKNOWN_KIND");
    assert!(emit_plot_data("fig8", &PlotSource::Detection(&reports)).is_err());
    assert_eq!(
        emit_plot_data("fig1", &PlotSource::Detection(&reports)).unwrap(),
        "group_id,pct_funded,pct_received\n"
    );
}
