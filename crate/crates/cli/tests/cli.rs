use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pmmf"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("pmmf-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_obs(dir: &Path, symbols: &str) -> PathBuf {
    let path = dir.join("obs.csv");
    let mut text = String::from("x\n");
    for c in symbols.chars() {
        text.push(c);
        text.push('\n');
    }
    fs::write(&path, text).unwrap();
    path
}

fn manifest(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

#[test]
fn decode_recovers_the_walk() {
    let dir = scratch("decode");
    let obs = write_obs(&dir, "01110010");
    let out = dir.join("out");
    let status = bin()
        .args(["decode", "--model", "mod4.json", "--obs"])
        .arg(&obs)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    assert_eq!(fs::read_to_string(out.join("path.txt")).unwrap().trim(), "12223301");
    let m = manifest(&out);
    assert_eq!(m["subcommand"], "decode");
    assert!(m["outputs"]["path.txt"].as_str().unwrap().len() == 64);
    assert!(m["config"]["common"]["seed"].is_u64());
}

#[test]
fn enumeration_failure_exits_with_validation_code() {
    let dir = scratch("check");
    let out = dir.join("out");
    let status = bin()
        .args(["check", "--model", "mod4.json", "--method", "enumerate", "--r-max", "6", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("failure.json")).unwrap()).unwrap();
    assert_eq!(report["per_r"].as_array().unwrap().len(), 5);
    assert_eq!(manifest(&out)["exit_code"], 2);
}

#[test]
fn four_state_enumeration_certifies() {
    let dir = scratch("four");
    let out = dir.join("out");
    let status = bin()
        .args(["check", "--model", "fourstate.json", "--method", "enumerate", "--r-max", "4", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let cert: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("certificate.json")).unwrap()).unwrap();
    assert_eq!(cert["r"], 3);
    assert_eq!(cert["n0"], 8.0);
}

#[test]
fn same_seed_gives_identical_digests() {
    let dir = scratch("digest");
    let run = |name: &str| {
        let out = dir.join(name);
        let status = bin()
            .args(["forget-curve", "--model", "cluster_hmm.json", "--paths", "8", "--t", "60", "--n", "80"])
            .args(["--seed", "11", "--out"])
            .arg(&out)
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0));
        manifest(&out)["outputs"].clone()
    };
    let a = run("a");
    let b = run("b");
    assert!(!a.as_object().unwrap().is_empty());
    assert_eq!(a, b);
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let status = bin().args(["decode", "--model", "mod4.json", "--no-such-flag"]).status().unwrap();
    assert_eq!(status.code(), Some(64));
}

#[test]
fn impossible_observations_exit_with_likelihood_code() {
    let dir = scratch("zero");
    let model = dir.join("sticky.json");
    fs::write(
        &model,
        r#"{"kind":"hmm","trans":[[1.0,0.0],[0.0,1.0]],"init":[1.0,0.0],
            "emissions":[{"kind":"categorical","weights":[1.0,0.0]},{"kind":"categorical","weights":[0.0,1.0]}]}"#,
    )
    .unwrap();
    let obs = write_obs(&dir, "01");
    let out = dir.join("out");
    let status = bin().arg("decode").arg("--model").arg(&model).arg("--obs").arg(&obs).arg("--out").arg(&out).status().unwrap();
    assert_eq!(status.code(), Some(3));
    assert!(out.join("manifest.json").exists());
}

#[test]
fn invalid_model_fails_validation() {
    let dir = scratch("invalid");
    let model = dir.join("bad.json");
    fs::write(
        &model,
        r#"{"kind":"hmm","trans":[[0.5,0.4],[0.0,1.0]],"init":[1.0,0.0],
            "emissions":[{"kind":"categorical","weights":[1.0,0.0]},{"kind":"categorical","weights":[0.0,1.0]}]}"#,
    )
    .unwrap();
    let out = dir.join("out");
    let status = bin().args(["check", "--model"]).arg(&model).arg("--out").arg(&out).status().unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn simulate_then_smooth_round_trip() {
    let dir = scratch("sim");
    let sim = dir.join("sim");
    let status = bin()
        .args(["simulate", "--model", "lmsm_ar1.json", "--n", "12", "--seed", "5", "--out"])
        .arg(&sim)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let out = dir.join("smooth");
    let status = bin()
        .args(["smooth", "--model", "lmsm_ar1.json", "--t", "4", "--m", "2", "--window", "1:12", "--obs"])
        .arg(sim.join("obs.csv"))
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let law: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("smoothing.json")).unwrap()).unwrap();
    let total: f64 = law["probs"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-12);
}

#[test]
fn routing_ratio_is_reported_or_rejected() {
    let dir = scratch("sopot");
    let run = |model: &str, out: &Path| {
        bin()
            .args(["check", "--model", model, "--method", "sopot", "--split", "2", "--via", "0", "--seed", "1", "--out"])
            .arg(out)
            .status()
            .unwrap()
            .code()
    };
    let ok = dir.join("cluster");
    assert_eq!(run("cluster_hmm.json", &ok), Some(0));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(ok.join("sopot.json")).unwrap()).unwrap();
    assert!(report["lambda"].as_f64().unwrap() > 0.0);
    assert_eq!(report["exact"], true);
    assert_eq!(run("fourstate.json", &dir.join("four")), Some(2));
}
