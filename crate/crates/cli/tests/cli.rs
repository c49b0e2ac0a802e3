//! End-to-end tests of the charvar binary: golden values on the worked
//! examples, JSON schemas, exit codes, cache behavior, and determinism.

use std::process::{Command, Output};

fn charvar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_charvar"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_str(&stdout(out)).expect("valid JSON output")
}

#[test]
fn hlrv_rank2_json_golden() {
    let out = charvar(&[
        "hlrv",
        "--g",
        "0",
        "--mu",
        "1,1;1,1;1,1;1,1",
        "--format",
        "json",
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let v = json(&out);
    assert_eq!(v["hlrv_minus_z"], "z^2 + 4 + w^2");
    assert_eq!(v["d"], 2);
    assert_eq!(v["e_poly"], "q^2 + 4*q + 1");
    assert_eq!(v["weight_poly"], "q^2 + 4*q + t^2");
    assert_eq!(v["duality"], true);
    assert_eq!(v["spec"]["k"], 4);
    let grid: Vec<Vec<i64>> = serde_json::from_value(v["grid"].clone()).unwrap();
    assert_eq!(grid, vec![vec![0, 0, 4], vec![0, 2, 1], vec![2, 0, 1]]);
    let motive: Vec<Vec<i64>> = serde_json::from_value(v["motive"].clone()).unwrap();
    assert_eq!(motive, vec![vec![0, 2, 1], vec![1, 0, 4], vec![2, 0, 1]]);
}

#[test]
fn hlrv_rank3_text_golden() {
    let out = charvar(&["hlrv", "--g", "0", "--mu", "1,1,1;1,1,1;1,1,1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("H(-z,w)   : z^2 + 6 + w^2"), "{text}");
    assert!(text.contains("E(q)      : q^2 + 6*q + 1"), "{text}");
    assert!(text.contains("motive    : L^0[2] \u{2295} (L^1)^\u{2295}6 \u{2295} L^2"), "{text}");
}

#[test]
fn hlrv_punctured_torus() {
    for mu in ["1", "2"] {
        let out = charvar(&["hlrv", "--g", "1", "--mu", mu]);
        assert!(out.status.success());
        let text = stdout(&out);
        assert!(text.contains("H(z,w)    : z^2 - 2*z*w + w^2"), "{text}");
        assert!(text.contains("H(-z,w)   : z^2 + 2*z*w + w^2"), "{text}");
    }
}

#[test]
fn hlrv_validation_failure_exits_2() {
    // k = 1, g = 0 has negative dimension; the run completes and reports the
    // validation outcome with exit code 2.
    let out = charvar(&["hlrv", "--g", "0", "--mu", "3"]);
    assert_eq!(out.status.code(), Some(2), "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("validation: FAILED"));
}

#[test]
fn cells_rank2_json() {
    let out = charvar(&[
        "cells",
        "--g",
        "0",
        "--mu",
        "1,1;1,1;1,1;1,1",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["f"], serde_json::json!([1, 6]));
    assert_eq!(v["summary"], "K^6 \u{2294} (Kx)^2");
    assert_eq!(v["cells"].as_array().unwrap().len(), 7);
    assert_eq!(v["cross_check"]["agree"], true);
    assert_eq!(v["cross_check"]["cell_side"], "q^2 + 4*q + 1");
    // Walks serialize as one-line states plus index sets.
    let first = &v["cells"][0];
    assert_eq!(first["walk"]["states"][0], serde_json::json!([1, 2]));
    assert_eq!(first["a_bar"], 0);
    assert_eq!(first["b_bar"], 1);
}

#[test]
fn cells_rank3_text() {
    let out = charvar(&["cells", "--g", "0", "--mu", "1,1,1;1,1,1;1,1,1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("summary : K^8 \u{2294} (Kx)^2"), "{text}");
    assert!(text.contains("E-check : cells q^2 + 6*q + 1 vs grid q^2 + 6*q + 1 -> ok"));
}

#[test]
fn cells_rejects_non_very_generic() {
    let out = charvar(&["cells", "--g", "0", "--mu", "1,1;1,1;2"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("regular semisimple"), "{}", stderr(&out));
}

#[test]
fn walks_sigma1_6() {
    let out = charvar(&["walks", "--word", "1,1,1,1,1,1", "--format", "json"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["walks"].as_array().unwrap().len(), 5);
    // The last walk is the all-stay one.
    let last = &v["walks"][4];
    assert_eq!(last["stay"], serde_json::json!([2, 3, 4, 5]));
}

#[test]
fn walks_sigma1_4_text() {
    let out = charvar(&["walks", "--word", "1,1,1,1"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("walks : 2"));
}

#[test]
fn macdonald_table_json() {
    let out = charvar(&["macdonald", "--n", "2", "--format", "json"]);
    assert!(out.status.success());
    let v = json(&out);
    let weight2 = &v["tables"][1];
    assert_eq!(weight2["weight"], 2);
    // Htilde_(2) = s_(2) + q s_(1,1).
    let entry = weight2["entries"]
        .as_array()
        .unwrap()
        .iter()
        .find(|e| e["mu"] == serde_json::json!([2]))
        .unwrap();
    let coeffs: std::collections::BTreeMap<String, String> = entry["schur"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| {
            (
                serde_json::to_string(&s["lambda"]).unwrap(),
                s["coeff"].as_str().unwrap().to_string(),
            )
        })
        .collect();
    assert_eq!(coeffs["[2]"], "1");
    assert_eq!(coeffs["[1,1]"], "q");
}

#[test]
fn check_is_deterministic_under_seed() {
    let a = charvar(&["check", "--seed", "7"]);
    let b = charvar(&["check", "--seed", "7"]);
    assert!(a.status.success());
    assert_eq!(stdout(&a), stdout(&b));
    assert!(stdout(&a).contains("all checks passed"));
}

#[test]
fn cache_round_trip_and_corruption_warning() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().to_str().unwrap();
    let first = charvar(&["macdonald", "--n", "2", "--cache-dir", cache]);
    assert!(first.status.success());
    assert!(dir.path().join("macdonald_n2.json").exists());
    let second = charvar(&["macdonald", "--n", "2", "--cache-dir", cache]);
    assert!(second.status.success());
    assert_eq!(stdout(&first), stdout(&second));
    // Corruption triggers a rebuild with a warning on stderr.
    std::fs::write(dir.path().join("macdonald_n2.json"), "{broken").unwrap();
    let third = charvar(&["macdonald", "--n", "2", "--cache-dir", cache]);
    assert!(third.status.success());
    assert!(stderr(&third).contains("rebuilding"), "{}", stderr(&third));
    assert_eq!(stdout(&first), stdout(&third));
    // The env var override is honored.
    let via_env = Command::new(env!("CARGO_BIN_EXE_charvar"))
        .args(["macdonald", "--n", "2"])
        .env("CHARVAR_CACHE_DIR", cache)
        .output()
        .unwrap();
    assert!(via_env.status.success());
    assert_eq!(stdout(&first), stdout(&via_env));
}

#[test]
fn bad_mu_grammar_is_a_usage_error() {
    for mu in ["1,2", "0", "2,a", ""] {
        let out = charvar(&["hlrv", "--g", "0", "--mu", mu]);
        assert_eq!(out.status.code(), Some(1), "mu = {mu:?}");
    }
}

#[test]
fn truncation_override_accepted() {
    let out = charvar(&[
        "hlrv",
        "--g",
        "1",
        "--mu",
        "1,1",
        "--truncation",
        "3",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["truncation"], 3);
}

#[test]
fn jobs_flag_accepted() {
    let out = charvar(&["hlrv", "--g", "0", "--mu", "1,1;1,1;1,1;1,1", "--jobs", "2"]);
    assert!(out.status.success());
}
