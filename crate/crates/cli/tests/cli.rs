use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const SQRT: &str = r#"{"kind":"power","params":{"gamma":0.5}}"#;

fn tgalab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tgalab")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_str(&stdout(out)).unwrap()
}

fn schreier() -> String {
    format!(r#"{{"kind":"schreier","params":{{"f":{SQRT}}}}}"#)
}

fn vector_file(dir: &Path, name: &str, pairs: &[(usize, f64)]) -> String {
    let body: Vec<String> = pairs.iter().map(|(n, v)| format!("\"{n}\": {v}")).collect();
    let path = dir.join(name);
    fs::write(&path, format!("{{\"coeffs\": {{{}}}}}", body.join(", "))).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn norm_examples() {
    let dir = tempfile::tempdir().unwrap();
    let prefix: Vec<(usize, f64)> = (1..=100).map(|n| (n, 1.0)).collect();
    let v = vector_file(dir.path(), "prefix.json", &prefix);
    assert_eq!(json(&tgalab(&["norm", "--space", &schreier(), &v]))["norm"], 9.0);

    let ones = vector_file(dir.path(), "ones.json", &[(1, 1.0), (2, 1.0), (3, 1.0), (4, 1.0)]);
    let out = json(&tgalab(&["norm", "--space", r#"{"kind":"c0"}"#, &ones]));
    assert_eq!(out["norm"], 1.0);
    assert_eq!(out["schema"], "tgalab/1");

    let csv = stdout(&tgalab(&["norm", "--format", "csv", "--space", r#"{"kind":"lp","params":{"p":2}}"#, r#"{"coeffs":{"7":3}}"#]));
    assert_eq!(csv, "# schema: tgalab/1\nnorm\n3\n");
}

#[test]
fn twelve_significant_digits() {
    let out = stdout(&tgalab(&["norm", "--format", "csv", "--space", r#"{"kind":"lp","params":{"p":2}}"#, r#"{"coeffs":{"1":1,"2":1}}"#]));
    assert_eq!(out.lines().last().unwrap(), "1.41421356237");
}

#[test]
fn tga_examples() {
    let l2 = r#"{"kind":"lp","params":{"p":2}}"#;
    let out = stdout(&tgalab(&["tga", "--format", "csv", "--space", l2, "--m-max", "2", r#"{"coeffs":{"1":2,"2":1}}"#]));
    assert_eq!(out, "# schema: tgalab/1\nm,indices,residual\n1,1,1\n2,1;2,0\n");

    let c0 = r#"{"kind":"c0"}"#;
    let out = json(&tgalab(&["tga", "--space", c0, "--m-max", "4", r#"{"coeffs":{"1":1,"2":1,"3":1,"4":1}}"#]));
    let residuals: Vec<f64> = out["rows"].as_array().unwrap().iter().map(|r| r["residual"].as_f64().unwrap()).collect();
    assert_eq!(residuals, vec![1.0, 1.0, 1.0, 0.0]);
}

#[test]
fn kt_trace_matches_norm_command() {
    let dir = tempfile::tempdir().unwrap();
    let kt = r#"{"kind":"kt"}"#;
    let pairs: Vec<(usize, f64)> = (1..=12).map(|n| (n, (n as f64).powf(-0.5))).collect();
    let v = vector_file(dir.path(), "harmonic.json", &pairs);
    let out = json(&tgalab(&["tga", "--space", kt, "--m-max", "8", &v]));
    let rows = out["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 8);
    for row in rows {
        let taken: Vec<usize> = row["indices"].as_array().unwrap().iter().map(|i| i.as_u64().unwrap() as usize).collect();
        let rest: Vec<(usize, f64)> = pairs.iter().copied().filter(|(n, _)| !taken.contains(n)).collect();
        let r = vector_file(dir.path(), "rest.json", &rest);
        let direct = json(&tgalab(&["norm", "--space", kt, &r]));
        assert_eq!(direct["norm"], row["residual"]);
    }
}

#[test]
fn sigma_profiles_agree_on_lp() {
    let out = json(&tgalab(&["sigma", "--space", r#"{"kind":"lp","params":{"p":1}}"#, "--m", "3", r#"{"coeffs":{"1":3,"4":-2,"9":1,"10":0.5}}"#]));
    let rows = out["rows"].as_array().unwrap();
    let sigma: Vec<f64> = rows.iter().map(|r| r["sigma"].as_f64().unwrap()).collect();
    assert_eq!(sigma, vec![6.5, 3.5, 1.5, 0.5]);
    for r in rows {
        assert_eq!(r["sigma"], r["sigma_tilde"]);
    }
}

#[test]
fn constants_examples() {
    let l2 = r#"{"kind":"lp","params":{"p":2}}"#;
    let g = r#"{"family":"gaussian","support":8,"horizon":32}"#;
    let out = json(&tgalab(&["constants", "C_q", "--trials", "10000", "--space", l2, "--sampler", g]));
    assert_eq!(out["estimate"]["value"], 1.0);

    let witness = r#"{"family":"kt_alternating","dimension":65536}"#;
    let id = r#"{"kind":"identity"}"#;
    let out = json(&tgalab(&["constants", "K_su", "--trials", "1", "--space", r#"{"kind":"kt"}"#, "--func", id, "--sampler", witness]));
    let k = out["estimate"]["observed"].as_f64().unwrap();
    assert!(k >= 0.4 * (65536f64).ln().sqrt(), "K_su = {k}");

    let blocks = r#"{"family":"far_block","max_size":64,"horizon":256}"#;
    let out = json(&tgalab(&["constants", "Delta_d_f", "--trials", "64", "--space", &schreier(), "--func", SQRT, "--sampler", blocks]));
    assert!(out["estimate"]["observed"].as_f64().unwrap() <= 4.0);
}

#[test]
fn constants_need_func() {
    let out = tgalab(&["constants", "K_u", "--space", r#"{"kind":"kt"}"#, "--sampler", r#"{"family":"gaussian","support":4,"horizon":8}"#]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("needs --func"));
}

#[test]
fn fast_suite_is_deterministic() {
    let a = tgalab(&["suite", "--tier", "fast", "--seed", "42"]);
    let b = tgalab(&["suite", "--tier", "fast", "--seed", "42"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    let reports = v.as_array().unwrap();
    assert!(reports.iter().all(|r| r["schema"] == "tgalab/1"));
    assert!(String::from_utf8_lossy(&a.stderr).contains("check"));
}

#[test]
fn full_suite_emits_every_check() {
    let list = json(&tgalab(&["suite", "--list"]));
    let ids: Vec<&str> = list["checks"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    let out = tgalab(&["suite", "--tier", "full", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    for id in ids {
        assert!(text.lines().any(|l| l.starts_with(&format!("{id},full,"))), "missing {id}");
    }
}

#[test]
fn single_check_with_params() {
    let out = json(&tgalab(&["suite", "--check", "schreier_separation", "--params", r#"{"m":[16,64]}"#]));
    let r = &out[0];
    assert_eq!(r["status"], "Pass");
    assert!(r["measured"]["ratio[m=64]"].as_f64().unwrap() >= 0.5 * 64f64.powf(0.4));

    let bad = tgalab(&["suite", "--check", "schreier_separation", "--params", r#"{"mm":[16]}"#]);
    assert_eq!(bad.status.code(), Some(2));
    let unknown = tgalab(&["suite", "--check", "no_such_check"]);
    assert!(String::from_utf8_lossy(&unknown.stderr).contains("f_class_properties"));
}

#[test]
fn weights_csv() {
    let out = stdout(&tgalab(&["weights", "--j-max", "2", "--format", "csv"]));
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "# schema: tgalab/1");
    assert_eq!(lines[1], "n,w_n");
    // each block is preceded by its own t_j
    assert_eq!(lines.len(), 2 + (1 + 11) + (1 + 111));
}

#[test]
fn dimension_cap() {
    let c0 = r#"{"kind":"c0"}"#;
    let x = r#"{"coeffs":{"1":1}}"#;
    let out = tgalab(&["tga", "--space", c0, "--m-max", "2", "--dim", "2000000", x]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--max-dim"));
    let out = tgalab(&["tga", "--space", c0, "--m-max", "2", "--dim", "2000000", "--max-dim", "4000000", x]);
    assert!(out.status.success());
}

#[test]
fn parse_errors_report_position() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\"coeffs\": {\"1\": 1,\n  \"2\": oops}}").unwrap();
    let out = tgalab(&["norm", "--space", r#"{"kind":"c0"}"#, bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bad.json:2:"), "{err}");
}

#[test]
fn out_file_is_atomic() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("norm.json");
    let c0 = r#"{"kind":"c0"}"#;
    let t = target.to_str().unwrap();
    let printed = stdout(&tgalab(&["norm", "--space", c0, r#"{"coeffs":{"2":-5}}"#]));
    assert!(tgalab(&["norm", "--space", c0, "--out", t, r#"{"coeffs":{"2":-5}}"#]).status.success());
    assert_eq!(fs::read_to_string(&target).unwrap(), printed);

    // a failing run leaves the previous contents alone
    let out = tgalab(&["norm", "--space", c0, "--out", t, r#"{"coeffs":{"0":1}}"#]);
    assert!(!out.status.success());
    assert_eq!(fs::read_to_string(&target).unwrap(), printed);
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn thread_variable_is_validated() {
    let out = Command::new(env!("CARGO_BIN_EXE_tgalab"))
        .args(["suite", "--list"])
        .env("TGALAB_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_tgalab"))
        .args(["suite", "--check", "truncation_bound"])
        .env("TGALAB_THREADS", "2")
        .output()
        .unwrap();
    assert!(out.status.success());
}
