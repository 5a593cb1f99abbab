use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_circlefol")).args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn solve_forced(dir: &Path) -> std::path::PathBuf {
    let file = dir.join("sol.json");
    let out = run(&[
        "solve", "--model", "forced_oscillator", "--param", "c=0.01", "--ntheta", "32", "--order", "6",
        "--out", file.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    file
}

#[test]
fn solve_then_verify_reproduces_residuals() {
    let dir = tempfile::tempdir().unwrap();
    let file = solve_forced(dir.path());
    let stored: Value = serde_json::from_str(&fs::read_to_string(&file).unwrap()).unwrap();
    let out = run(&["verify", "--solution", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = stdout_json(&out);
    assert_eq!(doc["verdict"]["passed"], Value::Bool(true));
    for key in ["residual_r0", "residual_r1", "residual_r2"] {
        let a = stored["report"][key].as_f64().unwrap();
        let b = doc["report"][key].as_f64().unwrap();
        assert!((a - b).abs() < 1e-12, "{key}: {a} vs {b}");
    }
    assert!(stored["report"]["residual_r0"].as_f64().unwrap() < 1e-8);
}

#[test]
fn verify_fails_on_tight_threshold() {
    let dir = tempfile::tempdir().unwrap();
    let file = solve_forced(dir.path());
    let out = run(&["verify", "--solution", file.to_str().unwrap(), "--residual-threshold", "1e-30"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("residual_small"));
}

#[test]
fn export_writes_leaf_samples() {
    let dir = tempfile::tempdir().unwrap();
    let file = solve_forced(dir.path());
    let csv = dir.path().join("leaves.csv");
    let out = run(&[
        "export", "--solution", file.to_str().unwrap(), "--grid", "10", "--ns", "3", "--smax", "0.1",
        "--out", csv.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = fs::read_to_string(csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "theta,s,x,y");
    assert_eq!(lines.len(), 31);
    let row: Vec<f64> = lines[1].split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(row.len(), 4);
    assert_eq!(row[0], 0.0);
    assert!((row[1] + 0.1).abs() < 1e-15);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("x.json");
    let out = run(&["solve", "--model", "no_such_model", "--out", out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("UnknownModel"));

    let out = run(&["solve", "--model", "linear", "--param", "b", "--out", out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["solve", "--bogus-flag"]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["solve", "--model", "linear", "--param", "b=0.4", "--ntheta", "16", "--order", "4",
        "--out", out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["report"]["m_max"], Value::String("inf".into()));
}

#[test]
fn cohom_matches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let n = 8;
    let coeffs = |c0: f64, c1: f64| {
        let mut v = vec![[0.0, 0.0]; n + 1];
        v[0] = [c0, 0.0];
        v[1] = [c1, 0.0];
        serde_json::to_string(&v).unwrap()
    };
    let write = |name: &str, body: String| {
        let p = dir.path().join(name);
        fs::write(&p, body).unwrap();
        p
    };
    // l = 0.5, a = θ + 0.25, η = cos 2πθ
    let l = write("l.json", coeffs(0.5, 0.0));
    let a = write("a.json", coeffs(0.25, 0.0));
    let eta = write("eta.json", coeffs(0.0, 0.5));
    let out = run(&["cohom", "--l", l.to_str().unwrap(), "--a", a.to_str().unwrap(), "--eta",
        eta.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = stdout_json(&out);
    assert!(doc["residual"].as_f64().unwrap() < 1e-12);
    // φ = Re(e^{2πiθ} / (1 − 0.5i)) has c₁ = 1/(2(1 − 0.5i)) = 0.4 + 0.2i
    let c1 = &doc["phi"][1];
    assert!((c1[0].as_f64().unwrap() - 0.4).abs() < 1e-12);
    assert!((c1[1].as_f64().unwrap() - 0.2).abs() < 1e-12);

    let bad = write("bad.json", "{}".into());
    let out = run(&["cohom", "--l", bad.to_str().unwrap(), "--a", a.to_str().unwrap(), "--eta",
        eta.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn continuation_writes_points_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let outdir = dir.path().join("sweep");
    let out = run(&[
        "continue", "--model", "linear", "--param", "omega=0.3", "--sweep", "b:0.3:0.5:0.1",
        "--ntheta", "16", "--order", "4", "--outdir", outdir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary: Value = serde_json::from_str(&fs::read_to_string(outdir.join("summary.json")).unwrap()).unwrap();
    let points = summary.as_array().unwrap();
    assert_eq!(points.len(), 3);
    let last = points.last().unwrap();
    assert!((last["parameter"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert!(outdir.join("point_002.json").exists());
}
