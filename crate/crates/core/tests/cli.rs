use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_liecurve"))
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = bin().args(args).env_remove("LIECURVE_TOL").output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn sl2c_flow_writes_trace_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("trace.csv");
    let (code, _, err) = run(&[
        "flow", "--algebra", "sl2c", "--metric", "diag:1,1,1", "--kind", "hcf", "--t-max", "10", "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    let text = std::fs::read_to_string(&csv).unwrap();
    let header = text.lines().next().unwrap();
    assert!(header.starts_with("t,h00_re,h00_im,"));
    assert!(header.ends_with(",mu_norm_sq,M_norm_sq,F,r_nu,min_eig"));
    // a(t) = 1 + t/2 along the static ray
    let last: Vec<f64> = text.lines().last().unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(last[0], 10.0);
    assert!((last[1] - 6.0).abs() < 1e-8);
    let json = std::fs::read_to_string(dir.path().join("trace.json")).unwrap();
    assert!(json.contains("reached_horizon"));
}

#[test]
fn s31_flow_exits_two_with_estimate() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("s31.csv");
    let (code, _, _) = run(&[
        "flow", "--algebra", "s3lambda:1", "--metric", "diag:1,1,1", "--kind", "hcf", "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(code, 2);
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("s31.json")).unwrap()).unwrap();
    assert_eq!(v["termination"]["status"], "singularity");
    let t = v["termination"]["t_est"].as_f64().unwrap();
    assert!((t - 1.0).abs() < 0.01, "{t}");
}

#[test]
fn abelian_flow_is_constant() {
    let (code, out, _) = run(&["flow", "--algebra", "abelian:3", "--kind", "hcf"]);
    assert_eq!(code, 0);
    assert!(out.contains("reached_horizon"));
}

#[test]
fn csv_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let mut texts = Vec::new();
    for i in 0..2 {
        let p = dir.path().join(format!("r{i}.csv"));
        let (code, _, _) = run(&[
            "flow", "--algebra", "h3c", "--metric", "seed:11", "--kind", "normalized-bracket", "--t-max", "5",
            "--out", p.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
        texts.push(std::fs::read(&p).unwrap());
    }
    assert_eq!(texts[0], texts[1]);
}

#[test]
fn soliton_certificate_on_h3c() {
    let (code, out, _) = run(&["soliton", "--algebra", "h3c", "--metric", "seed:7"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["kind"], "soliton");
    assert!(v["lambda"].as_f64().unwrap() < 0.0);
    assert!(v["residual"].as_f64().unwrap() < 1e-10);
}

#[test]
fn static_scan_reports_no_hits() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("scan.csv");
    let (code, out, _) = run(&[
        "static-scan", "--algebra", "h3c", "--x", "1,0,0,0", "--samples", "200", "--out",
        csv.to_str().unwrap(), "--jobs", "2",
    ]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "hits=0/200");
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().next().unwrap(), "metric_seed,kind,lambda,residual");
    assert_eq!(text.lines().count(), 201);
}

#[test]
fn static_scan_refuses_uncovered_x_without_force() {
    let (code, _, err) = run(&["static-scan", "--algebra", "h3c", "--preset", "modified-hcf", "--samples", "5"]);
    assert_eq!(code, 1);
    assert!(err.contains("error"));
    let (code, out, _) = run(&["static-scan", "--algebra", "h3c", "--preset", "modified-hcf", "--samples", "5", "--force"]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "hits=0/5");
}

#[test]
fn verify_suites_pass() {
    let (code, out, _) = run(&["verify", "moment-map", "--dims", "2..6", "--samples", "100"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("PASS"));
    for suite in ["trace-identities", "ric11-equals-k"] {
        let (code, out, _) = run(&["verify", suite, "--samples", "20"]);
        assert_eq!(code, 0, "{out}");
    }
    let (code, out, _) = run(&["verify", "norm-law", "--samples", "1", "--t-max", "1"]);
    assert_eq!(code, 0, "{out}");
}

#[test]
fn errors_exit_one() {
    assert_eq!(run(&["flow", "--algebra", "nonexistent"]).0, 1);
    assert_eq!(run(&["flow", "--algebra", "sl2c", "--kind", "kx", "--x", "1,2"]).0, 1);
    assert_eq!(run(&["flow", "--algebra", "sl2c", "--metric", "diag:1,-1,1"]).0, 1);
    assert_eq!(run(&["flow", "--algebra", "h3c", "--kind", "ric11", "--metric", "bogus"]).0, 1);
    assert_eq!(run(&["frobnicate"]).0, 1);
    let out = bin()
        .args(["catalog", "sl2c"])
        .env("LIECURVE_TOL", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn tolerance_override_is_accepted() {
    let out = bin().args(["catalog", "h3c"]).env("LIECURVE_TOL", "1e-8").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["facts"]["nilpotent"], true);
}

#[test]
fn json_algebra_file_is_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("heis.json");
    std::fs::write(&p, r#"{"name": "heis", "dim": 3, "entries": [[0, 1, 2, 1.0]]}"#).unwrap();
    let (code, out, err) = run(&["soliton", "--algebra", p.to_str().unwrap(), "--operator", "m"]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("\"soliton\""));
}
