use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn models() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../models")
}

fn covdeg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_covdeg"))
        .args(args)
        .env_remove("COVDEG_JOBS")
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn without_timings(mut v: Value) -> Value {
    v["meta"]["timings_ms"] = Value::Null;
    v
}

#[test]
fn example_one_full_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    let model = models().join("example1.json");
    let out = covdeg(&["mle", model.to_str().unwrap(), "--json", report.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = read_json(&report);
    assert_eq!(r["meta"]["solver"]["ml_degree"], 3);
    let d = &r["decomposition"];
    assert_eq!((d["total"].as_i64(), d["origin"].as_i64()), (Some(25), Some(16)));
    assert_eq!((d["infinity"].as_i64(), d["affine"].as_i64()), (Some(6), Some(3)));
    assert_eq!(d["points_at_infinity"].as_array().unwrap().len(), 3);
    assert_eq!(r["solutions"].as_array().unwrap().len(), 3);
    let want = [[3.6257, 0.5124, 0.0], [0.5124, 3.1329, -1.7340], [0.0, -1.7340, 4.3154]];
    for i in 0..3 {
        for j in 0..3 {
            let got = r["mle"]["sigma_hat"][i][j].as_f64().unwrap();
            assert!((got - want[i][j]).abs() < 1e-4, "{i},{j}: {got}");
        }
    }
    assert_eq!(r["meta"]["model"]["A"][1][2], -2);
    assert!(String::from_utf8_lossy(&out.stdout).contains("25 = 16 (origin) + 6 (infinity) + 3 (affine)"));
}

#[test]
fn equal_matrices_fail_certification() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    let model = models().join("degenerate.json");
    let out = covdeg(&["certify", model.to_str().unwrap(), "--json", report.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "genericity");
    let failed: Vec<&str> = err["error"]["details"]["failed_checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    assert!(failed.contains(&"Res(Px,Py)"));
    let r = read_json(&report);
    let check = r["certificate"]["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "Res(Px,Py)")
        .unwrap();
    assert_eq!((&check["value"], &check["nonzero"]), (&Value::from("0"), &Value::from(false)));
    assert!(r["decomposition"].is_null() && r["mle"].is_null());
}

#[test]
fn plain_error_without_json() {
    let out = covdeg(&["certify", models().join("degenerate.json").to_str().unwrap(), "--quiet"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error: genericity certificate failed"));
}

#[test]
fn fractions_and_samples_are_exact() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    let model = write(
        dir.path(),
        "m.json",
        r#"{"n": 2, "A": [[1, "1/2"], ["1/2", 2]], "B": [[1, 0], [0, 3]], "samples": [[1, 0], [0, 1]]}"#,
    );
    let out = covdeg(&["certify", &model, "--json", report.to_str().unwrap(), "--quiet"]);
    assert!(out.status.code() == Some(0) || out.status.code() == Some(2));
    let echo = &read_json(&report)["meta"]["model"];
    assert_eq!(echo["A"][0][1], "1/2");
    assert_eq!(echo["S"], serde_json::json!([["1/2", 0], [0, "1/2"]]));
}

#[test]
fn csv_samples_read_decimals_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    write(dir.path(), "data.csv", "# two draws\n0.1, 0\n0, 0.3\n");
    let model = write(
        dir.path(),
        "m.json",
        r#"{"n": 2, "A": [[2, 1], [1, 2]], "B": [[1, 0], [0, 3]], "samples": "data.csv"}"#,
    );
    covdeg(&["certify", &model, "--json", report.to_str().unwrap(), "--quiet"]);
    let echo = &read_json(&report)["meta"]["model"];
    assert_eq!(echo["S"], serde_json::json!([["1/200", 0], [0, "9/200"]]));
}

#[test]
fn input_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.json");
    let out = covdeg(&["certify", missing.to_str().unwrap(), "--json", "-"]);
    assert_eq!(out.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "io");

    let bad = write(dir.path(), "bad.json", "{\"n\": 2, \"A\": [[1, 0], [0, 1]],\n \"B\": oops}");
    let out = covdeg(&["certify", &bad, "--json", "-"]);
    assert_eq!(out.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "parse");
    assert!(err["error"]["details"]["context"].as_str().unwrap().contains("bad.json:2:"));

    let asym = write(
        dir.path(),
        "asym.json",
        r#"{"n": 2, "A": [[1, 0], [0, 1]], "B": [[1, 2], [5, 1]], "S": [[1, 0], [0, 1]]}"#,
    );
    let out = covdeg(&["certify", &asym, "--json", "-"]);
    assert_eq!(out.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "asymmetric_matrix");
    assert_eq!(err["error"]["details"]["field"], "B");
    assert_eq!(err["error"]["details"]["entry"], serde_json::json!([0, 1]));
}

#[test]
fn infeasible_model_exits_with_four() {
    let dir = tempfile::tempdir().unwrap();
    let model = write(
        dir.path(),
        "m.json",
        r#"{"n": 2, "A": [[-1, 4], [4, -2]], "B": [[1, 3], [3, -3]], "S": [[-4, 3], [3, 0]]}"#,
    );
    let out = covdeg(&["mle", &model, "--json", "-", "--quiet"]);
    assert_eq!(out.status.code(), Some(4));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "no_feasible_mle");
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report["mle"].is_null());
    assert_eq!(report["solutions"].as_array().unwrap().len(), 1);
}

#[test]
fn reports_round_trip_and_are_deterministic() {
    let model = models().join("example1.json");
    let run = || {
        let out = covdeg(&["mle", model.to_str().unwrap(), "--json", "-", "--quiet"]);
        assert_eq!(out.status.code(), Some(0));
        String::from_utf8(out.stdout).unwrap()
    };
    let (a, b) = (run(), run());
    let (va, vb): (Value, Value) = (serde_json::from_str(&a).unwrap(), serde_json::from_str(&b).unwrap());
    assert_eq!(
        serde_json::to_string(&without_timings(va.clone())).unwrap(),
        serde_json::to_string(&without_timings(vb)).unwrap()
    );
    let parsed: covdeg::Report = serde_json::from_str(&a).unwrap();
    assert_eq!(serde_json::to_value(&parsed).unwrap(), va);
    assert_eq!(parsed.meta.timings_ms.keys().collect::<Vec<_>>(), ["certify", "decompose", "load", "mle", "solve"]);
}

#[test]
fn witness_models_certify() {
    let dir = tempfile::tempdir().unwrap();
    for n in 2..=5 {
        let path = dir.path().join(format!("w{n}.json"));
        let out = covdeg(&["witness", "--n", &n.to_string(), "--json", path.to_str().unwrap(), "--quiet"]);
        assert_eq!(out.status.code(), Some(0));
        let out = covdeg(&["certify", path.to_str().unwrap(), "--quiet"]);
        assert_eq!(out.status.code(), Some(0), "n = {n}");
    }
    let out = covdeg(&["witness", "--n", "3", "--family", "e1"]);
    let model: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(model["S"], serde_json::json!([[1, 0, 0], [0, 0, 0], [0, 0, 0]]));
}

#[test]
fn sweep_is_independent_of_job_count() {
    let run = |jobs: &str| {
        let out = covdeg(&[
            "sweep", "--n-min", "2", "--n-max", "4", "--trials", "4", "--seed", "7", "--jobs", jobs, "--json", "-",
            "--quiet",
        ]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        without_timings(serde_json::from_slice(&out.stdout).unwrap())
    };
    let one = run("1");
    assert_eq!(one, run("3"));
    let sizes = one["sweep"]["sizes"].as_array().unwrap();
    assert_eq!(sizes.len(), 3);
    for s in sizes {
        assert_eq!(s["failed"], 0);
        assert_eq!(s["confirmed"].as_u64().unwrap() + s["inconclusive"].as_u64().unwrap(), 4);
    }
}
