use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn rbkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rbkit"))
        .args(args)
        .env_remove("RBKIT_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn ok_json(args: &[&str]) -> Value {
    let out = rbkit(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn schema_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas")
}

/// Validates with Python's `jsonschema` package (Draft 2020-12).
fn assert_valid(schema: &str, doc: &Path) {
    let script = "import json,sys,jsonschema\n\
                  s=json.load(open(sys.argv[1]))\n\
                  jsonschema.Draft202012Validator.check_schema(s)\n\
                  jsonschema.validate(json.load(open(sys.argv[2])),s,cls=jsonschema.Draft202012Validator)\n";
    let out = Command::new("python3")
        .args(["-c", script])
        .arg(schema_dir().join(format!("{schema}.schema.json")))
        .arg(doc)
        .output()
        .expect("python3 with the jsonschema package is needed for schema checks");
    assert!(
        out.status.success(),
        "{} does not match {schema}: {}",
        doc.display(),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

const REAL_CONFIG: &str = r#"{
  "n_qubits": 2,
  "group": "real",
  "lengths": [1, 2, 4, 8, 16, 32, 64, 128],
  "sequences_per_length": 40,
  "gate_channel": {"n": 2, "weights": [{"pauli": "ZI", "w": 0.006}, {"pauli": "XI", "w": 0.004}, {"pauli": "YI", "w": 0.003}]},
  "measured_pauli": "ZI",
  "rng_seed": 9
}"#;

#[test]
fn blocks_examples() {
    let sizes = |g: &str, n: &str| ok_json(&["blocks", "--group", g, "-n", n, "--format", "json"])["sizes"].clone();
    assert_eq!(sizes("real", "2"), serde_json::json!([9, 6]));
    assert_eq!(sizes("cnot-pauli", "3"), serde_json::json!([7, 7, 21, 28]));
    assert_eq!(sizes("full", "2"), serde_json::json!([15]));
    let table = rbkit(&["blocks", "--group", "real", "-n", "2"]);
    let text = String::from_utf8(table.stdout).unwrap();
    assert!(text.contains("B1") && text.contains("(match)"), "{text}");
}

#[test]
fn blocks_cap_is_exit_3() {
    let out = rbkit(&["blocks", "--group", "pauli", "-n", "13"]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("cap"));
}

#[test]
fn lambdas_examples() {
    let r = ok_json(&["lambdas", "--group", "real", "-n", "2", "--p", "0.01,0.005"]);
    let l1 = r["lambdas"][0].as_f64().unwrap();
    assert!((l1 - 0.984444).abs() < 1e-6);
    let r = ok_json(&["lambdas", "--group", "cnot-pauli", "-n", "2", "--p", "0.01,0.01,0,0"]);
    assert!((r["lambdas"][2].as_f64().unwrap() - 0.973333).abs() < 1e-6);
    assert!(r["max_census_deviation"].as_f64().unwrap() < 1e-12);
    let r = ok_json(&["lambdas", "--group", "real", "-n", "3", "--p", "0,0"]);
    assert!(r["lambdas"].as_array().unwrap().iter().all(|v| v.as_f64() == Some(1.0)));
    let out = rbkit(&["lambdas", "--group", "real", "-n", "2", "--p", "0.1"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn twirl_verify_examples() {
    let dir = tempfile::tempdir().unwrap();
    let id = write(dir.path(), "id.json", r#"{"n": 2, "weights": []}"#);
    let r = ok_json(&["twirl-verify", "--group", "real", "-n", "2", id.to_str().unwrap()]);
    assert_eq!(r["block_uniformity_deviation"].as_f64(), Some(0.0));
    assert_eq!(r["eigenvalue_deviation"].as_f64(), Some(0.0));
    assert_eq!(r["pass"], Value::Bool(true));

    let ch = write(
        dir.path(),
        "c.json",
        r#"{"n": 1, "weights": [{"pauli": "X", "w": 0.031}, {"pauli": "Y", "w": 0.007}, {"pauli": "Z", "w": 0.012}]}"#,
    );
    for g in ["pauli", "cnot-pauli", "real", "full"] {
        let r = ok_json(&["twirl-verify", "--group", g, "-n", "1", ch.to_str().unwrap()]);
        for key in ["block_uniformity_deviation", "eigenvalue_deviation", "idempotence_deviation"] {
            assert!(r[key].as_f64().unwrap() < 1e-12, "{g} {key}");
        }
    }
    let out_path = dir.path().join("twirl.json");
    fs::write(&out_path, rbkit(&["twirl-verify", "--group", "full", "-n", "1", ch.to_str().unwrap()]).stdout).unwrap();
    assert_valid("twirl", &out_path);

    let id3 = write(dir.path(), "id3.json", r#"{"n": 3, "weights": []}"#);
    let out = rbkit(&["twirl-verify", "--group", "full", "-n", "3", "--cap", "500", id3.to_str().unwrap()]);
    assert_eq!(code(&out), 3);
}

#[test]
fn simulate_zero_error_and_replay() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "zero.toml",
        r#"
n_qubits = 2
group = "cnot-pauli"
lengths = [1, 3, 9]
sequences_per_length = 5
shots_per_sequence = 20
measured_pauli = "-XZ"
rng_seed = 3

[gate_channel]
n = 2
weights = []
"#,
    );
    let out = dir.path().join("a");
    ok_json(&["simulate", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    let csv = fs::read_to_string(out.join("fidelities.csv")).unwrap();
    assert!(csv.lines().skip(1).all(|l| l.ends_with(",1.0")), "{csv}");

    let again = dir.path().join("b");
    ok_json(&["simulate", cfg.to_str().unwrap(), "--out", again.to_str().unwrap()]);
    assert_eq!(csv, fs::read_to_string(again.join("fidelities.csv")).unwrap());
}

#[test]
fn simulate_reports_missing_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.json", r#"{"n_qubits": 2, "group": "real", "lengths": [1]}"#);
    let out = rbkit(&["simulate", cfg.to_str().unwrap(), "--out", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing field `sequences_per_length`"));
}

#[test]
fn simulate_uses_env_out_dir_and_seed_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", REAL_CONFIG);
    let env_out = dir.path().join("from-env");
    let out = Command::new(env!("CARGO_BIN_EXE_rbkit"))
        .args(["simulate", cfg.to_str().unwrap(), "--seed", "77"])
        .env("RBKIT_OUT_DIR", &env_out)
        .output()
        .unwrap();
    assert!(out.status.success());
    let manifest: Value = serde_json::from_str(&fs::read_to_string(env_out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["rng_seed"], 77);
    for (schema, file) in [("config", "config.json"), ("summary", "summary.json"), ("manifest", "manifest.json")] {
        assert_valid(schema, &env_out.join(file));
    }
}

#[test]
fn json_and_toml_configs_agree() {
    let dir = tempfile::tempdir().unwrap();
    let json = write(dir.path(), "c.json", REAL_CONFIG);
    let cfg: Value = serde_json::from_str(REAL_CONFIG).unwrap();
    let toml_text = toml::to_string(&cfg).unwrap();
    let toml = write(dir.path(), "c.toml", &toml_text);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    ok_json(&["simulate", json.to_str().unwrap(), "--out", a.to_str().unwrap()]);
    ok_json(&["simulate", toml.to_str().unwrap(), "--out", b.to_str().unwrap()]);
    assert_eq!(
        fs::read(a.join("fidelities.csv")).unwrap(),
        fs::read(b.join("fidelities.csv")).unwrap()
    );
    let hash = |d: &Path| -> Value {
        serde_json::from_str::<Value>(&fs::read_to_string(d.join("manifest.json")).unwrap()).unwrap()["config_hash"].clone()
    };
    assert_eq!(hash(&a), hash(&b));
}

#[test]
fn fit_recovers_synthetic_curve() {
    let dir = tempfile::tempdir().unwrap();
    let mut csv = String::from("length,sequence_index,fidelity\n");
    for k in 0..9 {
        let l = 1u32 << k;
        csv += &format!("{l},0,{:?}\n", 0.5 + 0.45 * 0.97f64.powi(l as i32));
    }
    let path = write(dir.path(), "syn.csv", &csv);
    let out_dir = dir.path().join("fit");
    let r = ok_json(&["fit", path.to_str().unwrap(), "--out", out_dir.to_str().unwrap()]);
    let fit = &r["fits"][0]["fit"];
    assert!((fit["lambdas"][0].as_f64().unwrap() - 0.97).abs() < 1e-6);
    assert!((fit["c0"].as_f64().unwrap() - 0.5).abs() < 1e-6);
    let curve = fs::read_to_string(out_dir.join("curve.csv")).unwrap();
    assert!(curve.starts_with("series,length,mean,stderr,fitted\n"));
    assert_eq!(curve.lines().count(), 10);
    assert_valid("fit", &out_dir.join("fit.json"));

    let short = write(dir.path(), "short.csv", "length,sequence_index,fidelity\n1,0,0.9\n2,0,0.8\n");
    let out = rbkit(&["fit", short.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    let flat = write(
        dir.path(),
        "flat.csv",
        "length,sequence_index,fidelity\n1,0,0.75\n2,0,0.75\n4,0,0.75\n",
    );
    assert_eq!(code(&rbkit(&["fit", flat.to_str().unwrap()])), 4);
}

#[test]
fn end_to_end_real_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", REAL_CONFIG);
    let run = dir.path().join("run");
    ok_json(&["simulate", cfg.to_str().unwrap(), "--out", run.to_str().unwrap()]);
    let csv = run.join("fidelities.csv");
    let r = ok_json(&[
        "fit",
        csv.to_str().unwrap(),
        "--variant",
        "real-from-lambda1",
        "-n",
        "2",
        "--out",
        run.to_str().unwrap(),
    ]);
    let est = &r["infidelity"];
    let (lo, hi) = (est["lower"].as_f64().unwrap(), est["upper"].as_f64().unwrap());
    let (slo, shi) = (est["lower_stderr"].as_f64().unwrap(), est["upper_stderr"].as_f64().unwrap());
    assert!(lo - 3.0 * slo <= 0.013 && 0.013 <= hi + 3.0 * shi, "[{lo}, {hi}]");

    let report = ok_json(&["report", run.to_str().unwrap()]);
    assert_eq!(report["pass"], Value::Bool(true));
    assert_eq!(report["measured_block"], 1);
    assert!(report["warnings"].as_array().unwrap().is_empty());
    assert_valid("report", &run.join("report.json"));

    let wrong = rbkit(&["fit", csv.to_str().unwrap(), "--variant", "real", "--group", "cnot-pauli", "-n", "2"]);
    assert_eq!(code(&wrong), 3);
}

#[test]
fn report_errors_and_warnings() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty");
    fs::create_dir(&empty).unwrap();
    assert_eq!(code(&rbkit(&["report", empty.to_str().unwrap()])), 2);

    let cfg = write(dir.path(), "c.json", REAL_CONFIG);
    let run = dir.path().join("run");
    ok_json(&["simulate", cfg.to_str().unwrap(), "--out", run.to_str().unwrap()]);
    // results from another seed dropped into the same directory
    let other = dir.path().join("other");
    ok_json(&["simulate", cfg.to_str().unwrap(), "--out", other.to_str().unwrap(), "--seed", "10"]);
    fs::copy(other.join("fidelities.csv"), run.join("fidelities.csv")).unwrap();
    fs::copy(other.join("config.json"), run.join("config.json")).unwrap();
    let out = rbkit(&["report", run.to_str().unwrap()]);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("warning: manifest seed 9 differs from config seed 10"), "{stderr}");
}

#[test]
fn blocks_and_lambdas_match_schemas() {
    let dir = tempfile::tempdir().unwrap();
    for (schema, args) in [
        ("blocks", vec!["blocks", "--group", "cnot-pauli", "-n", "1", "--format", "json"]),
        ("lambdas", vec!["lambdas", "--group", "pauli", "-n", "1", "--p", "0.01,0,0.02"]),
    ] {
        let out = rbkit(&args);
        assert!(out.status.success());
        let p = dir.path().join(format!("{schema}.json"));
        fs::write(&p, out.stdout).unwrap();
        assert_valid(schema, &p);
    }
}
