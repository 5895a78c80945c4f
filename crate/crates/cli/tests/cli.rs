use std::path::Path;
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_dsh-lab"));
    c.env_remove("DSH_LAB_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn file_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

/// Zeroes every `runtime_ms` so reports can be compared.
fn strip_timing(v: &mut Value) {
    match v {
        Value::Object(m) => {
            for (k, x) in m.iter_mut() {
                if k == "runtime_ms" {
                    *x = Value::from(0);
                } else {
                    strip_timing(x);
                }
            }
        }
        Value::Array(a) => a.iter_mut().for_each(strip_timing),
        _ => {}
    }
}

#[test]
fn help_and_bad_flags() {
    assert_eq!(code(&run(&["--help"])), 0);
    assert_eq!(code(&run(&["frobnicate"])), 1);
    assert_eq!(code(&run(&["return-words"])), 1);
    assert_eq!(code(&run(&["return-words", "--word", "0", "--scan-length", "0"])), 1);
}

#[test]
fn return_words_fibonacci() {
    let o = run(&["return-words", "--word", "0"]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    assert_eq!(v["return_words"], serde_json::json!(["0", "01"]));
    assert_eq!(v["return_times"], serde_json::json!([1, 2]));
    assert_eq!(v["stabilization"]["scan_lengths"], serde_json::json!([10000, 20000]));
}

#[test]
fn return_words_errors() {
    let o = run(&["return-words", "--word", "0", "--substitution", "/definitely/missing.json"]);
    assert_eq!(code(&o), 1);
    let o = run(&["return-words", "--word", "11"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("does not occur"));
}

#[test]
fn substitution_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tm.json");
    std::fs::write(&path, r#"{"alphabet": ["0", "1"], "rules": {"0": "01", "1": "10"}, "seed": "0"}"#).unwrap();
    let o = run(&["return-words", "--word", "0", "--substitution", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout_json(&o)["return_times"], serde_json::json!([1, 2, 3]));
    std::fs::write(&path, r#"{"alphabet": ["0"], "rules": {"0": "1"}, "seed": "0"}"#).unwrap();
    assert_eq!(code(&run(&["return-words", "--word", "0", "--substitution", path.to_str().unwrap()])), 1);
}

#[test]
fn build_model_levels_and_cap() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("model.json");
    let o = run(&["build-model", "--word", "0", "--horizon", "3", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let v = file_json(&out);
    let dims: Vec<u64> = v["levels"].as_array().unwrap().iter().map(|l| l["dim"].as_u64().unwrap()).collect();
    assert_eq!(dims, vec![1, 2]);
    assert_eq!(v["dynamics"]["horizon"], 3);

    let o = run(&["build-model", "--word", "01", "--horizon", "5", "--cap", "1"]);
    assert_eq!(code(&o), 0);
    assert!(stdout_json(&o)["levels"].as_array().unwrap().iter().all(|l| l["points"].as_array().unwrap().len() == 1));

    assert_eq!(code(&run(&["build-model", "--word", "0", "--horizon", "0"])), 1);
    assert_eq!(code(&run(&["build-model", "--word", "010", "--horizon", "2"])), 2);
}

#[test]
fn verify_rejects_unknown_suite() {
    let o = run(&["verify", "--suite", "conjj"]);
    assert_eq!(code(&o), 1);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("fullconj") && err.contains("simplicity"), "{err}");
}

#[test]
fn verify_smoke_mode_is_fast_and_passes() {
    let start = Instant::now();
    let o = run(&["verify", "--trials", "1", "--seed", "5"]);
    assert!(start.elapsed() < Duration::from_secs(5));
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = stdout_json(&o);
    assert_eq!(v["passed"], true);
    assert_eq!(v["seed"], 5);
    assert_eq!(v["suites"].as_array().unwrap().len(), 13);
    assert_eq!(v["table"].as_array().unwrap().len(), 13);
}

#[test]
fn verify_is_deterministic_and_reads_seed_from_env() {
    let args = ["verify", "--suite", "permute", "--suite", "condense", "--trials", "20"];
    let mut a = stdout_json(&bin().args(args).env("DSH_LAB_SEED", "42").output().unwrap());
    let mut b = stdout_json(&run(&[&args[..], &["--seed", "42"]].concat()));
    assert_eq!(a["seed"], 42);
    strip_timing(&mut a);
    strip_timing(&mut b);
    assert_eq!(a, b);
    assert_eq!(code(&bin().args(args).env("DSH_LAB_SEED", "x").output().unwrap()), 1);
}

#[test]
fn pipeline_planted_fibonacci() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cert.json");
    let elem = dir.path().join("elem.json");
    let o = run(&["pipeline", "--out", out.to_str().unwrap(), "--element-out", elem.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = file_json(&out);
    let summary = &v["certificate"]["summary"];
    assert!(summary["total_distance"].as_f64().unwrap() < 0.25);
    assert!(summary["min_singular_value"].as_f64().unwrap() > 1e-3);
    assert_eq!(v["config"]["planted"], "1/010");
    assert_eq!(v["chain"]["simple_index"], 1);
    for stage in v["certificate"]["stages"].as_array().unwrap() {
        for (name, p) in stage["predicates"].as_object().unwrap() {
            assert_eq!(p["status"], "pass", "{}.{name}", stage["name"]);
        }
    }
    assert!(file_json(&elem).as_object().unwrap().len() > 1);
}

#[test]
fn pipeline_invalid_and_trivial_inputs() {
    assert_eq!(code(&run(&["pipeline", "--epsilon", "0"])), 1);
    assert_eq!(code(&run(&["pipeline", "--plant", "7/nothing"])), 1);
    assert_eq!(code(&run(&["pipeline", "--max-depth", "0"])), 2);
    assert_eq!(code(&run(&["pipeline", "--word", "1"])), 2);

    let o = run(&["pipeline", "--no-plant"]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    assert_eq!(v["certificate"]["stages"].as_array().unwrap().len(), 1);
    assert_eq!(v["certificate"]["summary"]["total_distance"], 0.0);
}

#[test]
fn pipeline_loads_element_file() {
    let model = stdout_json(&run(&["build-model", "--word", "0", "--horizon", "1"]));
    let mut elem = serde_json::Map::new();
    for (l, level) in model["levels"].as_array().unwrap().iter().enumerate() {
        let n = level["dim"].as_u64().unwrap() as usize;
        for p in level["points"].as_array().unwrap() {
            let id = p["id"].as_str().unwrap();
            let rows: Vec<Vec<[f64; 2]>> =
                (0..n).map(|i| (0..n).map(|j| [if i == j { 2.0 } else { 0.0 }, 0.0]).collect()).collect();
            elem.insert(format!("{l}/{id}"), serde_json::json!({ "n": n, "entries": rows }));
        }
    }
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("in.json");
    std::fs::write(&path, Value::Object(elem).to_string()).unwrap();
    let o = run(&["pipeline", "--element", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout_json(&o)["certificate"]["summary"]["min_singular_value"], 2.0);

    std::fs::write(&path, "{}").unwrap();
    assert_eq!(code(&run(&["pipeline", "--element", path.to_str().unwrap()])), 1);
}

#[test]
fn scalar_shift_inversion_fails_its_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cert.json");
    let o = run(&["pipeline", "--inversion", "scalar-shift", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    let v = file_json(&out);
    assert_eq!(v["certificate"]["parameters"]["inversion"], "scalar_shift");
}

#[test]
fn unitary_eval_endpoints() {
    let o = run(&["unitary", "eval", "--n", "4", "--pair", "1,3", "--t", "1"]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    assert_eq!(v["permutation"], serde_json::json!([3, 2, 1, 4]));
    assert_eq!(v["matrix"]["entries"][0][2], serde_json::json!([1.0, 0.0]));
    assert!(v["unitarity_defect"].as_f64().unwrap() < 1e-12);

    let o = run(&["unitary", "eval", "--n", "6", "--eta", "3", "--block", "2", "--t", "0.4"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout_json(&o)["permutation"], serde_json::json!([1, 5, 6, 4, 2, 3]));

    assert_eq!(code(&run(&["unitary", "eval", "--n", "4", "--t", "0.5"])), 1);
    assert_eq!(code(&run(&["unitary", "eval", "--n", "4", "--pair", "1,2,3", "--t", "0.5"])), 1);
    assert_eq!(code(&run(&["unitary", "eval", "--n", "4", "--pair", "1,3", "--t", "1.5"])), 2);
}
