use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_qlsw"));
    c.env_remove("QLSW_SEED");
    c
}

fn example(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("examples")
        .join(name)
}

fn schema(name: &str) -> jsonschema::Validator {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../docs/schemas")
        .join(format!("{name}.schema.json"));
    let s: Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::validator_for(&s).unwrap()
}

fn assert_valid(name: &str, doc: &Value) {
    let v = schema(name);
    let errors: Vec<String> = v.iter_errors(doc).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{name}: {errors:?}");
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn read(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn error_code(out: &Output) -> String {
    let v: Value = serde_json::from_slice(&out.stderr).expect("stderr is a JSON error object");
    v["error"].as_str().unwrap().to_string()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn solve_reference_instance() {
    let out = run(&[
        "solve",
        "--instance",
        s(&example("spectrum1_ket1.json")),
        "--variant",
        "optimized",
    ]);
    assert!(out.status.success());
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_valid("solution", &report);
    assert!((report["success_probability"].as_f64().unwrap() - 4.0 / 9.0).abs() < 1e-10);
    assert!((report["theta"].as_f64().unwrap() + 1.682).abs() < 5e-4);
    assert_eq!(report["n_digit"], 2);
}

#[test]
fn solve_writes_solution_and_circuit() {
    let dir = tempfile::tempdir().unwrap();
    for variant in ["general", "optimized"] {
        let out = run(&[
            "solve",
            "--instance",
            s(&example("rotated1_ket1.json")),
            "--variant",
            variant,
            "--out",
            s(dir.path()),
        ]);
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        let report = read(&dir.path().join("solution.json"));
        assert_valid("solution", &report);
        assert!(report["fidelity_to_classical"].as_f64().unwrap() > 1.0 - 1e-10);
        assert_valid("circuit", &read(&dir.path().join("circuit.json")));
    }
}

#[test]
fn malformed_instance_is_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(&path, r#"{"A": [[0.5, 0], [0, 0.75]], "b": "#).unwrap();
    let out = run(&["solve", "--instance", s(&path)]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_code(&out), "parse");
}

#[test]
fn non_hermitian_instance() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("nh.json");
    fs::write(&path, r#"{"A": [[0.5, 0.1], [0, 0.75]], "b": [0, 1]}"#).unwrap();
    let out = run(&["solve", "--instance", s(&path)]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_code(&out), "not_hermitian");
}

#[test]
fn missing_file_and_bad_flag() {
    let out = run(&["solve", "--instance", "/nonexistent/instance.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_code(&out), "io");
    let out = run(&[
        "solve",
        "--instance",
        s(&example("spectrum1_ket1.json")),
        "--variant",
        "photonic",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_code(&out), "usage");
    assert!(run(&["--help"]).status.success());
}

#[test]
fn empty_grid() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("grid.json");
    fs::write(&path, r#"{"spectra": [], "inputs": ["1"]}"#).unwrap();
    let out = run(&[
        "sweep",
        "--grid",
        s(&path),
        "--out",
        s(&dir.path().join("out")),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_code(&out), "empty_grid");
}

#[test]
fn photonic_outputs_validate() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "photonic",
        "--instance",
        s(&example("rotated2_plus.json")),
        "--noise",
        s(&example("noise_default.json")),
        "--out",
        s(dir.path()),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report = read(&dir.path().join("report.json"));
    assert_valid("photonic_report", &report);
    assert_valid("counts", &read(&dir.path().join("counts.json")));
    let csv = fs::read_to_string(dir.path().join("rho.csv")).unwrap();
    assert_eq!(csv.lines().count(), 5);
    assert!(csv.starts_with("row,col,re,im\n"));
    // Calibrated double emissions are about 10% for the reference instance only.
    assert!(report["noise"]["pair_amplitude"].as_f64().unwrap() > 0.4);
}

#[test]
fn noiseless_photonic_run_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "photonic",
        "--instance",
        s(&example("rotated1_ket1.json")),
        "--noise",
        s(&example("noise_ideal.json")),
        "--out",
        s(dir.path()),
    ]);
    assert!(out.status.success());
    let report = read(&dir.path().join("report.json"));
    assert!(report["exact_fidelity"].as_f64().unwrap() >= 1.0 - 1e-6);
    assert_eq!(report["double_emission_share"].as_f64().unwrap(), 0.0);
}

#[test]
fn sweep_rows_follow_grid_order() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "sweep",
        "--grid",
        s(&example("grid_inputs.json")),
        "--out",
        s(dir.path()),
        "--trials",
        "100",
        "--shots",
        "2000",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let mut reader = csv::Reader::from_path(dir.path().join("sweep.csv")).unwrap();
    let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    let labels: Vec<&str> = rows.iter().map(|r| r.get(0).unwrap()).collect();
    assert_eq!(labels, ["0", "1", "+", "-", "+i", "-i"]);
    let fidelity = |label: &str| -> f64 {
        rows.iter().find(|r| &r[0] == label).unwrap()[3]
            .parse()
            .unwrap()
    };
    assert!(fidelity("1") >= fidelity("+"));
    for i in 0..6 {
        assert_valid(
            "photonic_report",
            &read(&dir.path().join(format!("point_{i:03}.json"))),
        );
    }
    assert!(!fs::read_dir(dir.path()).unwrap().any(|e| e
        .unwrap()
        .file_name()
        .to_string_lossy()
        .ends_with(".tmp")));
}

#[test]
fn noiseless_sweep_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "sweep",
        "--grid",
        s(&example("grid_spectra.json")),
        "--noise",
        s(&example("noise_ideal.json")),
        "--out",
        s(dir.path()),
        "--trials",
        "100",
    ]);
    assert!(out.status.success());
    let mut reader = csv::Reader::from_path(dir.path().join("sweep.csv")).unwrap();
    for r in reader.records() {
        let f: f64 = r.unwrap()[3].parse().unwrap();
        assert!(f >= 1.0 - 1e-6, "{f}");
    }
}

#[test]
fn tomo_from_counts() {
    let out = run(&[
        "tomo",
        "--counts",
        s(&example("counts_example.json")),
        "--instance",
        s(&example("spectrum1_ket1.json")),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_valid("tomography", &report);

    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("target.json");
    fs::write(&target, "[[0, 0], [1, 0]]").unwrap();
    let from_target = run(&[
        "tomo",
        "--counts",
        s(&example("counts_example.json")),
        "--target",
        s(&target),
    ]);
    assert_eq!(from_target.stdout, out.stdout);

    let incomplete = dir.path().join("counts.json");
    fs::write(&incomplete, r#"{"bases": {"Z": {"plus": 1, "minus": 2}}}"#).unwrap();
    let out = run(&["tomo", "--counts", s(&incomplete), "--target", s(&target)]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_code(&out), "incomplete_data");
}

#[test]
fn seed_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let run_with = |name: &str, seed_flag: Option<&str>, env: Option<&str>| -> Vec<u8> {
        let out_dir = dir.path().join(name);
        let mut c = bin();
        c.args([
            "photonic",
            "--instance",
            s(&example("spectrum1_plus.json")),
            "--out",
            s(&out_dir),
            "--trials",
            "100",
        ]);
        if let Some(seed) = seed_flag {
            c.args(["--seed", seed]);
        }
        if let Some(seed) = env {
            c.env("QLSW_SEED", seed);
        }
        assert!(c.output().unwrap().status.success());
        fs::read(out_dir.join("counts.json")).unwrap()
    };
    let default = run_with("a", None, None);
    assert_eq!(run_with("b", Some("1"), None), default);
    assert_ne!(run_with("c", None, Some("7")), default);
    assert_eq!(
        run_with("d", Some("7"), None),
        run_with("e", None, Some("7"))
    );
    assert_eq!(run_with("f", Some("1"), Some("7")), default);
}

#[test]
fn bundled_inputs_validate() {
    for entry in fs::read_dir(Path::new(env!("CARGO_MANIFEST_DIR")).join("examples")).unwrap() {
        let path = entry.unwrap().path();
        let name = path.file_name().unwrap().to_str().unwrap().to_string();
        let kind = match name.split('_').next().unwrap() {
            "noise" => "noise",
            "grid" => "grid",
            "counts" => "counts",
            _ => "instance",
        };
        assert_valid(kind, &read(&path));
    }
    let bad: Value = serde_json::json!({"b": [1, 0]});
    assert!(!schema("instance").is_valid(&bad));
}
