//! End-to-end checks of the batch driver: reproducible report bodies on the
//! shipped reference configuration, and the documented exit-code contract.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::Instant;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_fockforge")
}

fn reference_config() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/reference.json")
}

fn run_into(out_dir: &Path, config: &Path) -> Output {
    Command::new(bin())
        .args(["run", "--config"])
        .arg(config)
        .arg("--out")
        .arg(out_dir)
        .env_remove("FOCKFORGE_OUT")
        .output()
        .expect("binary launches")
}

fn exit_code(output: &Output) -> i32 {
    output.status.code().expect("no signal termination")
}

/// Report body with the run-varying timestamp lines removed: the CSV
/// `# generated <s>` header and the summary's `"generated_unix"` field.
fn stable_body(path: &Path) -> String {
    let text = fs::read_to_string(path).unwrap();
    text.lines()
        .filter(|line| {
            !line.starts_with("# generated") && !line.trim_start().starts_with("\"generated_unix\"")
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn file_names(dir: &Path) -> BTreeSet<String> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect()
}

/// Write a JSON value to a temp file and return its path.
fn write_config(dir: &Path, value: &serde_json::Value) -> PathBuf {
    let path = dir.join("config.json");
    fs::write(&path, serde_json::to_string_pretty(value).unwrap()).unwrap();
    path
}

fn reference_value() -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(reference_config()).unwrap()).unwrap()
}

/// Small fast configuration for exit-code probes.
fn small_value() -> serde_json::Value {
    serde_json::json!({
        "deformation": { "kind": "q", "q": 0.5, "n_max": 24 },
        "truncation": 12,
        "modes": {
            "n_bosonic": 1, "omega": [1.0],
            "m_fermionic": 1, "eps": [0.5], "g": [0.0],
            "selected": "all"
        },
        "z_grid": { "radial": 2, "angular": 3, "radius_fraction": 0.7 },
        "quadrature_order": 8,
        "tolerances": { "series_tail": 1e-10, "cross_check": 1e-8, "idempotence": 1e-6 },
        "tasks": ["ops"],
        "output": { "path": "reports", "format": "csv" }
    })
}

#[test]
fn reference_run_is_reproducible_byte_for_byte() {
    let clock = Instant::now();
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    let config = reference_config();

    let out_a = run_into(dir_a.path(), &config);
    let out_b = run_into(dir_b.path(), &config);
    assert_eq!(exit_code(&out_a), 0, "stderr: {}", String::from_utf8_lossy(&out_a.stderr));
    assert_eq!(exit_code(&out_b), 0, "stderr: {}", String::from_utf8_lossy(&out_b.stderr));

    let names_a = file_names(dir_a.path());
    let names_b = file_names(dir_b.path());
    let expected: BTreeSet<String> = [
        "ops", "spectrum", "kernel", "resolve", "density", "projector", "quantize", "optics",
        "su11", "evolve",
    ]
    .iter()
    .map(|t| format!("{t}.csv"))
    .chain(std::iter::once("summary.json".to_string()))
    .collect();
    assert_eq!(names_a, expected, "exactly one report per task plus the summary");
    assert_eq!(names_a, names_b);

    for name in &names_a {
        let body_a = stable_body(&dir_a.path().join(name));
        let body_b = stable_body(&dir_b.path().join(name));
        assert_eq!(body_a, body_b, "{name} differs between identical runs");
        assert!(!body_a.is_empty(), "{name} has content beyond the timestamp");
    }

    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir_a.path().join("summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["all_pass"], serde_json::Value::Bool(true));
    assert_eq!(summary["tasks"].as_array().unwrap().len(), 10);

    let elapsed = clock.elapsed();
    println!(
        "criterion 12 cli determinism: PASS ({} files byte-stable, {:.2?})",
        names_a.len(),
        elapsed
    );
    assert!(elapsed.as_secs_f64() < 30.0, "budget exceeded: {elapsed:.2?}");
}

#[test]
fn thread_count_does_not_change_report_bodies() {
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    let config = reference_config();

    let single = Command::new(bin())
        .args(["run", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(dir_a.path())
        .args(["--jobs", "1"])
        .env_remove("FOCKFORGE_OUT")
        .output()
        .unwrap();
    let many = Command::new(bin())
        .args(["run", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(dir_b.path())
        .args(["--jobs", "4"])
        .env_remove("FOCKFORGE_OUT")
        .output()
        .unwrap();
    assert_eq!(exit_code(&single), 0);
    assert_eq!(exit_code(&many), 0);
    for name in file_names(dir_a.path()) {
        assert_eq!(
            stable_body(&dir_a.path().join(&name)),
            stable_body(&dir_b.path().join(&name)),
            "{name} must not depend on the pool size"
        );
    }
}

#[test]
fn invalid_configurations_exit_with_code_two() {
    let dir = tempfile::tempdir().unwrap();

    let mut v = reference_value();
    v["surprise"] = serde_json::json!(1);
    let out = run_into(dir.path(), &write_config(dir.path(), &v));
    assert_eq!(exit_code(&out), 2, "unknown top-level key");

    let mut v = reference_value();
    v["z_grid"]["radius_fraction"] = serde_json::json!(0.96);
    let out = run_into(dir.path(), &write_config(dir.path(), &v));
    assert_eq!(exit_code(&out), 2, "radius_fraction beyond the cap");

    let mut v = reference_value();
    v["tasks"] = serde_json::json!(["ops", "wigner"]);
    let out = run_into(dir.path(), &write_config(dir.path(), &v));
    assert_eq!(exit_code(&out), 2, "unknown task name");

    let out = Command::new(bin())
        .args(["validate", "--config"])
        .arg(write_config(dir.path(), &v))
        .output()
        .unwrap();
    assert_eq!(exit_code(&out), 2, "validate rejects what run rejects");

    let good = write_config(dir.path(), &reference_value());
    let out = Command::new(bin())
        .args(["validate", "--config"])
        .arg(&good)
        .output()
        .unwrap();
    assert_eq!(exit_code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("configuration OK"));
}

#[test]
fn io_failures_exit_with_code_three() {
    let dir = tempfile::tempdir().unwrap();

    let missing = dir.path().join("nope.json");
    let out = run_into(dir.path(), &missing);
    assert_eq!(exit_code(&out), 3, "unreadable configuration file");

    let config = write_config(dir.path(), &small_value());
    let out = run_into(Path::new("/dev/null/reports"), &config);
    assert_eq!(exit_code(&out), 3, "unwritable report directory");
}

#[test]
fn failed_assertions_exit_with_code_one_and_still_report() {
    let dir = tempfile::tempdir().unwrap();
    let mut v = small_value();
    v["tolerances"]["cross_check"] = serde_json::json!(1e-300);
    let out = run_into(dir.path(), &write_config(dir.path(), &v));
    assert_eq!(exit_code(&out), 1, "honest numerical defect above an absurd budget");

    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["all_pass"], serde_json::Value::Bool(false));
    assert!(dir.path().join("ops.csv").exists(), "reports are written even on failure");
}

#[test]
fn out_dir_env_var_is_honored_when_no_flag_is_given() {
    let dir = tempfile::tempdir().unwrap();
    let reports = dir.path().join("from_env");
    let config = write_config(dir.path(), &small_value());
    let out = Command::new(bin())
        .args(["run", "--config"])
        .arg(&config)
        .env("FOCKFORGE_OUT", &reports)
        .output()
        .unwrap();
    assert_eq!(exit_code(&out), 0);
    assert!(reports.join("ops.csv").exists());
    assert!(reports.join("summary.json").exists());
}
