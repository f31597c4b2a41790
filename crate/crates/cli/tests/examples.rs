//! The documented single-task behaviours: empty task list, a kernel-only
//! run, and the Mandel sweep with its closed-form q-family values.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_fockforge")
}

fn run(dir: &Path, value: &serde_json::Value) -> (i32, PathBuf) {
    let config = dir.join("config.json");
    fs::write(&config, serde_json::to_string_pretty(value).unwrap()).unwrap();
    let out = Command::new(bin())
        .args(["run", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(dir)
        .env_remove("FOCKFORGE_OUT")
        .output()
        .unwrap();
    (out.status.code().unwrap(), dir.to_path_buf())
}

fn base(deformation: serde_json::Value, tasks: serde_json::Value) -> serde_json::Value {
    serde_json::json!({
        "deformation": deformation,
        "truncation": 48,
        "modes": {
            "n_bosonic": 1, "omega": [1.0],
            "m_fermionic": 1, "eps": [0.5], "g": [0.0],
            "selected": "all"
        },
        "z_grid": { "radial": 3, "angular": 4, "radius_fraction": 0.785674201318386 },
        "quadrature_order": 16,
        "tolerances": { "series_tail": 1e-10, "cross_check": 1e-8, "idempotence": 1e-6 },
        "tasks": tasks,
        "output": { "path": "reports", "format": "csv" }
    })
}

fn summary(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap()
}

#[test]
fn empty_task_list_succeeds_with_no_task_reports() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = base(
        serde_json::json!({ "kind": "identity", "n_max": 64 }),
        serde_json::json!([]),
    );
    let (code, out) = run(dir.path(), &cfg);
    assert_eq!(code, 0);
    let csvs: Vec<_> = fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.ends_with(".csv"))
        .collect();
    assert!(csvs.is_empty(), "no per-task reports, got {csvs:?}");
    let s = summary(&out);
    assert_eq!(s["all_pass"], serde_json::Value::Bool(true));
    assert_eq!(s["tasks"].as_array().unwrap().len(), 0);
}

#[test]
fn kernel_only_run_reports_the_idempotence_defect() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = base(
        serde_json::json!({ "kind": "identity", "n_max": 64 }),
        serde_json::json!(["kernel"]),
    );
    let (code, out) = run(dir.path(), &cfg);
    assert_eq!(code, 0);
    assert!(out.join("kernel.csv").exists());

    let s = summary(&out);
    let tasks = s["tasks"].as_array().unwrap();
    assert_eq!(tasks.len(), 1);
    let idem = tasks[0]["assertions"]
        .as_array()
        .unwrap()
        .iter()
        .find(|a| a["name"] == "idempotence")
        .expect("kernel task records its idempotence defect");
    assert_eq!(idem["pass"], serde_json::Value::Bool(true));
    assert!(idem["value"].as_f64().unwrap() <= 1e-6);
}

#[test]
fn mandel_sweep_tabulates_the_closed_q_family_values() {
    let dir = tempfile::tempdir().unwrap();
    // radius_fraction is tuned so the largest grid label has |z|² = 1:
    // the sweep's doubling ladder then lands on |z|² ∈ {1/4, 1/2, 1}.
    let cfg = base(
        serde_json::json!({ "kind": "q", "q": 0.5, "n_max": 64 }),
        serde_json::json!(["mandel"]),
    );
    let (code, out) = run(dir.path(), &cfg);
    assert_eq!(code, 0);

    let table = fs::read_to_string(out.join("optics.csv")).unwrap();
    let rows: Vec<&str> = table
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("modulus_squared"))
        .collect();
    assert_eq!(rows.len(), 3, "one row per ladder rung");

    for (row, (u_ref, q_ref)) in rows.iter().zip([(0.25, -0.125), (0.5, -0.25), (1.0, -0.5)]) {
        let cells: Vec<f64> = row.split(',').map(|c| c.parse().unwrap()).collect();
        assert!((cells[0] - u_ref).abs() < 1e-9, "modulus squared ladder");
        assert!(
            (cells[1] - q_ref).abs() < 1e-9,
            "Mandel value at u = {u_ref}: got {}, want {q_ref}",
            cells[1]
        );
    }
}
