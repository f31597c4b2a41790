//! Report writing. Every run produces one CSV per task plus a single
//! `summary.json`. Bodies are deterministic; the only run-varying content is
//! the timestamp, isolated to the first line of each CSV (`# generated <s>`)
//! and the leading `generated_unix` field of the summary.

use std::fs;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::config::RunConfig;
use crate::CliError;

/// One named check with its measured value and budget.
#[derive(Debug, Clone, Serialize)]
pub struct Assertion {
    pub name: String,
    /// How `value` relates to `bound` for a pass: "<=", ">" or ">=".
    pub relation: &'static str,
    pub value: f64,
    pub bound: f64,
    pub pass: bool,
}

impl Assertion {
    pub fn at_most(name: &str, value: f64, bound: f64) -> Self {
        Assertion {
            name: name.to_string(),
            relation: "<=",
            value,
            bound,
            pass: value <= bound,
        }
    }

    pub fn above(name: &str, value: f64, bound: f64) -> Self {
        Assertion {
            name: name.to_string(),
            relation: ">",
            value,
            bound,
            pass: value > bound,
        }
    }

    pub fn at_least(name: &str, value: f64, bound: f64) -> Self {
        Assertion {
            name: name.to_string(),
            relation: ">=",
            value,
            bound,
            pass: value >= bound,
        }
    }
}

/// What a task computes: a CSV table plus its assertions.
pub struct TaskReport {
    pub columns: &'static str,
    pub rows: Vec<String>,
    pub assertions: Vec<Assertion>,
}

/// Task result as recorded in the summary. A task that errored carries the
/// message and no table; its assertions are empty and it counts as failed.
#[derive(Serialize)]
pub struct TaskOutcome {
    pub task: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub assertions: Vec<Assertion>,
    #[serde(skip)]
    csv: Option<(&'static str, Vec<String>)>,
}

impl TaskOutcome {
    pub fn completed(task: &'static str, report: TaskReport) -> Self {
        TaskOutcome {
            task,
            error: None,
            assertions: report.assertions,
            csv: Some((report.columns, report.rows)),
        }
    }

    pub fn failed(task: &'static str, message: String) -> Self {
        TaskOutcome {
            task,
            error: Some(message),
            assertions: Vec::new(),
            csv: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.error.is_none() && self.assertions.iter().all(|a| a.pass)
    }
}

#[derive(Serialize)]
struct Summary<'a> {
    generated_unix: u64,
    all_pass: bool,
    config: &'a RunConfig,
    tasks: &'a [TaskOutcome],
}

fn io_err(context: &str, e: std::io::Error) -> CliError {
    CliError::Io(format!("{context}: {e}"))
}

/// Write every task CSV plus `summary.json` into `out_dir` (created if
/// missing). Returns whether every task passed every assertion.
pub fn write_reports(
    out_dir: &Path,
    config: &RunConfig,
    outcomes: &[TaskOutcome],
) -> Result<bool, CliError> {
    fs::create_dir_all(out_dir)
        .map_err(|e| io_err(&format!("creating {}", out_dir.display()), e))?;
    let stamp = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);

    for outcome in outcomes {
        if let Some((columns, rows)) = &outcome.csv {
            let path = out_dir.join(format!("{}.csv", outcome.task));
            let mut body = String::with_capacity(rows.len() * 32 + 64);
            body.push_str(&format!("# generated {stamp}\n"));
            body.push_str(columns);
            body.push('\n');
            for row in rows {
                body.push_str(row);
                body.push('\n');
            }
            fs::write(&path, body).map_err(|e| io_err(&format!("writing {}", path.display()), e))?;
        }
    }

    let all_pass = outcomes.iter().all(TaskOutcome::passed);
    let summary = Summary {
        generated_unix: stamp,
        all_pass,
        config,
        tasks: outcomes,
    };
    let mut text = serde_json::to_string_pretty(&summary)
        .map_err(|e| CliError::Io(format!("encoding summary: {e}")))?;
    text.push('\n');
    let path = out_dir.join("summary.json");
    fs::write(&path, text).map_err(|e| io_err(&format!("writing {}", path.display()), e))?;
    Ok(all_pass)
}
