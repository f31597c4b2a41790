//! Batch driver: load a JSON run configuration, execute the requested tasks
//! against the shared deformation table, and write CSV reports plus a JSON
//! summary. Exit codes: 0 all assertions pass, 1 at least one task failed,
//! 2 invalid configuration, 3 I/O failure.

// Validation gates are written `!(v > 0.0)` on purpose: a NaN value must
// fail the gate, which the un-negated comparison would not do.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod report;
pub mod tasks;

use std::path::{Path, PathBuf};

use config::RunConfig;
use report::TaskOutcome;
use tasks::RunContext;

/// Environment variable naming the default report directory (used when
/// `--out` is absent; the config's own `output.path` is the last resort).
pub const OUT_ENV: &str = "FOCKFORGE_OUT";

#[derive(Debug)]
pub enum CliError {
    /// Configuration could not be read as a valid run description.
    Config(String),
    /// Reading the config file or writing reports failed.
    Io(String),
}

impl CliError {
    pub fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Io(m) => m,
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.message())
    }
}

impl std::error::Error for CliError {}

/// Read, parse and structurally validate a run configuration.
pub fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
    let cfg: RunConfig = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("configuration parse error: {e}")))?;
    cfg.validate().map_err(CliError::Config)?;
    Ok(cfg)
}

/// `validate` subcommand: parse + validate only.
pub fn validate(path: &Path) -> Result<(), CliError> {
    load_config(path).map(|_| ())
}

/// Report directory precedence: `--out` flag, then the environment
/// variable, then the config's `output.path`.
fn resolve_out_dir(config: &RunConfig, out_override: Option<&Path>) -> PathBuf {
    if let Some(dir) = out_override {
        return dir.to_path_buf();
    }
    if let Ok(dir) = std::env::var(OUT_ENV) {
        if !dir.is_empty() {
            return PathBuf::from(dir);
        }
    }
    PathBuf::from(&config.output.path)
}

/// `run` subcommand. Tasks execute sequentially in config order (grid
/// points within a task fan out over the thread pool); reports are written
/// even when assertions fail. Returns whether everything passed.
pub fn run(
    config_path: &Path,
    out_override: Option<&Path>,
    jobs: Option<usize>,
) -> Result<bool, CliError> {
    let config = load_config(config_path)?;
    if let Some(n) = jobs {
        // Ignore the error: the global pool can only be sized once per
        // process, and a later identical request is a no-op anyway.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let out_dir = resolve_out_dir(&config, out_override);

    let ctx = RunContext::new(&config).map_err(CliError::Config)?;
    let mut outcomes = Vec::new();
    for task in config.canonical_tasks() {
        let outcome = match tasks::execute(task, &ctx) {
            Ok(report) => TaskOutcome::completed(task.name(), report),
            Err(message) => TaskOutcome::failed(task.name(), message),
        };
        outcomes.push(outcome);
    }
    report::write_reports(&out_dir, &config, &outcomes)
}
