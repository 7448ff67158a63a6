//! Experiment runner behind the `ecprep` binary.
//!
//! A TOML config describes one model and a list of tasks; [`run`] checks the
//! whole config before computing anything, then executes the tasks and
//! returns long-format [`Table`]s. [`write_outputs`] stores one CSV per table
//! plus `metadata.json` (config echo, library version, seed, table index)
//! and `timing.json` (wall time, the only run-dependent output).

pub mod catalog;
pub mod config;
mod resolve;
pub mod table;
mod tasks;

use std::fmt;
use std::path::Path;
use std::time::Instant;

use serde_json::json;

pub use config::ExperimentConfig;
pub use table::Table;

/// Failure classes with their process exit codes.
#[derive(Debug, Clone, PartialEq)]
pub enum RunError {
    /// Unreadable, malformed or inconsistent config (exit 1).
    Config(String),
    /// Numerical or capacity failure (exit 2).
    Compute(String),
    /// Output could not be written (exit 1).
    Io(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) | RunError::Io(_) => 1,
            RunError::Compute(_) => 2,
        }
    }
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Config(m) => write!(f, "config error: {m}"),
            RunError::Compute(m) => write!(f, "computation failed: {m}"),
            RunError::Io(m) => write!(f, "output error: {m}"),
        }
    }
}

impl std::error::Error for RunError {}

impl From<ecprep::Error> for RunError {
    fn from(e: ecprep::Error) -> Self {
        RunError::Compute(e.to_string())
    }
}

/// Tables produced by one experiment.
#[derive(Clone, Debug)]
pub struct Outputs {
    pub config: ExperimentConfig,
    pub tables: Vec<Table>,
    /// Per-task provenance (kind, method description, table names).
    pub provenance: Vec<serde_json::Value>,
    pub wall_time_s: f64,
}

impl Outputs {
    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }
}

/// Reads a config from a file path, or from the bundled catalog when no file
/// of that name exists.
pub fn load(spec: &str) -> Result<ExperimentConfig, RunError> {
    let path = Path::new(spec);
    let text = if path.exists() {
        std::fs::read_to_string(path).map_err(|e| RunError::Config(format!("cannot read {spec}: {e}")))?
    } else if let Some(text) = catalog::text(spec.trim_end_matches(".toml")) {
        text.to_string()
    } else {
        return Err(RunError::Config(format!(
            "{spec}: no such file and no bundled config of that name (see `ecprep list`)"
        )));
    };
    config::parse(&text).map_err(|e| RunError::Config(format!("{spec}: {e}")))
}

/// Checks every task against the library's preconditions without computing.
pub fn validate(cfg: &ExperimentConfig) -> Result<(), RunError> {
    tasks::run_all(cfg, true).map(|_| ())
}

/// Validates, then runs every task. `workers` bounds the thread count
/// (default: all cores); results do not depend on it.
pub fn run(cfg: &ExperimentConfig, workers: Option<usize>) -> Result<Outputs, RunError> {
    validate(cfg)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = workers {
        if n == 0 {
            return Err(RunError::Config("--workers must be at least 1".into()));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| RunError::Compute(format!("thread pool: {e}")))?;
    let t0 = Instant::now();
    let (tables, provenance) = pool.install(|| tasks::run_all(cfg, false))?;
    Ok(Outputs {
        config: cfg.clone(),
        tables,
        provenance,
        wall_time_s: t0.elapsed().as_secs_f64(),
    })
}

/// Deterministic metadata sidecar.
pub fn metadata(out: &Outputs) -> serde_json::Value {
    let tables: Vec<_> = out
        .tables
        .iter()
        .map(|t| {
            json!({
                "file": format!("{}.csv", t.name),
                "key_columns": t.columns.iter().map(|c| c.name.clone()).collect::<Vec<_>>(),
                "rows": t.rows.len(),
            })
        })
        .collect();
    json!({
        "experiment": out.config.name,
        "figure": out.config.figure,
        "description": out.config.description,
        "library": { "name": "ecprep", "version": env!("CARGO_PKG_VERSION") },
        "seed": out.config.seed,
        "csv_format": "long: key columns, method, quantity, value; reals with 17 significant digits",
        "config": out.config,
        "tasks": out.provenance,
        "tables": tables,
    })
}

/// Writes `<dir>/<experiment>/{*.csv, metadata.json, timing.json}` and
/// returns the experiment directory.
pub fn write_outputs(out: &Outputs, dir: &Path) -> Result<std::path::PathBuf, RunError> {
    let io = |e: std::io::Error| RunError::Io(e.to_string());
    let dest = dir.join(&out.config.name);
    std::fs::create_dir_all(&dest).map_err(|e| RunError::Io(format!("{}: {e}", dest.display())))?;
    for t in &out.tables {
        std::fs::write(dest.join(format!("{}.csv", t.name)), t.to_csv()).map_err(io)?;
    }
    let meta = serde_json::to_string_pretty(&metadata(out)).map_err(|e| RunError::Io(e.to_string()))?;
    std::fs::write(dest.join("metadata.json"), meta + "\n").map_err(io)?;
    let timing = json!({ "wall_time_s": out.wall_time_s });
    std::fs::write(dest.join("timing.json"), timing.to_string() + "\n").map_err(io)?;
    Ok(dest)
}
