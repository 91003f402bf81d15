//! Run configuration: an optional JSON file whose fields are overridden by
//! command-line flags.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::Deserialize;

/// Process exit statuses.
pub const EXIT_VERIFY_FAILED: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn config(message: impl Into<String>) -> Self {
        Self { code: EXIT_CONFIG, message: message.into() }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<qtraj_core::Error> for Failure {
    fn from(e: qtraj_core::Error) -> Self {
        use qtraj_core::Error::*;
        let code = match e {
            InvalidArgument(_) | InvalidState(_) | UnsupportedState(_) | NotNormalizable(_) | GridTooCoarse { .. } => EXIT_CONFIG,
            PoleEncountered { .. }
            | NonConvergence { .. }
            | NotClosed
            | WindingNotInteger { .. }
            | PoleOnPath { .. }
            | NoCrossing
            | NotFinite { .. } => EXIT_NUMERICAL,
        };
        Self { code, message: e.to_string() }
    }
}

pub type CliResult<T> = Result<T, Failure>;

/// Every setting that can come from the config file. Unknown keys are errors.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub state: Option<String>,
    pub seeds: Option<Vec<String>>,
    pub cassinian_b: Option<Vec<f64>>,
    pub t_end: Option<f64>,
    pub rel_tol: Option<f64>,
    pub grid: Option<String>,
    pub range: Option<String>,
    pub out: Option<PathBuf>,
    pub formats: Option<Vec<String>>,
    pub mass: Option<f64>,
    pub omega: Option<f64>,
    pub electron: Option<bool>,
    pub suites: Option<Vec<String>>,
    pub tol: Option<f64>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> CliResult<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path).map_err(|e| Failure::config(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Failure::config(format!("invalid config {}: {e}", path.display())))
    }
}

/// Output formats a command may write.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Formats {
    pub csv: bool,
    pub json: bool,
    pub svg: bool,
}

impl Formats {
    pub fn parse(list: Option<Vec<String>>) -> CliResult<Self> {
        let Some(list) = list else {
            return Ok(Self { csv: true, json: true, svg: true });
        };
        let mut f = Self { csv: false, json: false, svg: false };
        for item in list.iter().flat_map(|s| s.split(',')).map(str::trim) {
            match item {
                "csv" => f.csv = true,
                "json" => f.json = true,
                "svg" => f.svg = true,
                other => return Err(Failure::config(format!("unknown format '{other}' (expected csv, json, svg)"))),
            }
        }
        // a plot is never the only record of a result
        if f.svg {
            f.csv = true;
        }
        Ok(f)
    }
}

pub fn positive(name: &str, value: f64) -> CliResult<f64> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(Failure::config(format!("{name} must be positive (got {value})")))
    }
}

/// Creates the output directory if needed.
pub fn output_dir(out: Option<PathBuf>) -> CliResult<PathBuf> {
    let dir = out.unwrap_or_else(|| PathBuf::from("out"));
    std::fs::create_dir_all(&dir).map_err(|e| Failure::config(format!("cannot create output directory {}: {e}", dir.display())))?;
    Ok(dir)
}

pub fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    std::fs::write(path, contents).map_err(|e| Failure::config(format!("cannot write {}: {e}", path.display())))
}
