//! Run settings: command-line values layered over an optional JSON file.

use std::fs;
use std::path::{Path, PathBuf};

use nfib_core::{ExactComplex, Mode};
use serde::Deserialize;
use serde_json::Value;

/// Environment variable naming the OEIS cache directory.
pub const CACHE_DIR_ENV: &str = "NFIB_CACHE_DIR";

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{what}: parse error at position {position}: {message}")]
    Parse { what: String, position: usize, message: String },
    #[error("{0}")]
    Invalid(String),
    #[error("config file {path}: {message}")]
    File { path: String, message: String },
}

/// Parses a comma-separated list of complex literals such as `1,-2,3/2+1/3i`.
/// Error positions count characters from the start of the whole list.
pub fn parse_scalar_list(what: &str, text: &str) -> Result<Vec<ExactComplex>, ConfigError> {
    let mut out = Vec::new();
    let mut offset = 0;
    for item in text.split(',') {
        let lead = item.chars().take_while(|c| c.is_whitespace()).count();
        let trimmed = item.trim();
        if trimmed.is_empty() {
            return Err(ConfigError::Parse { what: what.into(), position: offset + lead, message: "empty entry".into() });
        }
        match trimmed.parse::<ExactComplex>() {
            Ok(v) => out.push(v),
            Err(nfib_core::Error::Parse { position, message }) => {
                return Err(ConfigError::Parse { what: what.into(), position: offset + lead + position, message });
            }
            Err(e) => return Err(ConfigError::Invalid(format!("{what}: {e}"))),
        }
        offset += item.chars().count() + 1;
    }
    Ok(out)
}

/// Parses `a..b` (inclusive), `a..=b` or a single value.
pub fn parse_range(what: &str, text: &str) -> Result<(i64, i64), ConfigError> {
    let bad = || ConfigError::Invalid(format!("{what}: expected a range like 2..4, got {text:?}"));
    let (lo, hi) = match text.split_once("..") {
        Some((lo, hi)) => (lo.trim(), hi.trim().trim_start_matches('=')),
        None => (text.trim(), text.trim()),
    };
    let lo: i64 = lo.parse().map_err(|_| bad())?;
    let hi: i64 = hi.parse().map_err(|_| bad())?;
    if lo > hi {
        return Err(bad());
    }
    Ok((lo, hi))
}

/// A list given either as one comma-separated string or as a JSON array.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum ListValue {
    Text(String),
    Items(Vec<Value>),
}

impl ListValue {
    pub fn to_text(&self) -> String {
        match self {
            ListValue::Text(s) => s.clone(),
            ListValue::Items(items) => items
                .iter()
                .map(|v| match v {
                    Value::String(s) => s.clone(),
                    other => other.to_string(),
                })
                .collect::<Vec<_>>()
                .join(","),
        }
    }
}

/// Contents of a `--config` file. Every field is optional; flags win.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub weights: Option<ListValue>,
    pub init: Option<ListValue>,
    pub mode: Option<String>,
    pub format: Option<String>,
    pub residual_tol: Option<f64>,
    pub tie_tol: Option<f64>,
    pub ratio_tol: Option<f64>,
    pub degeneracy_tol: Option<f64>,
    pub tail_tol: Option<f64>,
    pub max_k: Option<usize>,
    pub stability_window: Option<usize>,
    pub horizon: Option<usize>,
    pub count: Option<usize>,
    pub seed: Option<u64>,
    pub cache_dir: Option<PathBuf>,
    pub offline: Option<bool>,
    pub limit: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let err = |message: String| ConfigError::File { path: path.display().to_string(), message };
        let text = fs::read_to_string(path).map_err(|e| err(e.to_string()))?;
        serde_json::from_str(&text).map_err(|e| err(e.to_string()))
    }
}

pub fn parse_mode(text: &str) -> Result<Mode, ConfigError> {
    match text {
        "exact" => Ok(Mode::Exact),
        "float" => Ok(Mode::Float),
        other => Err(ConfigError::Invalid(format!("mode must be exact or float, got {other:?}"))),
    }
}

pub fn positive(name: &str, value: f64) -> Result<f64, ConfigError> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(ConfigError::Invalid(format!("{name} must be positive, got {value}")))
    }
}

/// `--cache-dir`, then the config file, then `NFIB_CACHE_DIR`, then the
/// user cache directory.
pub fn resolve_cache_dir(flag: Option<PathBuf>, file: Option<PathBuf>) -> PathBuf {
    flag.or(file)
        .or_else(|| std::env::var_os(CACHE_DIR_ENV).map(PathBuf::from))
        .or_else(|| std::env::var_os("XDG_CACHE_HOME").map(|d| PathBuf::from(d).join("nfib")))
        .or_else(|| std::env::var_os("HOME").map(|d| PathBuf::from(d).join(".cache").join("nfib")))
        .unwrap_or_else(|| PathBuf::from(".nfib-cache"))
}
