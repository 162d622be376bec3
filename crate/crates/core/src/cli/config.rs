//! Resolution of run parameters: command-line flags, then a `key=value`
//! file, then built-in defaults.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use super::CliError;

pub const KEYS: &[&str] = &[
    "a", "R", "Rmin", "Rmax", "branch", "tol", "out", "format", "nx", "ny", "levels", "xmax", "h",
    "nu", "A_min", "A_max", "B_min", "B_max", "n", "xi_max",
];

/// Parsed `key=value` file. Blank lines and lines starting with `#` are
/// skipped.
#[derive(Debug, Clone, Default)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(CliError::Config(format!(
                    "config line {}: expected key=value, got '{line}'",
                    n + 1
                )));
            };
            let k = k.trim().trim_start_matches("--");
            if !KEYS.contains(&k) {
                return Err(CliError::Config(format!(
                    "config line {}: unknown key '{k}'",
                    n + 1
                )));
            }
            values.insert(k.to_string(), v.trim().to_string());
        }
        Ok(Self { values })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// The flag value if given, otherwise the file value parsed as `T`.
    pub fn pick<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.values.get(key) {
            None => Ok(None),
            Some(s) => s
                .parse::<T>()
                .map(Some)
                .map_err(|e| CliError::Config(format!("config key '{key}' = '{s}': {e}"))),
        }
    }

    pub fn pick_path(&self, flag: Option<PathBuf>, key: &str) -> Option<PathBuf> {
        flag.or_else(|| self.values.get(key).map(PathBuf::from))
    }
}

pub fn require<T>(v: Option<T>, key: &str, command: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Config(format!("{command} needs --{key}")))
}

pub fn check_a(a: f64) -> Result<f64, CliError> {
    if a > 0.0 && a <= 1.0 {
        Ok(a)
    } else {
        Err(CliError::Config(format!("--a = {a} must lie in (0, 1]")))
    }
}

pub fn check_r(r: f64, key: &str) -> Result<f64, CliError> {
    if r >= 0.0 && r.is_finite() {
        Ok(r)
    } else {
        Err(CliError::Config(format!(
            "--{key} = {r} must be finite and non-negative"
        )))
    }
}

pub fn check_tol(tol: f64) -> Result<f64, CliError> {
    if (1e-12..1.0).contains(&tol) {
        Ok(tol)
    } else {
        Err(CliError::Config(format!(
            "--tol = {tol:e} must lie in [1e-12, 1)"
        )))
    }
}

pub fn check_positive(v: f64, key: &str) -> Result<f64, CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Config(format!("--{key} = {v} must be positive")))
    }
}

pub fn check_count(n: usize, min: usize, key: &str) -> Result<usize, CliError> {
    if n >= min {
        Ok(n)
    } else {
        Err(CliError::Config(format!(
            "--{key} = {n} must be at least {min}"
        )))
    }
}
