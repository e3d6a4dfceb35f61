//! Layered TOML configuration: built-in defaults, then an optional file,
//! then `--set` overrides. Lookups take dotted key paths so that every
//! error names the key it came from.

use sha2::{Digest, Sha256};
use std::fmt;
use std::path::Path;
use std::str::FromStr;
use toml::{Table, Value};

pub const DEFAULTS: &str = include_str!("../defaults.toml");

/// Keys that may be set but have no default.
const OPTIONAL: &[&str] = &["process.poling_period_um", "jsa.pump_fwhm_ghz", "find-point.bracket_nm"];

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub key: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(key: impl Into<String>, message: impl ToString) -> Self {
        Self {
            key: key.into(),
            message: message.to_string(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config key `{}`: {}", self.key, self.message)
    }
}

#[derive(Debug, Clone)]
pub struct Config {
    table: Table,
}

fn split(path: &str) -> (Option<&str>, &str) {
    match path.split_once('.') {
        Some((section, key)) => (Some(section), key),
        None => (None, path),
    }
}

impl Config {
    pub fn defaults() -> Self {
        Self {
            table: DEFAULTS.parse().expect("built-in defaults parse"),
        }
    }

    pub fn load(file: Option<&Path>, overrides: &[String]) -> Result<Self, ConfigError> {
        let mut cfg = Self::defaults();
        if let Some(path) = file {
            let name = path.display().to_string();
            let text = std::fs::read_to_string(path).map_err(|e| ConfigError::new(&name, e))?;
            let user: Table = text.parse().map_err(|e: toml::de::Error| ConfigError::new(&name, e.message()))?;
            for (k, v) in user {
                match v {
                    Value::Table(section) => {
                        for (kk, vv) in section {
                            cfg.assign(&format!("{k}.{kk}"), vv)?;
                        }
                    }
                    v => cfg.assign(&k, v)?,
                }
            }
        }
        for expr in overrides {
            cfg.set(expr)?;
        }
        Ok(cfg)
    }

    /// Applies one `key=value` override. Values are read as TOML, falling
    /// back to a bare string.
    pub fn set(&mut self, expr: &str) -> Result<(), ConfigError> {
        let (key, raw) = expr
            .split_once('=')
            .ok_or_else(|| ConfigError::new(expr, "expected KEY=VALUE"))?;
        let (key, raw) = (key.trim(), raw.trim());
        let value = match format!("v = {raw}").parse::<Table>() {
            Ok(mut t) => t.remove("v").expect("parsed key"),
            Err(_) => Value::String(raw.to_string()),
        };
        self.assign(key, value)
    }

    fn assign(&mut self, path: &str, value: Value) -> Result<(), ConfigError> {
        if self.value(path).is_none() && !OPTIONAL.contains(&path) {
            return Err(ConfigError::new(path, "unknown key"));
        }
        match split(path) {
            (Some(section), key) => {
                let t = self
                    .table
                    .get_mut(section)
                    .and_then(Value::as_table_mut)
                    .ok_or_else(|| ConfigError::new(path, "unknown section"))?;
                t.insert(key.to_string(), value);
            }
            (None, key) => {
                self.table.insert(key.to_string(), value);
            }
        }
        Ok(())
    }

    fn value(&self, path: &str) -> Option<&Value> {
        match split(path) {
            (Some(section), key) => self.table.get(section)?.as_table()?.get(key),
            (None, key) => self.table.get(key).filter(|v| !v.is_table()),
        }
    }

    /// The effective configuration, keys sorted.
    pub fn render(&self) -> String {
        toml::to_string(&self.table).expect("config serializes")
    }

    pub fn sha256(&self) -> String {
        Sha256::digest(self.render().as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    fn required(&self, path: &str) -> Result<&Value, ConfigError> {
        self.value(path).ok_or_else(|| ConfigError::new(path, "missing"))
    }

    fn as_f64(path: &str, v: &Value) -> Result<f64, ConfigError> {
        let x = match v {
            Value::Float(x) => *x,
            Value::Integer(i) => *i as f64,
            other => return Err(ConfigError::new(path, format!("expected a number, got {other}"))),
        };
        if x.is_finite() {
            Ok(x)
        } else {
            Err(ConfigError::new(path, "must be finite"))
        }
    }

    pub fn f64(&self, path: &str) -> Result<f64, ConfigError> {
        Self::as_f64(path, self.required(path)?)
    }

    pub fn opt_f64(&self, path: &str) -> Result<Option<f64>, ConfigError> {
        self.value(path).map(|v| Self::as_f64(path, v)).transpose()
    }

    pub fn positive(&self, path: &str) -> Result<f64, ConfigError> {
        let x = self.f64(path)?;
        if x > 0.0 {
            Ok(x)
        } else {
            Err(ConfigError::new(path, format!("{x} must be positive")))
        }
    }

    /// A number in [0, 1].
    pub fn fraction(&self, path: &str) -> Result<f64, ConfigError> {
        let x = self.f64(path)?;
        if (0.0..=1.0).contains(&x) {
            Ok(x)
        } else {
            Err(ConfigError::new(path, format!("{x} must lie in [0, 1]")))
        }
    }

    pub fn u64(&self, path: &str) -> Result<u64, ConfigError> {
        match self.required(path)? {
            Value::Integer(i) if *i >= 0 => Ok(*i as u64),
            other => Err(ConfigError::new(path, format!("expected a non-negative integer, got {other}"))),
        }
    }

    /// A strictly positive integer.
    pub fn count(&self, path: &str) -> Result<usize, ConfigError> {
        match self.u64(path)? {
            0 => Err(ConfigError::new(path, "must be at least 1")),
            n => Ok(n as usize),
        }
    }

    pub fn string(&self, path: &str) -> Result<&str, ConfigError> {
        match self.required(path)? {
            Value::String(s) => Ok(s),
            other => Err(ConfigError::new(path, format!("expected a string, got {other}"))),
        }
    }

    pub fn parse<T: FromStr<Err = String>>(&self, path: &str) -> Result<T, ConfigError> {
        self.string(path)?.parse().map_err(|e| ConfigError::new(path, e))
    }

    pub fn f64_list(&self, path: &str) -> Result<Vec<f64>, ConfigError> {
        match self.required(path)? {
            Value::Array(items) => items.iter().map(|v| Self::as_f64(path, v)).collect(),
            other => Err(ConfigError::new(path, format!("expected a list of numbers, got {other}"))),
        }
    }

    pub fn opt_f64_list(&self, path: &str) -> Result<Option<Vec<f64>>, ConfigError> {
        match self.value(path) {
            Some(_) => self.f64_list(path).map(Some),
            None => Ok(None),
        }
    }
}

/// The commented default text of the given sections, for `--help`.
pub fn documented_sections(sections: &[&str]) -> String {
    let mut out = String::new();
    let mut keep = false;
    let mut pending = String::new();
    for line in DEFAULTS.lines() {
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            keep = sections.contains(&name);
        }
        let top_level_seed = line.starts_with("seed") && sections.contains(&"seed");
        if line.starts_with('#') || line.is_empty() {
            pending.push_str(line);
            pending.push('\n');
            continue;
        }
        if keep || top_level_seed {
            if line.starts_with('[') && !out.is_empty() {
                out.push('\n');
            }
            out.push_str(pending.trim_start_matches('\n'));
            out.push_str(line);
            out.push('\n');
        }
        pending.clear();
    }
    out
}
