//! Flat key=value experiment configuration: one `key = value` pair per line,
//! `#` comments, no sections, no nesting. Values are kept as raw strings and
//! parsed on access; every key must be consumed by the command that runs, so
//! misspelled keys are reported instead of silently ignored.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

/// Parsed configuration with access tracking and a canonical byte form.
pub struct Config {
    entries: BTreeMap<String, String>,
    accessed: RefCell<BTreeSet<String>>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Config, ConfigError> {
        let mut entries = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some(eq) = line.find('=') else {
                return Err(ConfigError(format!(
                    "line {}: expected key=value, got {line:?}",
                    lineno + 1
                )));
            };
            let key = line[..eq].trim().to_string();
            let value = line[eq + 1..].trim().to_string();
            if key.is_empty() {
                return Err(ConfigError(format!("line {}: empty key", lineno + 1)));
            }
            if entries.insert(key.clone(), value).is_some() {
                return Err(ConfigError(format!("line {}: duplicate key {key:?}", lineno + 1)));
            }
        }
        Ok(Config { entries, accessed: RefCell::new(BTreeSet::new()) })
    }

    pub fn load(path: &Path) -> Result<Config, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        Config::parse(&text)
    }

    /// Sorted `key=value` lines; the hashing and reproducibility anchor.
    pub fn canonical(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            let _ = writeln!(out, "{k}={v}");
        }
        out
    }

    /// FNV-1a 64-bit over the canonical form, as 16 hex digits.
    pub fn hash(&self) -> String {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for byte in self.canonical().as_bytes() {
            h ^= u64::from(*byte);
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        format!("{h:016x}")
    }

    /// Injects or replaces a key (used for the --seed override) BEFORE any
    /// hashing, so the hash reflects what actually ran.
    pub fn set(&mut self, key: &str, value: String) {
        self.entries.insert(key.to_string(), value);
    }

    fn raw(&self, key: &str) -> Option<&str> {
        let v = self.entries.get(key).map(String::as_str);
        if v.is_some() {
            self.accessed.borrow_mut().insert(key.to_string());
        }
        v
    }

    pub fn require(&self, key: &str) -> Result<&str, ConfigError> {
        self.raw(key).ok_or_else(|| ConfigError(format!("missing required key {key:?}")))
    }

    pub fn get_str(&self, key: &str, default: &str) -> String {
        self.raw(key).unwrap_or(default).to_string()
    }

    pub fn opt_str(&self, key: &str) -> Option<String> {
        self.raw(key).map(str::to_string)
    }

    fn parse_with<T, E: std::fmt::Display>(
        key: &str,
        raw: &str,
        f: impl Fn(&str) -> Result<T, E>,
    ) -> Result<T, ConfigError> {
        f(raw).map_err(|e| ConfigError(format!("key {key:?}: cannot parse {raw:?}: {e}")))
    }

    pub fn require_usize(&self, key: &str) -> Result<usize, ConfigError> {
        Self::parse_with(key, self.require(key)?, str::parse::<usize>)
    }

    pub fn get_usize(&self, key: &str, default: usize) -> Result<usize, ConfigError> {
        match self.raw(key) {
            Some(v) => Self::parse_with(key, v, str::parse::<usize>),
            None => Ok(default),
        }
    }

    pub fn get_u64(&self, key: &str, default: u64) -> Result<u64, ConfigError> {
        match self.raw(key) {
            Some(v) => Self::parse_with(key, v, str::parse::<u64>),
            None => Ok(default),
        }
    }

    pub fn get_f64(&self, key: &str, default: f64) -> Result<f64, ConfigError> {
        match self.raw(key) {
            Some(v) => Self::parse_with(key, v, str::parse::<f64>),
            None => Ok(default),
        }
    }

    pub fn opt_f64(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        match self.raw(key) {
            Some(v) => Self::parse_with(key, v, str::parse::<f64>).map(Some),
            None => Ok(None),
        }
    }

    pub fn require_usize_list(&self, key: &str) -> Result<Vec<usize>, ConfigError> {
        let raw = self.require(key)?;
        Self::parse_list(key, raw)
    }

    pub fn get_u32_list(&self, key: &str, default: &[u32]) -> Result<Vec<u32>, ConfigError> {
        match self.raw(key) {
            Some(v) => Self::parse_list(key, v),
            None => Ok(default.to_vec()),
        }
    }

    pub fn get_usize_list(
        &self,
        key: &str,
        default: &[usize],
    ) -> Result<Vec<usize>, ConfigError> {
        match self.raw(key) {
            Some(v) => Self::parse_list(key, v),
            None => Ok(default.to_vec()),
        }
    }

    fn parse_list<T: std::str::FromStr>(key: &str, raw: &str) -> Result<Vec<T>, ConfigError>
    where
        T::Err: std::fmt::Display,
    {
        let items: Result<Vec<T>, _> = raw
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(str::parse::<T>)
            .collect();
        let items =
            items.map_err(|e| ConfigError(format!("key {key:?}: bad list {raw:?}: {e}")))?;
        if items.is_empty() {
            return Err(ConfigError(format!("key {key:?}: empty list")));
        }
        Ok(items)
    }

    /// `u:v` pairs separated by `;`, e.g. `0.0:0.5;1.0:0.2`.
    pub fn get_z_list(
        &self,
        key: &str,
        default: &[(f64, f64)],
    ) -> Result<Vec<(f64, f64)>, ConfigError> {
        let Some(raw) = self.raw(key) else {
            return Ok(default.to_vec());
        };
        let mut out = Vec::new();
        for pair in raw.split(';').map(str::trim).filter(|s| !s.is_empty()) {
            let Some(colon) = pair.find(':') else {
                return Err(ConfigError(format!("key {key:?}: expected u:v in {pair:?}")));
            };
            let u: f64 = Self::parse_with(key, &pair[..colon], str::parse)?;
            let v: f64 = Self::parse_with(key, &pair[colon + 1..], str::parse)?;
            if v <= 0.0 {
                return Err(ConfigError(format!("key {key:?}: v must be > 0 in {pair:?}")));
            }
            out.push((u, v));
        }
        if out.is_empty() {
            return Err(ConfigError(format!("key {key:?}: empty list")));
        }
        Ok(out)
    }

    /// Rejects keys that no code path consumed — almost always a typo.
    pub fn finish(&self) -> Result<(), ConfigError> {
        let accessed = self.accessed.borrow();
        let unknown: Vec<&String> =
            self.entries.keys().filter(|k| !accessed.contains(*k)).collect();
        if unknown.is_empty() {
            Ok(())
        } else {
            Err(ConfigError(format!(
                "unknown keys: {}",
                unknown.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(", ")
            )))
        }
    }
}
