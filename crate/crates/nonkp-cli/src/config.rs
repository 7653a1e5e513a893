//! Flat sectioned `key = value` configuration files.
//!
//! Sections are `[grid]`, `[run]` and `[scenario]`; `#` starts a comment.
//! Unknown sections or keys are rejected by name, and command-line
//! `--set section.key=value` overrides land on top of file values.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use nonkp::integrate::Scheme;

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn err(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

/// Raw parsed `section.key -> value` map.
#[derive(Debug, Default, Clone)]
pub struct RawConfig {
    values: BTreeMap<String, String>,
}

const SECTIONS: [&str; 3] = ["grid", "run", "scenario"];

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut values = BTreeMap::new();
        let mut section = String::new();
        for (lineno, raw_line) in text.lines().enumerate() {
            let line = raw_line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if line.starts_with('[') {
                if !line.ends_with(']') {
                    return Err(err(format!("line {}: malformed section header", lineno + 1)));
                }
                section = line[1..line.len() - 1].trim().to_string();
                if !SECTIONS.contains(&section.as_str()) {
                    return Err(err(format!(
                        "line {}: unknown section [{section}]; expected one of {SECTIONS:?}",
                        lineno + 1
                    )));
                }
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(err(format!(
                    "line {}: expected `key = value`, got `{line}`",
                    lineno + 1
                )));
            };
            if section.is_empty() {
                return Err(err(format!(
                    "line {}: key `{}` appears before any [section]",
                    lineno + 1,
                    key.trim()
                )));
            }
            values.insert(
                format!("{section}.{}", key.trim()),
                value.trim().to_string(),
            );
        }
        Ok(Self { values })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| err(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Apply a `section.key=value` override.
    pub fn set(&mut self, spec: &str) -> Result<(), ConfigError> {
        let (key, value) = spec
            .split_once('=')
            .ok_or_else(|| err(format!("override `{spec}` is not of the form section.key=value")))?;
        let key = key.trim();
        let section = key
            .split_once('.')
            .map(|(s, _)| s)
            .ok_or_else(|| err(format!("override key `{key}` must be section.key")))?;
        if !SECTIONS.contains(&section) {
            return Err(err(format!("override references unknown section `{section}`")));
        }
        self.values.insert(key.to_string(), value.trim().to_string());
        Ok(())
    }
}

/// Tracks which keys were consumed so leftovers can be rejected by name.
pub struct ConfigReader {
    raw: RawConfig,
    used: std::cell::RefCell<Vec<String>>,
}

impl ConfigReader {
    pub fn new(raw: RawConfig) -> Self {
        Self {
            raw,
            used: std::cell::RefCell::new(Vec::new()),
        }
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.used.borrow_mut().push(key.to_string());
        self.raw.values.get(key).map(|s| s.as_str())
    }

    pub fn required_usize(&self, key: &str) -> Result<usize, ConfigError> {
        let v = self
            .get(key)
            .ok_or_else(|| err(format!("missing required key `{key}`")))?;
        v.parse()
            .map_err(|_| err(format!("key `{key}`: `{v}` is not a positive integer")))
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize, ConfigError> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| err(format!("key `{key}`: `{v}` is not a positive integer"))),
        }
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64, ConfigError> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| err(format!("key `{key}`: `{v}` is not a number"))),
        }
    }

    pub fn u64_or(&self, key: &str, default: u64) -> Result<u64, ConfigError> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| err(format!("key `{key}`: `{v}` is not an integer"))),
        }
    }

    pub fn f64_list_or(&self, key: &str, default: &[f64]) -> Result<Vec<f64>, ConfigError> {
        match self.get(key) {
            None => Ok(default.to_vec()),
            Some(v) => v
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse()
                        .map_err(|_| err(format!("key `{key}`: `{s}` is not a number")))
                })
                .collect(),
        }
    }

    pub fn scheme_or(&self, key: &str, default: Scheme) -> Result<Scheme, ConfigError> {
        match self.get(key) {
            None => Ok(default),
            Some("diagonal-ifrk4") => Ok(Scheme::DiagonalIfrk4),
            Some("physical-rk4") => Ok(Scheme::PhysicalRk4),
            Some("linear-exact") => Ok(Scheme::LinearExact),
            Some(v) => Err(err(format!(
                "key `{key}`: unknown scheme `{v}` (expected diagonal-ifrk4, physical-rk4 or linear-exact)"
            ))),
        }
    }

    /// Reject any key that was never requested by the scenario.
    pub fn finish(self) -> Result<(), ConfigError> {
        let used = self.used.borrow();
        for key in self.raw.values.keys() {
            if !used.iter().any(|u| u == key) {
                return Err(err(format!("unknown key `{key}` for this scenario")));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sections_and_comments() {
        let raw = RawConfig::parse("[grid]\nnx = 64 # points\nny=32\n\n[run]\ndt = 0.5\n").unwrap();
        let reader = ConfigReader::new(raw);
        assert_eq!(reader.required_usize("grid.nx").unwrap(), 64);
        assert_eq!(reader.required_usize("grid.ny").unwrap(), 32);
        assert_eq!(reader.f64_or("run.dt", 1.0).unwrap(), 0.5);
        reader.finish().unwrap();
    }

    #[test]
    fn missing_key_named_in_error() {
        let raw = RawConfig::parse("[grid]\nny = 32\n").unwrap();
        let reader = ConfigReader::new(raw);
        let e = reader.required_usize("grid.nx").unwrap_err();
        assert!(e.0.contains("grid.nx"), "{}", e.0);
    }

    #[test]
    fn unknown_key_rejected_by_name() {
        let raw = RawConfig::parse("[run]\nbogus = 7\n").unwrap();
        let reader = ConfigReader::new(raw);
        let e = reader.finish().unwrap_err();
        assert!(e.0.contains("run.bogus"), "{}", e.0);
    }

    #[test]
    fn unknown_section_rejected() {
        assert!(RawConfig::parse("[nope]\nx = 1\n").is_err());
    }

    #[test]
    fn overrides_replace_file_values() {
        let mut raw = RawConfig::parse("[run]\ndt = 0.5\n").unwrap();
        raw.set("run.dt=0.25").unwrap();
        let reader = ConfigReader::new(raw);
        assert_eq!(reader.f64_or("run.dt", 1.0).unwrap(), 0.25);
        reader.finish().unwrap();
    }
}
