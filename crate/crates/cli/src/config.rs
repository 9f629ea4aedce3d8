//! Flat `key = value` configuration files.
//!
//! Blank lines and lines starting with `#` are skipped. Keys use the long
//! flag names without dashes (`h0`, `seed`, `epsilon`, ...).

use std::collections::BTreeMap;
use std::path::Path;

use orbitfib::{Error, Result};

pub const KEYS: [&str; 16] = [
    "n", "h0", "h", "c", "seed", "samples", "step", "epsilon", "checks", "format", "from", "to",
    "suite", "tol", "base", "trajectories",
];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::InvalidInput(format!(
                    "config line {}: expected key = value, got {line:?}",
                    lineno + 1
                )));
            };
            let key = key.trim();
            if !KEYS.contains(&key) {
                return Err(Error::InvalidInput(format!(
                    "config line {}: unknown key {key:?}",
                    lineno + 1
                )));
            }
            values.insert(key.to_string(), value.trim().to_string());
        }
        Ok(Self { values })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidInput(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }
}
