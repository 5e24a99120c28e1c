//! Line-based key=value configuration files.
//!
//! One `key = value` per line; `#` starts a comment; repeated keys are kept
//! in order (used for per-agent trait rows). Command-line flags override
//! file values.

use std::path::Path;

use crate::{CliError, CliResult};

#[derive(Debug, Default)]
pub struct KvConfig {
    entries: Vec<Entry>,
}

#[derive(Debug)]
struct Entry {
    key: String,
    value: String,
    line: usize,
}

impl KvConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn parse(text: &str, source: &str) -> CliResult<Self> {
        let mut entries = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let stripped = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            };
            let stripped = stripped.trim();
            if stripped.is_empty() {
                continue;
            }
            let (key, value) = stripped.split_once('=').ok_or_else(|| {
                CliError::Spec(format!("{source} line {line}: expected key = value"))
            })?;
            let key = key.trim().to_string();
            if key.is_empty() {
                return Err(CliError::Spec(format!("{source} line {line}: empty key")));
            }
            entries.push(Entry {
                key,
                value: value.trim().to_string(),
                line,
            });
        }
        Ok(KvConfig { entries })
    }

    /// Last value for a key, if any.
    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .rev()
            .find(|e| e.key == key)
            .map(|e| e.value.as_str())
    }

    /// Every value for a repeated key, in file order.
    pub fn get_all(&self, key: &str) -> Vec<&str> {
        self.entries
            .iter()
            .filter(|e| e.key == key)
            .map(|e| e.value.as_str())
            .collect()
    }

    pub fn parse_value<T: std::str::FromStr>(&self, key: &str) -> CliResult<Option<T>> {
        match self.get(key) {
            None => Ok(None),
            Some(raw) => {
                let line = self
                    .entries
                    .iter()
                    .rev()
                    .find(|e| e.key == key)
                    .map(|e| e.line)
                    .unwrap_or(0);
                raw.parse::<T>().map(Some).map_err(|_| {
                    CliError::Spec(format!("line {line}: cannot parse {key} = {raw:?}"))
                })
            }
        }
    }

    /// Comma-separated f64 list.
    pub fn parse_f64_list(&self, key: &str) -> CliResult<Option<Vec<f64>>> {
        match self.get(key) {
            None => Ok(None),
            Some(raw) => parse_f64_csv(raw)
                .map(Some)
                .map_err(|e| CliError::Spec(format!("{key}: {e}"))),
        }
    }
}

pub fn parse_f64_csv(raw: &str) -> Result<Vec<f64>, String> {
    raw.split(',')
        .map(|part| {
            part.trim()
                .parse::<f64>()
                .map_err(|_| format!("cannot parse {:?} as a number", part.trim()))
        })
        .collect()
}
