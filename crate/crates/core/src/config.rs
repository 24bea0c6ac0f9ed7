//! Flat `key = value` configuration with `[section]` headers.
//!
//! ```text
//! # comment
//! [run]
//! seed = 7
//! out = results
//!
//! [tilt]
//! lr = 0.004
//! ```
//!
//! Lines are trimmed; blank lines and lines starting with `#` or `;` are
//! ignored; keys before the first header belong to `[run]`. Values are kept
//! as text and parsed on access. A resolved configuration renders back into
//! the same format with sections and keys sorted.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Result, TiltError};

pub const DEFAULT_SECTION: &str = "run";

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Settings {
    sections: BTreeMap<String, BTreeMap<String, String>>,
}

impl Settings {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let mut out = Settings::new();
        let mut section = DEFAULT_SECTION.to_string();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let err = |msg: String| TiltError::Parse {
                path: origin.to_path_buf(),
                line: i as u64 + 1,
                msg,
            };
            if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| err(format!("unterminated section header {line:?}")))?
                    .trim();
                if name.is_empty() {
                    return Err(err("empty section name".into()));
                }
                section = name.to_string();
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected key = value, got {line:?}")))?;
            let k = k.trim();
            if k.is_empty() {
                return Err(err("empty key".into()));
            }
            out.set(&section, k, v.trim());
        }
        Ok(out)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| TiltError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text, path)
    }

    pub fn set(&mut self, section: &str, key: &str, value: impl Into<String>) {
        self.sections
            .entry(section.to_string())
            .or_default()
            .insert(key.to_string(), value.into());
    }

    pub fn remove(&mut self, section: &str, key: &str) -> Option<String> {
        self.sections.get_mut(section)?.remove(key)
    }

    pub fn get_str(&self, section: &str, key: &str) -> Option<&str> {
        self.sections.get(section)?.get(key).map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, section: &str, key: &str) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        let raw = self
            .get_str(section, key)
            .ok_or_else(|| TiltError::InvalidArgument(format!("missing setting {section}.{key}")))?;
        raw.parse()
            .map_err(|e| TiltError::InvalidArgument(format!("invalid value {raw:?} for {section}.{key}: {e}")))
    }

    /// Comma-separated list.
    pub fn get_list<T: FromStr>(&self, section: &str, key: &str) -> Result<Vec<T>>
    where
        T::Err: std::fmt::Display,
    {
        let raw = self.get::<String>(section, key)?;
        raw.split(',')
            .map(|s| {
                s.trim()
                    .parse()
                    .map_err(|e| TiltError::InvalidArgument(format!("invalid entry {s:?} in {section}.{key}: {e}")))
            })
            .collect()
    }

    /// Copies the entries of `other` into the sections `self` already has.
    /// Sections missing from `known` and keys `self` does not define are
    /// errors; known sections that `self` lacks are skipped.
    pub fn overlay(&mut self, other: &Settings, known: &[&str]) -> Result<()> {
        for (sec, entries) in &other.sections {
            if !known.contains(&sec.as_str()) {
                return Err(TiltError::InvalidArgument(format!("unknown config section [{sec}]")));
            }
            let Some(allowed) = self.sections.get(sec) else {
                continue;
            };
            for k in entries.keys() {
                if !allowed.contains_key(k) {
                    return Err(TiltError::InvalidArgument(format!("unknown config key {sec}.{k}")));
                }
            }
            for (k, v) in entries {
                self.set(sec, k, v.clone());
            }
        }
        Ok(())
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (sec, entries) in &self.sections {
            if !out.is_empty() {
                out.push('\n');
            }
            out.push_str(&format!("[{sec}]\n"));
            for (k, v) in entries {
                out.push_str(&format!("{k} = {v}\n"));
            }
        }
        out
    }
}
