//! Line-oriented `key = value` configuration files.
//!
//! Blank lines and `#` comments are ignored; keys may be dotted
//! (`bath.kind`). Serialization is canonical: sorted keys, one
//! `key = value` per line.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Config {
    entries: BTreeMap<String, String>,
}

fn valid_key(key: &str) -> bool {
    !key.is_empty()
        && key.split('.').all(|part| {
            !part.is_empty()
                && part
                    .chars()
                    .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
        })
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (k, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected 'key = value'", k + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            if !valid_key(key) {
                return Err(Error::Config(format!(
                    "line {}: invalid key '{key}'",
                    k + 1
                )));
            }
            if value.is_empty() {
                return Err(Error::Config(format!(
                    "line {}: empty value for '{key}'",
                    k + 1
                )));
            }
            if entries.insert(key.to_string(), value.to_string()).is_some() {
                return Err(Error::Config(format!(
                    "line {}: duplicate key '{key}'",
                    k + 1
                )));
            }
        }
        Ok(Self { entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) -> Result<()> {
        let value = value.into();
        if !valid_key(key) || value.trim().is_empty() || value.contains(['\n', '#']) {
            return Err(Error::Config(format!("invalid entry '{key} = {value}'")));
        }
        self.entries
            .insert(key.to_string(), value.trim().to_string());
        Ok(())
    }

    pub fn remove(&mut self, key: &str) -> Option<String> {
        self.entries.remove(key)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn require(&self, key: &str) -> Result<&str> {
        self.get(key)
            .ok_or_else(|| Error::Config(format!("missing key '{key}'")))
    }

    /// Parses `key` if present.
    pub fn parsed<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.get(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|_| Error::Config(format!("cannot parse '{key} = {v}'")))
            })
            .transpose()
    }

    pub fn parsed_or<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        Ok(self.parsed(key)?.unwrap_or(default))
    }

    pub fn parsed_required<T: FromStr>(&self, key: &str) -> Result<T> {
        self.parsed(key)?
            .ok_or_else(|| Error::Config(format!("missing key '{key}'")))
    }
}

impl fmt::Display for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in &self.entries {
            writeln!(f, "{k} = {v}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_dotted_keys() {
        let text =
            "# scenario\nmodel = micro  # trailing\n\nbath.kind=flat\n  bath.gamma0 =  0.07\n";
        let c = Config::parse(text).unwrap();
        assert_eq!(c.get("model"), Some("micro"));
        assert_eq!(c.get("bath.kind"), Some("flat"));
        assert_eq!(c.parsed::<f64>("bath.gamma0").unwrap(), Some(0.07));
        assert_eq!(
            c.to_string(),
            "bath.gamma0 = 0.07\nbath.kind = flat\nmodel = micro\n"
        );
    }

    #[test]
    fn round_trip_is_idempotent() {
        let c = Config::parse("b = 2\na.x = 1 # c\n").unwrap();
        let once = c.to_string();
        let again = Config::parse(&once).unwrap();
        assert_eq!(again, c);
        assert_eq!(again.to_string(), once);
    }

    #[test]
    fn rejects_malformed_lines() {
        assert!(Config::parse("model micro").is_err());
        assert!(Config::parse("a = 1\na = 2").is_err());
        assert!(Config::parse("bad key = 1").is_err());
        assert!(Config::parse("a..b = 1").is_err());
        assert!(Config::parse("a =").is_err());
        let c = Config::parse("n = x").unwrap();
        assert!(c.parsed::<usize>("n").is_err());
    }
}
