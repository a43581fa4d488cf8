//! Experiment configs: INI sections of `key = value`, lists as comma
//! separated values, numbers as decimals or fractions such as `1/3`.

use std::path::{Path, PathBuf};

use ini::Ini;
use sha2::{Digest, Sha256};

use crate::error::{HarnessError, Result};

#[derive(Clone, Debug)]
pub struct Config {
    ini: Ini,
    text: String,
    /// Directory that relative paths resolve against.
    base: PathBuf,
}

pub fn parse_number(raw: &str) -> Result<f64> {
    let s = raw.trim();
    let bad = || HarnessError::Config(format!("'{s}' is not a number"));
    match s.split_once('/') {
        Some((a, b)) => {
            let (a, b): (f64, f64) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
            if b == 0.0 {
                return Err(bad());
            }
            Ok(a / b)
        }
        None => s.parse().map_err(|_| bad()),
    }
}

impl Config {
    pub fn parse(text: &str, base: impl Into<PathBuf>) -> Result<Self> {
        let ini = Ini::load_from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        Ok(Self { ini, text: text.to_string(), base: base.into() })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(HarnessError::io(path))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&text, base)
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    /// First 16 hex digits of the SHA-256 of the config text.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.text.as_bytes()))[..16].to_string()
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.ini.section(Some(section)).and_then(|s| s.get(key)).map(str::trim)
    }

    pub fn has_section(&self, section: &str) -> bool {
        self.ini.section(Some(section)).is_some()
    }

    pub fn require(&self, section: &str, key: &str) -> Result<&str> {
        self.get(section, key).ok_or_else(|| HarnessError::Config(format!("missing [{section}] {key}")))
    }

    pub fn str_or<'a>(&'a self, section: &str, key: &str, default: &'a str) -> &'a str {
        self.get(section, key).unwrap_or(default)
    }

    pub fn number(&self, section: &str, key: &str) -> Result<Option<f64>> {
        self.get(section, key).map(parse_number).transpose().map_err(|e| self.located(section, key, e))
    }

    pub fn number_or(&self, section: &str, key: &str, default: f64) -> Result<f64> {
        Ok(self.number(section, key)?.unwrap_or(default))
    }

    pub fn count_or(&self, section: &str, key: &str, default: usize) -> Result<usize> {
        match self.get(section, key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| HarnessError::Config(format!("[{section}] {key}: '{v}' is not a count"))),
        }
    }

    pub fn list(&self, section: &str, key: &str) -> Option<Vec<String>> {
        self.get(section, key).map(|v| v.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect())
    }

    pub fn numbers(&self, section: &str, key: &str) -> Result<Option<Vec<f64>>> {
        self.list(section, key)
            .map(|items| items.iter().map(|s| parse_number(s)).collect::<Result<Vec<_>>>())
            .transpose()
            .map_err(|e| self.located(section, key, e))
    }

    pub fn counts(&self, section: &str, key: &str) -> Result<Option<Vec<usize>>> {
        self.list(section, key)
            .map(|items| {
                items
                    .iter()
                    .map(|s| s.parse().map_err(|_| HarnessError::Config(format!("[{section}] {key}: '{s}' is not a count"))))
                    .collect()
            })
            .transpose()
    }

    pub fn path(&self, section: &str, key: &str) -> Result<PathBuf> {
        let p = PathBuf::from(self.require(section, key)?);
        Ok(if p.is_absolute() { p } else { self.base.join(p) })
    }

    fn located(&self, section: &str, key: &str, e: HarnessError) -> HarnessError {
        match e {
            HarnessError::Config(m) => HarnessError::Config(format!("[{section}] {key}: {m}")),
            other => other,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sections_lists_and_fractions() {
        let c = Config::parse("[pep]\nmu = 0.1\npairs = 1/3:5/3, 1:1\nagents = 2,4, 8\n", ".").unwrap();
        assert_eq!(c.number("pep", "mu").unwrap(), Some(0.1));
        assert_eq!(c.list("pep", "pairs").unwrap(), vec!["1/3:5/3", "1:1"]);
        assert_eq!(c.counts("pep", "agents").unwrap(), Some(vec![2, 4, 8]));
        assert!((parse_number("1/3").unwrap() - 1.0 / 3.0).abs() < 1e-16);
        assert!(parse_number("x").is_err());
        assert_eq!(c.hash().len(), 16);
    }
}
