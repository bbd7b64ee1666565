//! Flat `key = value` config files.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};

/// Keys accepted in a config file; each matches the long flag of the same name.
pub const KEYS: &[&str] = &[
    "lambda",
    "mu",
    "ri",
    "re",
    "rs",
    "kappa",
    "profile",
    "delta-grid",
    "n0",
    "n-min",
    "n-max",
    "quad-theta",
    "quad-phi",
    "suite",
    "family",
    "out",
    "axis",
    "offset",
    "extent",
    "resolution",
    "guard",
];

/// Values read from a config file, keyed by flag name.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FileConfig {
    values: BTreeMap<String, String>,
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (k, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| anyhow!("line {}: expected `key = value`", k + 1))?;
            let key = key.trim().replace('_', "-");
            if !KEYS.contains(&key.as_str()) {
                bail!("line {}: unknown key `{key}`", k + 1);
            }
            if values.insert(key.clone(), value.trim().to_string()).is_some() {
                bail!("line {}: `{key}` given twice", k + 1);
            }
        }
        Ok(FileConfig { values })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in config {}", path.display()))
    }

    pub fn get_raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// Flag value if given, else the file value, else `default`.
    pub fn pick<T>(&self, flag: Option<T>, key: &str, default: T) -> Result<T>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        Ok(self.pick_opt(flag, key)?.unwrap_or(default))
    }

    pub fn pick_opt<T>(&self, flag: Option<T>, key: &str) -> Result<Option<T>>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.get_raw(key) {
            Some(v) => v.parse().map(Some).map_err(|e| anyhow!("config key `{key}`: cannot parse `{v}`: {e}")),
            None => Ok(None),
        }
    }
}

/// Comma-separated list of reals.
pub fn parse_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|e| anyhow!("bad number `{s}` in list: {e}")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comments_blanks_and_underscores() {
        let c = FileConfig::parse("# header\n\nlambda = 2 # trailing\nn_max=7\ndelta-grid = 0.1, 0.01\n").unwrap();
        assert_eq!(c.get_raw("lambda"), Some("2"));
        assert_eq!(c.get_raw("n-max"), Some("7"));
        assert_eq!(parse_list(c.get_raw("delta-grid").unwrap()).unwrap(), vec![0.1, 0.01]);
    }

    #[test]
    fn flags_win_over_file() {
        let c = FileConfig::parse("mu = 3").unwrap();
        assert_eq!(c.pick(Some(1.5), "mu", 1.0).unwrap(), 1.5);
        assert_eq!(c.pick(None, "mu", 1.0).unwrap(), 3.0);
        assert_eq!(c.pick(None, "lambda", 1.0).unwrap(), 1.0);
    }

    #[test]
    fn rejects_malformed_files() {
        assert!(FileConfig::parse("lambda 2").is_err());
        assert!(FileConfig::parse("colour = red").is_err());
        assert!(FileConfig::parse("mu = 1\nmu = 2").is_err());
        assert!(FileConfig::parse("mu = x").unwrap().pick::<f64>(None, "mu", 1.0).is_err());
    }
}
