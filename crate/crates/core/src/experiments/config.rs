//! Flat `key = value` experiment files. `#` starts a comment; blank lines
//! are ignored; keys are case-sensitive and may appear once.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// `tightness`, `synthetic` or `mnist`.
    pub experiment: String,
    pub seed: u64,
    pub out_dir: PathBuf,
    params: BTreeMap<String, String>,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Format(format!("line {}: expected key = value", no + 1)))?;
            let (k, v) = (k.trim(), v.trim());
            if k.is_empty() {
                return Err(Error::Format(format!("line {}: empty key", no + 1)));
            }
            if map.insert(k.to_string(), v.to_string()).is_some() {
                return Err(Error::Format(format!("line {}: duplicate key `{k}`", no + 1)));
            }
        }
        let experiment = map
            .remove("experiment")
            .ok_or_else(|| Error::Format("missing `experiment`".into()))?;
        let seed = match map.remove("seed") {
            Some(s) => s
                .parse()
                .map_err(|_| Error::Format(format!("bad seed `{s}`")))?,
            None => 0,
        };
        let out_dir = PathBuf::from(map.remove("out_dir").unwrap_or_else(|| ".".into()));
        Ok(ExperimentConfig {
            experiment,
            seed,
            out_dir,
            params: map,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Typed value of `key`, or `default` when absent.
    pub fn get<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        match self.params.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| Error::Format(format!("bad value `{v}` for `{key}`"))),
        }
    }

    pub fn get_str(&self, key: &str) -> Option<&str> {
        self.params.get(key).map(|s| s.as_str())
    }

    /// Rejects keys outside `allowed`.
    pub fn check_keys(&self, allowed: &[&str]) -> Result<()> {
        for k in self.params.keys() {
            if !allowed.contains(&k.as_str()) {
                return Err(Error::Format(format!(
                    "unknown key `{k}` for experiment `{}`",
                    self.experiment
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_flat_file() {
        let c = ExperimentConfig::parse(
            "# tightness cell\nexperiment = tightness\nseed=7\n\nn = 2  # order\nr = 4\n",
        )
        .unwrap();
        assert_eq!(c.experiment, "tightness");
        assert_eq!(c.seed, 7);
        assert_eq!(c.get::<usize>("n", 0).unwrap(), 2);
        assert_eq!(c.get::<usize>("trials", 25).unwrap(), 25);
        assert!(c.check_keys(&["n", "r"]).is_ok());
        assert!(c.check_keys(&["n"]).is_err());
    }

    #[test]
    fn rejects_malformed() {
        assert!(ExperimentConfig::parse("seed = 1").is_err());
        assert!(ExperimentConfig::parse("experiment = x\nfoo").is_err());
        assert!(ExperimentConfig::parse("experiment = x\na = 1\na = 2").is_err());
        let c = ExperimentConfig::parse("experiment = x\nn = two").unwrap();
        assert!(c.get::<usize>("n", 0).is_err());
    }
}
