//! Pipeline configuration: a plain `key = value` file whose entries can be
//! overridden from the command line.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use ergm_core::{parse_model_terms, TermSpec};

use crate::error::config;

/// Estimator used while bounding and selecting terms. Model-space fits are
/// always MC-MLE.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum FitterKind {
    Mple,
    #[default]
    Mcmle,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PipelineConfig {
    pub network: Option<PathBuf>,
    pub attributes: Option<PathBuf>,
    pub refits: usize,
    pub draws: usize,
    pub burn_in: u64,
    pub interval: u64,
    pub seed: Option<u64>,
    pub rules: Option<PathBuf>,
    pub exogenous: Vec<TermSpec>,
    pub fitter: FitterKind,
    pub out: PathBuf,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            network: None,
            attributes: None,
            refits: 30,
            draws: 100,
            burn_in: 20,
            interval: 1,
            seed: None,
            rules: None,
            exogenous: Vec::new(),
            fitter: FitterKind::Mcmle,
            out: PathBuf::from("ergm-out"),
        }
    }
}

fn number<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| config(format!("`{key}` expects a non-negative integer, got `{value}`")))
}

impl PipelineConfig {
    /// Reads `path`, resolving relative paths in it against the file's directory.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config(format!("cannot read config {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        let mut cfg = PipelineConfig::default();
        for (idx, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| config(format!("{}:{}: expected `key = value`", path.display(), idx + 1)))?;
            cfg.set(key.trim(), value.trim(), Some(base))
                .with_context(|| format!("{}:{}", path.display(), idx + 1))?;
        }
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str, base: Option<&Path>) -> Result<()> {
        let path = |v: &str| match base {
            Some(b) if Path::new(v).is_relative() => b.join(v),
            _ => PathBuf::from(v),
        };
        match key {
            "network" => self.network = Some(path(value)),
            "attributes" => self.attributes = Some(path(value)),
            "rules" => self.rules = Some(path(value)),
            "out" | "output" => self.out = path(value),
            "refits" => self.refits = number(key, value)?,
            "draws" => self.draws = number(key, value)?,
            "burn_in" | "burn-in" => self.burn_in = number(key, value)?,
            "interval" => self.interval = number(key, value)?,
            "seed" => self.seed = Some(number(key, value)?),
            "fitter" => {
                self.fitter = <FitterKind as clap::ValueEnum>::from_str(value, true)
                    .map_err(|_| config(format!("`fitter` expects mple or mcmle, got `{value}`")))?
            }
            "exogenous" => {
                self.exogenous = parse_model_terms(value)?.into_iter().skip(1).collect();
                if let Some(t) = self.exogenous.iter().find(|t| !t.family.is_exogenous()) {
                    return Err(config(format!("`{t}` is not an exogenous term")));
                }
            }
            other => return Err(config(format!("unknown config key `{other}`"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.network.is_none() {
            return Err(config("no network given"));
        }
        if self.seed.is_none() {
            return Err(config("a seed is required"));
        }
        for (name, v) in [("refits", self.refits as u64), ("draws", self.draws as u64), ("interval", self.interval)] {
            if v == 0 {
                return Err(config(format!("`{name}` must be positive")));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys_and_overrides() {
        let mut cfg = PipelineConfig::default();
        cfg.set("network", "net.edgelist", Some(Path::new("/data"))).unwrap();
        cfg.set("refits", "12", None).unwrap();
        cfg.set("fitter", "MPLE", None).unwrap();
        assert_eq!(cfg.fitter, FitterKind::Mple);
        cfg.set("exogenous", "nodecov,attr=wealth", None).unwrap();
        assert_eq!(cfg.network.as_deref(), Some(Path::new("/data/net.edgelist")));
        assert_eq!(cfg.refits, 12);
        assert_eq!(cfg.exogenous.len(), 1);
        assert!(cfg.set("refits", "-1", None).is_err());
        assert!(cfg.set("colour", "red", None).is_err());
        assert!(cfg.set("exogenous", "triangle", None).is_err());
        assert!(cfg.validate().is_err());
        cfg.seed = Some(1);
        cfg.validate().unwrap();
    }
}
