//! Experiment configuration files.
//!
//! A config is one JSON document:
//!
//! ```json
//! {
//!   "instance": { "family": "iid", "arms": [{ "kind": "bernoulli", "p": 0.5 },
//!                                           { "kind": "bernoulli", "p": 0.45 }] },
//!   "policies": [{ "kind": "ucbv" }, { "kind": "query_then_ucbv" }],
//!   "T": 20000,
//!   "k_grid": [0, 1000, 5000],
//!   "replicates": 100,
//!   "root_seed": 0,
//!   "parallelism": 4,
//!   "output_dir": "out"
//! }
//! ```
//!
//! Replicate `r` always runs with seed `root_seed + r`.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use qbl_core::{Instance, InstanceSpec, PolicySpec};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Environment variable that overrides `parallelism`.
pub const THREADS_ENV: &str = "QBL_THREADS";

fn default_parallelism() -> usize {
    1
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("results")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub instance: InstanceSpec,
    pub policies: Vec<PolicySpec>,
    #[serde(rename = "T", alias = "horizon")]
    pub horizon: u64,
    pub k_grid: Vec<u64>,
    pub replicates: usize,
    #[serde(default)]
    pub root_seed: u64,
    #[serde(default = "default_parallelism")]
    pub parallelism: usize,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let config: Self = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |field: &str, msg: String| Err(CliError::Config(format!("{field}: {msg}")));
        if self.horizon < 1 {
            return bad("T", "must be at least 1".into());
        }
        if self.k_grid.is_empty() {
            return bad("k_grid", "must not be empty".into());
        }
        if let Some(k) = self.k_grid.iter().find(|&&k| k > self.horizon) {
            return bad("k_grid", format!("k = {k} exceeds T = {}", self.horizon));
        }
        if self.replicates < 1 {
            return bad("replicates", "must be at least 1".into());
        }
        if self.parallelism < 1 {
            return bad("parallelism", "must be at least 1".into());
        }
        if self.policies.is_empty() {
            return bad("policies", "must not be empty".into());
        }
        let mut labels = HashSet::new();
        for p in &self.policies {
            p.validate().map_err(|e| CliError::Config(format!("policies: {e}")))?;
            if !labels.insert(p.label()) {
                return bad("policies", format!("duplicate label {:?}; set distinct names", p.label()));
            }
        }
        let instance = self.build_instance()?;
        if instance.n_arms() < 2 {
            return bad("instance", "needs at least 2 arms".into());
        }
        Ok(())
    }

    pub fn build_instance(&self) -> Result<Instance, CliError> {
        self.instance.build().map_err(|e| CliError::Config(format!("instance: {e}")))
    }

    /// Applies `QBL_THREADS`, if set.
    pub fn apply_env(&mut self) -> Result<(), CliError> {
        if let Some(n) = threads_override()? {
            self.parallelism = n;
        }
        Ok(())
    }
}

/// The `QBL_THREADS` value, if set.
pub fn threads_override() -> Result<Option<usize>, CliError> {
    std::env::var(THREADS_ENV).ok().map(|raw| parse_threads(&raw)).transpose()
}

fn parse_threads(raw: &str) -> Result<usize, CliError> {
    match raw.trim().parse::<usize>() {
        Ok(n) if n >= 1 => Ok(n),
        _ => Err(CliError::Config(format!("{THREADS_ENV}: expected a positive integer, got {raw:?}"))),
    }
}
