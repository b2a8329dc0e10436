//! Replicate batches over `(policy, k)` and the results table.

use std::io::Write;
use std::path::Path;

use qbl_core::analysis::{aggregate, RegretSummary};
use qbl_core::batch::{replicate_seeds, run_replicates};
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::CliError;

pub const CSV_HEADER: &str =
    "policy,k,mean_pseudo_regret,std_err,ci95_lo,ci95_hi,mean_realized_regret,queries_used_mean";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub policy: String,
    pub k: u64,
    pub mean_pseudo_regret: f64,
    pub std_err: f64,
    pub ci95_lo: f64,
    pub ci95_hi: f64,
    pub mean_realized_regret: f64,
    pub queries_used_mean: f64,
}

impl From<&RegretSummary> for SweepRow {
    fn from(s: &RegretSummary) -> Self {
        SweepRow {
            policy: s.policy.clone(),
            k: s.budget,
            mean_pseudo_regret: s.mean_pseudo_regret,
            std_err: s.std_err,
            ci95_lo: s.ci95.0,
            ci95_hi: s.ci95.1,
            mean_realized_regret: s.mean_realized_regret,
            queries_used_mean: s.queries_used_mean,
        }
    }
}

/// One row per `(policy, k)`, policies outermost, in config order.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<SweepRow>, CliError> {
    let instance = config.build_instance()?;
    let seeds = replicate_seeds(config.root_seed, config.replicates);
    let mut rows = Vec::with_capacity(config.policies.len() * config.k_grid.len());
    for policy in &config.policies {
        for &k in &config.k_grid {
            let runs = run_replicates(&instance, policy, config.horizon, k, &seeds, config.parallelism)?;
            rows.push(SweepRow::from(&aggregate(&runs)?));
        }
    }
    Ok(rows)
}

pub fn to_csv(rows: &[SweepRow]) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).expect("writing to memory cannot fail");
    }
    w.into_inner().expect("writing to memory cannot fail")
}

/// Writes `bytes` to `path` through a temporary file in the same directory, so
/// the final path either holds the complete file or is untouched.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir, e))?;
    tmp.write_all(bytes).and_then(|_| tmp.as_file().sync_all()).map_err(|e| CliError::io(tmp.path(), e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}
