use serde::Serialize;

use crate::engine::{pseudo_regret, RunResult, RunSummary};
use crate::envs::Instance;
use crate::error::{Error, Result};
use crate::stats::mean_and_se;

/// Normal quantile for two-sided 95% intervals.
pub const Z95: f64 = 1.96;

/// Monte Carlo estimate of the expected regret of one configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegretSummary {
    pub policy: String,
    pub horizon: u64,
    pub budget: u64,
    pub replicates: usize,
    pub mean_pseudo_regret: f64,
    pub std_err: f64,
    pub ci95: (f64, f64),
    pub mean_realized_regret: f64,
    pub queries_used_mean: f64,
}

impl RegretSummary {
    pub fn half_width(&self) -> f64 {
        Z95 * self.std_err
    }

    /// Summary of a zero-round configuration: every statistic is exactly 0.
    pub fn empty(policy: &str, replicates: usize) -> Self {
        Self {
            policy: policy.to_owned(),
            horizon: 0,
            budget: 0,
            replicates,
            mean_pseudo_regret: 0.0,
            std_err: 0.0,
            ci95: (0.0, 0.0),
            mean_realized_regret: 0.0,
            queries_used_mean: 0.0,
        }
    }
}

/// Aggregates replicate summaries that share policy, horizon, budget and arm count.
pub fn aggregate(runs: &[RunSummary]) -> Result<RegretSummary> {
    let first = runs.first().ok_or_else(|| Error::Aggregation("no runs to aggregate".into()))?;
    if let Some(odd) = runs.iter().find(|r| {
        r.policy != first.policy || r.horizon != first.horizon || r.budget != first.budget || r.n_arms != first.n_arms
    }) {
        return Err(Error::Aggregation(format!(
            "mixed configurations: ({}, T={}, k={}) vs ({}, T={}, k={})",
            first.policy, first.horizon, first.budget, odd.policy, odd.horizon, odd.budget
        )));
    }
    let regrets: Vec<f64> = runs.iter().map(|r| r.pseudo_regret).collect();
    Ok(build(first, &regrets, runs))
}

/// Aggregates full runs, recomputing each pseudo-regret from its round log.
pub fn aggregate_runs(runs: &[RunResult], instance: &Instance) -> Result<RegretSummary> {
    let summaries: Vec<RunSummary> = runs.iter().map(|r| r.summary.clone()).collect();
    aggregate(&summaries)?;
    let regrets: Vec<f64> = runs.iter().map(|r| pseudo_regret(r, instance)).collect();
    Ok(build(&summaries[0], &regrets, &summaries))
}

fn build(first: &RunSummary, regrets: &[f64], runs: &[RunSummary]) -> RegretSummary {
    let (mean, se) = mean_and_se(regrets);
    let n = runs.len() as f64;
    RegretSummary {
        policy: first.policy.clone(),
        horizon: first.horizon,
        budget: first.budget,
        replicates: runs.len(),
        mean_pseudo_regret: mean,
        std_err: se,
        ci95: (mean - Z95 * se, mean + Z95 * se),
        mean_realized_regret: runs.iter().map(|r| r.realized_regret).sum::<f64>() / n,
        queries_used_mean: runs.iter().map(|r| r.queries_used as f64).sum::<f64>() / n,
    }
}
