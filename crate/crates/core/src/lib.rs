//! Multi-armed bandits augmented with a hard budget of best-action queries.
//!
//! On every round the learner may spend one of `k` queries; the oracle then
//! reveals (and the learner plays) an arm maximizing that round's realized
//! reward vector. Otherwise the learner picks an arm itself and observes only
//! that arm's reward.
//!
//! The crate is organized as:
//!
//! - [`engine`]: the round-by-round interaction loop, budget gating and
//!   regret accounting.
//! - [`envs`]: i.i.d. arms, the correlated two-arm family built from the
//!   `H_c` distortion, and the Bernoulli lower-bound families.
//! - [`policies`]: UCB1, UCB-V, query-first UCB-V, query-spreading UCB-V and
//!   Exp3 with queries.
//! - [`analysis`]: static/dynamic optimum oracles, the variance gap bound,
//!   KL divergences and Monte Carlo aggregation.
//! - [`batch`]: seeded replicate batches, data-parallel when the `parallel`
//!   feature is enabled.

pub mod analysis;
pub mod batch;
pub mod engine;
pub mod envs;
mod error;
pub mod policies;
pub mod rng;
pub mod stats;

pub use engine::{
    enforce_budget, pseudo_regret, simulate_learner, simulate_run, simulate_with, Learner, QueryBudget, RoundRecord,
    RunResult, RunSummary,
};
pub use envs::{ArmDistribution, Instance, InstanceSpec, TieBreak};
pub use error::{Error, Result};
pub use policies::{PolicyKind, PolicySpec, PolicyState};
