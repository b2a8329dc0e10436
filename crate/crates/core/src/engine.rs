//! The learner/environment interaction loop.
//!
//! Each round the environment draws a full reward vector, the learner asks
//! for a query (clamped by the budget), and either the oracle's arm or the
//! learner's own choice is played. The engine keeps the full vector for its
//! own accounting but hands the policy only the played arm's reward.

use crate::envs::Instance;
use crate::error::{Error, Result};
use crate::policies::{PolicySpec, PolicyState};
use crate::rng::{stream, Stream, StreamRng};

/// What the engine needs from a learner. Only the played arm's reward is ever passed in.
pub trait Learner {
    fn label(&self) -> &str;
    fn wants_query(&self, round: u64) -> bool;
    fn select(&mut self, rng: &mut StreamRng) -> usize;
    fn observe(&mut self, arm: usize, reward: f64, was_query: bool) -> Result<()>;
}

impl Learner for PolicyState {
    fn label(&self) -> &str {
        self.spec().label()
    }

    fn wants_query(&self, round: u64) -> bool {
        PolicyState::wants_query(self, round)
    }

    fn select(&mut self, rng: &mut StreamRng) -> usize {
        PolicyState::select(self, rng)
    }

    fn observe(&mut self, arm: usize, reward: f64, was_query: bool) -> Result<()> {
        PolicyState::observe(self, arm, reward, was_query)
    }
}

/// A budget of `limit` best-action queries, `used` of them spent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QueryBudget {
    limit: u64,
    used: u64,
}

impl QueryBudget {
    pub fn new(limit: u64) -> Self {
        Self { limit, used: 0 }
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn used(&self) -> u64 {
        self.used
    }

    pub fn remaining(&self) -> u64 {
        self.limit - self.used
    }
}

/// Grants a requested query iff budget remains, spending one unit when granted.
pub fn enforce_budget(requested: bool, budget: &mut QueryBudget) -> bool {
    let granted = requested && budget.used < budget.limit;
    if granted {
        budget.used += 1;
    }
    granted
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundRecord {
    /// 1-based round number.
    pub round: u64,
    pub queried: bool,
    pub arm: usize,
    pub reward: f64,
    /// Expected reward of the action taken: the arm mean, or `OPT_d` on queried rounds.
    pub chosen_mean: f64,
}

/// Aggregates of one run; enough for Monte Carlo batches without the per-round log.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub policy: String,
    pub horizon: u64,
    pub budget: u64,
    pub n_arms: usize,
    pub seed: u64,
    pub total_reward: f64,
    pub pseudo_regret: f64,
    /// Best arm's realized cumulative reward minus the collected reward.
    pub realized_regret: f64,
    pub queries_used: u64,
    /// Pulls per arm on rounds without a query.
    pub pulls: Vec<u64>,
    /// Sum of `chosen_mean` over all rounds.
    pub chosen_mean_total: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub summary: RunSummary,
    pub records: Vec<RoundRecord>,
}

impl RunResult {
    pub fn total_reward(&self) -> f64 {
        self.summary.total_reward
    }

    pub fn pseudo_regret(&self) -> f64 {
        self.summary.pseudo_regret
    }

    pub fn realized_regret(&self) -> f64 {
        self.summary.realized_regret
    }

    pub fn queries_used(&self) -> u64 {
        self.summary.queries_used
    }
}

/// Runs `horizon` rounds of `policy` on `instance` with `budget` queries, keeping every round.
pub fn simulate_run(
    instance: &Instance,
    policy: &PolicySpec,
    horizon: u64,
    budget: u64,
    seed: u64,
) -> Result<RunResult> {
    let mut records = Vec::with_capacity(horizon as usize);
    let summary = simulate_with(instance, policy, horizon, budget, seed, |r| records.push(*r))?;
    Ok(RunResult { summary, records })
}

/// As [`simulate_run`], streaming each round to `on_round` instead of storing it.
pub fn simulate_with<F>(
    instance: &Instance,
    policy: &PolicySpec,
    horizon: u64,
    budget: u64,
    seed: u64,
    on_round: F,
) -> Result<RunSummary>
where
    F: FnMut(&RoundRecord),
{
    let mut learner = PolicyState::new(policy, instance.n_arms(), horizon, budget)?;
    simulate_learner(instance, &mut learner, horizon, budget, seed, on_round)
}

/// The interaction loop for an arbitrary [`Learner`].
pub fn simulate_learner<L, F>(
    instance: &Instance,
    learner: &mut L,
    horizon: u64,
    budget: u64,
    seed: u64,
    mut on_round: F,
) -> Result<RunSummary>
where
    L: Learner + ?Sized,
    F: FnMut(&RoundRecord),
{
    if horizon < 1 {
        return Err(Error::config("horizon T must be at least 1"));
    }
    if budget > horizon {
        return Err(Error::config(format!("query budget k = {budget} exceeds horizon T = {horizon}")));
    }
    let n = instance.n_arms();
    if n == 0 {
        return Err(Error::config("instance has no arms"));
    }
    let mut env_rng = stream(seed, Stream::Environment);
    let mut policy_rng = stream(seed, Stream::Policy);
    let mut queries = QueryBudget::new(budget);

    let opt_static = instance.opt_static();
    let opt_dynamic = instance.opt_dynamic();
    let means = instance.means();
    let mut rewards = vec![0.0; n];
    let mut arm_totals = vec![0.0; n];
    let mut pulls = vec![0u64; n];
    let mut total_reward = 0.0;
    let mut pseudo_regret = 0.0;
    let mut chosen_mean_total = 0.0;

    for round in 1..=horizon {
        let best = instance.sample_round(&mut env_rng, &mut rewards);
        let queried = enforce_budget(learner.wants_query(round), &mut queries);
        let (arm, chosen_mean) = if queried {
            (best, opt_dynamic)
        } else {
            let arm = learner.select(&mut policy_rng);
            if arm >= n {
                return Err(Error::input(format!("learner {} chose arm {arm} of {n}", learner.label())));
            }
            pulls[arm] += 1;
            (arm, means[arm])
        };
        let reward = rewards[arm];
        debug_assert!(!queried || rewards.iter().all(|r| *r <= reward));
        learner.observe(arm, reward, queried)?;

        for (acc, r) in arm_totals.iter_mut().zip(&rewards) {
            *acc += r;
        }
        total_reward += reward;
        pseudo_regret += opt_static - chosen_mean;
        chosen_mean_total += chosen_mean;
        on_round(&RoundRecord { round, queried, arm, reward, chosen_mean });
    }

    let best_arm_total = arm_totals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(RunSummary {
        policy: learner.label().to_owned(),
        horizon,
        budget,
        n_arms: n,
        seed,
        total_reward,
        pseudo_regret,
        realized_regret: best_arm_total - total_reward,
        queries_used: queries.used(),
        pulls,
        chosen_mean_total,
    })
}

/// `Σ_t (μ* − chosen_mean_t)` recomputed from the round log.
pub fn pseudo_regret(run: &RunResult, instance: &Instance) -> f64 {
    let opt = instance.opt_static();
    run.records.iter().map(|r| opt - r.chosen_mean).sum()
}
