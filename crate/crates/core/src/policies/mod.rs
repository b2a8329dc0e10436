//! Learners operating on bandit feedback.
//!
//! Every policy sees only `(arm, reward, was_query)` triples. Index policies
//! pull each arm once before comparing indices and break index ties toward
//! the lowest arm. The clock `t` fed to the indices counts the observations
//! the policy has actually absorbed, so a policy that discards query-phase
//! data restarts from `t = 1` when it takes over.

mod exp3;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use exp3::Exp3State;

/// Default UCB-V exploration constant.
pub const DEFAULT_ZETA: f64 = 1.2;

/// Reward range used by the UCB-V bias term.
pub const REWARD_RANGE: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyKind {
    Ucb1,
    Ucbv,
    QueryThenUcbv,
    SpreadQueryUcbv,
    Exp3WithQueries,
}

impl PolicyKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            PolicyKind::Ucb1 => "ucb1",
            PolicyKind::Ucbv => "ucbv",
            PolicyKind::QueryThenUcbv => "query_then_ucbv",
            PolicyKind::SpreadQueryUcbv => "spread_query_ucbv",
            PolicyKind::Exp3WithQueries => "exp3_with_queries",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LearningRate {
    Fixed(f64),
    Named(AutoRate),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AutoRate {
    Auto,
}

impl Default for LearningRate {
    fn default() -> Self {
        LearningRate::Named(AutoRate::Auto)
    }
}

fn default_zeta() -> f64 {
    DEFAULT_ZETA
}

fn is_default_zeta(z: &f64) -> bool {
    *z == DEFAULT_ZETA
}

fn is_false(b: &bool) -> bool {
    !*b
}

fn is_auto(lr: &LearningRate) -> bool {
    *lr == LearningRate::default()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicySpec {
    pub kind: PolicyKind,
    /// Label used in reports; defaults to the kind's name.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default = "default_zeta", skip_serializing_if = "is_default_zeta")]
    pub zeta: f64,
    #[serde(default, skip_serializing_if = "is_auto")]
    pub learning_rate: LearningRate,
    /// Feed queried-round observations to the learner (ablation; off by default).
    #[serde(default, skip_serializing_if = "is_false")]
    pub retain_query_feedback: bool,
}

impl PolicySpec {
    pub fn new(kind: PolicyKind) -> Self {
        Self {
            kind,
            name: None,
            zeta: DEFAULT_ZETA,
            learning_rate: LearningRate::default(),
            retain_query_feedback: false,
        }
    }

    pub fn with_zeta(mut self, zeta: f64) -> Self {
        self.zeta = zeta;
        self
    }

    pub fn with_learning_rate(mut self, rate: f64) -> Self {
        self.learning_rate = LearningRate::Fixed(rate);
        self
    }

    pub fn retaining_query_feedback(mut self) -> Self {
        self.retain_query_feedback = true;
        self
    }

    pub fn label(&self) -> &str {
        self.name.as_deref().unwrap_or(self.kind.as_str())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.zeta > 0.0 && self.zeta.is_finite()) {
            return Err(Error::config(format!("policy {}: zeta must be > 0, got {}", self.label(), self.zeta)));
        }
        if let LearningRate::Fixed(r) = self.learning_rate {
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::config(format!("policy {}: learning_rate must be > 0, got {r}", self.label())));
            }
        }
        Ok(())
    }
}

/// Whether `kind` asks for a query on round `t` of a horizon-`T` run with budget `k`.
///
/// Query-first kinds ask on `t ≤ k`; the spreading kind asks on the `k` rounds
/// where `⌊t·k/T⌋` steps up, an even grid that covers every round when `k = T`.
pub fn query_schedule(kind: PolicyKind, t: u64, k: u64, horizon: u64) -> bool {
    match kind {
        PolicyKind::Ucb1 | PolicyKind::Ucbv => false,
        PolicyKind::QueryThenUcbv | PolicyKind::Exp3WithQueries => t <= k,
        PolicyKind::SpreadQueryUcbv => {
            if horizon == 0 || t == 0 {
                return false;
            }
            let k = k.min(horizon) as u128;
            let (t, h) = (t as u128, horizon as u128);
            t * k / h > (t - 1) * k / h
        }
    }
}

/// Running per-arm statistics (Welford), variance normalized by `N`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ArmStats {
    pulls: u64,
    mean: f64,
    m2: f64,
}

impl ArmStats {
    pub fn pulls(&self) -> u64 {
        self.pulls
    }

    pub fn mean_est(&self) -> f64 {
        self.mean
    }

    pub fn var_est(&self) -> f64 {
        if self.pulls == 0 {
            0.0
        } else {
            (self.m2 / self.pulls as f64).max(0.0)
        }
    }

    pub fn push(&mut self, x: f64) {
        self.pulls += 1;
        let d = x - self.mean;
        self.mean += d / self.pulls as f64;
        self.m2 += d * (x - self.mean);
    }

    /// Statistics as if built from `pulls` observations with these moments.
    pub fn from_parts(pulls: u64, mean: f64, var: f64) -> Self {
        Self { pulls, mean, m2: var * pulls as f64 }
    }
}

/// `mean + √(2 ln t / N)`.
pub fn ucb1_index(stats: &ArmStats, t: u64) -> f64 {
    if stats.pulls == 0 {
        return f64::INFINITY;
    }
    ucb1_index_at(stats, (t as f64).ln())
}

#[inline]
fn ucb1_index_at(stats: &ArmStats, log_t: f64) -> f64 {
    stats.mean + (2.0 * log_t / stats.pulls as f64).sqrt()
}

/// `mean + √(2·var·ζ·ln t / N) + 3·b·ζ·ln t / N`.
pub fn ucbv_index(stats: &ArmStats, t: u64, zeta: f64, range: f64) -> f64 {
    if stats.pulls == 0 {
        return f64::INFINITY;
    }
    ucbv_index_at(stats, (t as f64).ln(), zeta, range)
}

#[inline]
fn ucbv_index_at(stats: &ArmStats, log_t: f64, zeta: f64, range: f64) -> f64 {
    let s = stats.pulls as f64;
    let e = zeta * log_t;
    stats.mean + (2.0 * stats.var_est() * e / s).sqrt() + 3.0 * range * e / s
}

/// Index of the largest value; ties go to the lowest index.
pub fn argmax_lowest(values: impl IntoIterator<Item = f64>) -> usize {
    let mut best = 0;
    let mut best_val = f64::NEG_INFINITY;
    for (i, v) in values.into_iter().enumerate() {
        if v > best_val || i == 0 {
            best = i;
            best_val = v;
        }
    }
    best
}

/// Per-run learner state for any [`PolicyKind`].
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyState {
    spec: PolicySpec,
    horizon: u64,
    budget: u64,
    stats: Vec<ArmStats>,
    /// Observations absorbed so far; the index clock is `absorbed + 1`.
    absorbed: u64,
    exp3: Option<Exp3State>,
}

impl PolicyState {
    pub fn new(spec: &PolicySpec, n_arms: usize, horizon: u64, budget: u64) -> Result<Self> {
        spec.validate()?;
        if n_arms == 0 {
            return Err(Error::config("policy needs at least one arm"));
        }
        let exp3 = match spec.kind {
            PolicyKind::Exp3WithQueries => {
                let rate = match spec.learning_rate {
                    LearningRate::Fixed(r) => r,
                    LearningRate::Named(AutoRate::Auto) => exp3::auto_rate(n_arms, horizon.saturating_sub(budget)),
                };
                Some(Exp3State::new(n_arms, rate))
            }
            _ => None,
        };
        Ok(Self { spec: spec.clone(), horizon, budget, stats: vec![ArmStats::default(); n_arms], absorbed: 0, exp3 })
    }

    pub fn spec(&self) -> &PolicySpec {
        &self.spec
    }

    pub fn stats(&self) -> &[ArmStats] {
        &self.stats
    }

    pub fn exp3(&self) -> Option<&Exp3State> {
        self.exp3.as_ref()
    }

    /// Local clock used by the indices.
    pub fn clock(&self) -> u64 {
        self.absorbed + 1
    }

    pub fn wants_query(&self, t: u64) -> bool {
        query_schedule(self.spec.kind, t, self.budget, self.horizon)
    }

    /// Picks an arm for a round without a query.
    pub fn select<R: Rng + ?Sized>(&mut self, rng: &mut R) -> usize {
        if let Some(exp3) = &self.exp3 {
            return exp3.sample(rng);
        }
        if let Some(unpulled) = self.stats.iter().position(|s| s.pulls == 0) {
            return unpulled;
        }
        let t = self.clock();
        match self.spec.kind {
            PolicyKind::Ucb1 => {
                let log_t = (t as f64).ln();
                argmax_lowest(self.stats.iter().map(|s| ucb1_index_at(s, log_t)))
            }
            _ => {
                let log_t = (t as f64).ln();
                let zeta = self.spec.zeta;
                argmax_lowest(self.stats.iter().map(|s| ucbv_index_at(s, log_t, zeta, REWARD_RANGE)))
            }
        }
    }

    pub fn observe(&mut self, arm: usize, reward: f64, was_query: bool) -> Result<()> {
        if !(0.0..=1.0).contains(&reward) {
            return Err(Error::input(format!("reward {reward} outside [0, 1]")));
        }
        if arm >= self.stats.len() {
            return Err(Error::input(format!("arm {arm} out of range")));
        }
        if was_query && !self.spec.retain_query_feedback {
            return Ok(());
        }
        if let Some(exp3) = &mut self.exp3 {
            // A queried arm was not drawn from the exponential weights.
            if was_query {
                return Ok(());
            }
            exp3.update(arm, reward);
        }
        self.stats[arm].push(reward);
        self.absorbed += 1;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Stream};
    use proptest::prelude::*;

    #[test]
    fn ucb1_index_examples() {
        let s = ArmStats::from_parts(1, 0.0, 0.0);
        assert_eq!(ucb1_index(&s, 1), 0.0);
        // t = e²
        let s = ArmStats::from_parts(4, 0.5, 0.0);
        assert!((ucb1_index_at(&s, 2.0) - 1.5).abs() < 1e-15);
        let a = ucb1_index(&ArmStats::from_parts(3, 0.4, 0.0), 50);
        let b = ucb1_index(&ArmStats::from_parts(9, 0.4, 0.0), 50);
        assert!(b <= a);
        assert_eq!(ucb1_index(&ArmStats::default(), 10), f64::INFINITY);
    }

    #[test]
    fn ucbv_index_examples() {
        let s = ArmStats::from_parts(1, 1.0, 0.0);
        assert_eq!(ucbv_index(&s, 1, DEFAULT_ZETA, 1.0), 1.0);

        let s = ArmStats::from_parts(10, 0.5, 0.25);
        let got = ucbv_index_at(&s, 1.0, 1.2, 1.0);
        let want = 0.5 + 0.06f64.sqrt() + 0.36;
        assert!((got - want).abs() < 1e-12);
        assert!((got - 1.10495).abs() < 1e-5);

        let s = ArmStats::from_parts(7, 0.3, 0.0);
        let t = 40;
        let bonus = ucbv_index(&s, t, 1.2, 1.0) - 0.3;
        assert!((bonus - 3.0 * 1.2 * (t as f64).ln() / 7.0).abs() < 1e-14);
    }

    #[test]
    fn initialization_sweep_then_lowest_tie_break() {
        let mut rng = stream(0, Stream::Policy);
        for kind in [PolicyKind::Ucb1, PolicyKind::Ucbv, PolicyKind::QueryThenUcbv] {
            let mut st = PolicyState::new(&PolicySpec::new(kind), 3, 100, 0).unwrap();
            for t in 0..3 {
                let arm = st.select(&mut rng);
                assert_eq!(arm, t);
                st.observe(arm, 0.5, false).unwrap();
            }
            // identical stats ⇒ arm 0
            assert_eq!(st.select(&mut rng), 0);
        }
    }

    #[test]
    fn ucb1_prefers_the_paying_arm() {
        let mut st = PolicyState::new(&PolicySpec::new(PolicyKind::Ucb1), 2, 200, 0).unwrap();
        for _ in 0..50 {
            st.observe(0, 1.0, false).unwrap();
            st.observe(1, 0.0, false).unwrap();
        }
        assert_eq!(st.clock(), 101);
        let mut rng = stream(0, Stream::Policy);
        assert_eq!(st.select(&mut rng), 0);
    }

    #[test]
    fn query_observations_are_discarded_by_default() {
        let spec = PolicySpec::new(PolicyKind::QueryThenUcbv);
        let mut st = PolicyState::new(&spec, 2, 10, 3).unwrap();
        let before = st.clone();
        st.observe(1, 0.9, true).unwrap();
        assert_eq!(st, before);

        let mut kept = PolicyState::new(&spec.clone().retaining_query_feedback(), 2, 10, 3).unwrap();
        kept.observe(1, 0.9, true).unwrap();
        assert_eq!(kept.stats()[1].pulls(), 1);
    }

    #[test]
    fn streaming_moments() {
        let mut st = PolicyState::new(&PolicySpec::new(PolicyKind::Ucbv), 2, 10, 0).unwrap();
        st.observe(0, 0.7, false).unwrap();
        assert_eq!(st.stats()[0].mean_est(), 0.7);
        assert_eq!(st.stats()[0].var_est(), 0.0);
        st.observe(1, 0.0, false).unwrap();
        st.observe(1, 1.0, false).unwrap();
        assert_eq!(st.stats()[1].mean_est(), 0.5);
        assert_eq!(st.stats()[1].var_est(), 0.25);
    }

    #[test]
    fn out_of_range_rewards_are_rejected() {
        let mut st = PolicyState::new(&PolicySpec::new(PolicyKind::Ucb1), 2, 10, 0).unwrap();
        assert!(matches!(st.observe(0, 1.5, false), Err(Error::Input(_))));
        assert!(matches!(st.observe(0, -0.1, false), Err(Error::Input(_))));
        assert!(st.observe(5, 0.1, false).is_err());
    }

    #[test]
    fn spec_validation() {
        assert!(PolicySpec::new(PolicyKind::Ucbv).with_zeta(0.0).validate().is_err());
        assert!(PolicySpec::new(PolicyKind::Exp3WithQueries).with_learning_rate(-1.0).validate().is_err());
        assert!(PolicyState::new(&PolicySpec::new(PolicyKind::Ucbv), 0, 10, 0).is_err());
    }

    #[test]
    fn spec_json_forms() {
        let s: PolicySpec = serde_json::from_str(r#"{"kind":"exp3_with_queries","learning_rate":"auto"}"#).unwrap();
        assert_eq!(s.learning_rate, LearningRate::default());
        let s: PolicySpec = serde_json::from_str(r#"{"kind":"exp3_with_queries","learning_rate":0.05}"#).unwrap();
        assert_eq!(s.learning_rate, LearningRate::Fixed(0.05));
        let s: PolicySpec = serde_json::from_str(r#"{"kind":"ucbv"}"#).unwrap();
        assert_eq!(s.zeta, DEFAULT_ZETA);
        assert_eq!(serde_json::to_string(&s).unwrap(), r#"{"kind":"ucbv"}"#);
        assert!(serde_json::from_str::<PolicySpec>(r#"{"kind":"ucbv","zzeta":1}"#).is_err());
    }

    #[test]
    fn schedule_thresholds() {
        let (k, h) = (7, 50);
        assert!(query_schedule(PolicyKind::QueryThenUcbv, k, k, h));
        assert!(!query_schedule(PolicyKind::QueryThenUcbv, k + 1, k, h));
        assert!((1..=h).all(|t| query_schedule(PolicyKind::SpreadQueryUcbv, t, h, h)));
        assert!((1..=h).all(|t| !query_schedule(PolicyKind::Ucbv, t, h, h)));
    }

    proptest! {
        #[test]
        fn schedules_request_min_k_t(h in 1u64..400, k in 0u64..500) {
            for kind in [PolicyKind::QueryThenUcbv, PolicyKind::SpreadQueryUcbv, PolicyKind::Exp3WithQueries] {
                let n = (1..=h).filter(|&t| query_schedule(kind, t, k, h)).count() as u64;
                prop_assert_eq!(n, k.min(h));
            }
        }

        #[test]
        fn streaming_stats_match_batch(xs in proptest::collection::vec(0.0f64..=1.0, 1..200)) {
            let mut s = ArmStats::default();
            xs.iter().for_each(|&x| s.push(x));
            let n = xs.len() as f64;
            let mean = xs.iter().sum::<f64>() / n;
            let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
            prop_assert!((s.mean_est() - mean).abs() < 1e-10);
            prop_assert!((s.var_est() - var).abs() < 1e-10);
            prop_assert!(s.var_est() <= 0.25 + 1e-12);
        }

        #[test]
        fn argmax_is_deterministic(v in proptest::collection::vec(0.0f64..3.0, 1..10)) {
            let a = argmax_lowest(v.iter().copied());
            prop_assert_eq!(a, argmax_lowest(v.iter().copied()));
            prop_assert!(v.iter().all(|x| *x <= v[a]));
            prop_assert!(v[..a].iter().all(|x| *x < v[a]));
        }

        #[test]
        fn state_is_a_function_of_the_observation_log(
            log in proptest::collection::vec((0usize..3, 0.0f64..=1.0, any::<bool>()), 0..120),
            kind_ix in 0usize..5,
        ) {
            let kinds = [PolicyKind::Ucb1, PolicyKind::Ucbv, PolicyKind::QueryThenUcbv, PolicyKind::SpreadQueryUcbv, PolicyKind::Exp3WithQueries];
            let spec = PolicySpec::new(kinds[kind_ix]);
            let mut a = PolicyState::new(&spec, 3, 500, 20).unwrap();
            let mut b = PolicyState::new(&spec, 3, 500, 20).unwrap();
            for &(arm, r, q) in &log {
                a.observe(arm, r, q).unwrap();
            }
            for &(arm, r, q) in &log {
                b.observe(arm, r, q).unwrap();
            }
            prop_assert_eq!(&a, &b);
            let mut r1 = stream(1, Stream::Policy);
            let mut r2 = stream(1, Stream::Policy);
            prop_assert_eq!(a.select(&mut r1), b.select(&mut r2));
        }
    }
}
