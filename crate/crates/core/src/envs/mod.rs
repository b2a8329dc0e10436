//! Environments: arm distributions, instance descriptions and per-round samplers.
//!
//! Three families are supported:
//!
//! - `iid`: every arm draws independently from its own distribution on `[0, 1]`.
//! - `correlated`: the two-arm instances `ν₁`/`ν₂` whose rewards are coupled
//!   through a shared uniform variable and a fair coin (see [`correlated`]).
//! - `lb_stochastic`: the Bernoulli families used to witness the stochastic
//!   lower bound (see [`lower_bound`]). They are i.i.d. once built.
//!
//! Arms are zero-indexed everywhere, including the JSON format.

pub mod correlated;
pub mod lower_bound;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::analysis;
use crate::error::{Error, Result};

pub use correlated::{
    correlated_params, h_inverse, h_map, sample_correlated_round, CorrelatedRound, CorrelatedSpec, Variant,
};
pub use lower_bound::{build_lb_case1, build_lb_instances, LbCase1Spec, LbInstances, LbStochasticSpec};

const PROB_SUM_TOL: f64 = 1e-12;

/// Declarative arm description, as it appears in instance files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ArmSpec {
    Bernoulli { p: f64 },
    Discrete { values: Vec<f64>, probs: Vec<f64> },
    Uniform01,
}

#[derive(Debug, Clone, PartialEq)]
enum Law {
    Bernoulli(f64),
    /// Support sorted ascending, with the running CDF at each support point.
    Discrete {
        support: Vec<f64>,
        cdf: Vec<f64>,
    },
    Uniform01,
}

/// A validated reward distribution on `[0, 1]` with its analytic moments.
#[derive(Debug, Clone, PartialEq)]
pub struct ArmDistribution {
    spec: ArmSpec,
    law: Law,
    mean: f64,
    variance: f64,
}

impl ArmDistribution {
    pub fn bernoulli(p: f64) -> Result<Self> {
        Self::from_spec(ArmSpec::Bernoulli { p })
    }

    pub fn uniform01() -> Self {
        Self::from_spec(ArmSpec::Uniform01).expect("uniform arm is always valid")
    }

    pub fn discrete(values: Vec<f64>, probs: Vec<f64>) -> Result<Self> {
        Self::from_spec(ArmSpec::Discrete { values, probs })
    }

    pub fn from_spec(spec: ArmSpec) -> Result<Self> {
        let (law, mean, variance) = match &spec {
            ArmSpec::Bernoulli { p } => {
                let p = *p;
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::config(format!("bernoulli p = {p} outside [0, 1]")));
                }
                (Law::Bernoulli(p), p, p * (1.0 - p))
            }
            ArmSpec::Discrete { values, probs } => {
                if values.is_empty() || values.len() != probs.len() {
                    return Err(Error::config("discrete arm needs equally many values and probs (at least one)"));
                }
                if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
                    return Err(Error::config(format!("discrete support value {v} outside [0, 1]")));
                }
                if let Some(q) = probs.iter().find(|q| !(0.0..=1.0).contains(*q)) {
                    return Err(Error::config(format!("discrete probability {q} outside [0, 1]")));
                }
                let total: f64 = probs.iter().sum();
                if (total - 1.0).abs() > PROB_SUM_TOL {
                    return Err(Error::config(format!("discrete probabilities sum to {total}, not 1")));
                }
                let mut pairs: Vec<(f64, f64)> = values.iter().copied().zip(probs.iter().copied()).collect();
                pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
                let mean: f64 = pairs.iter().map(|(v, q)| v * q).sum();
                let second: f64 = pairs.iter().map(|(v, q)| v * v * q).sum();
                let mut acc = 0.0;
                let mut cdf = Vec::with_capacity(pairs.len());
                for (_, q) in &pairs {
                    acc += q;
                    cdf.push(acc);
                }
                // Inverse-CDF sampling must terminate on the last atom.
                *cdf.last_mut().unwrap() = 1.0;
                let support = pairs.iter().map(|(v, _)| *v).collect();
                (Law::Discrete { support, cdf }, mean, (second - mean * mean).max(0.0))
            }
            ArmSpec::Uniform01 => (Law::Uniform01, 0.5, 1.0 / 12.0),
        };
        Ok(Self { spec, law, mean, variance })
    }

    pub fn spec(&self) -> &ArmSpec {
        &self.spec
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }

    /// `P(X <= x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        match &self.law {
            Law::Bernoulli(p) => {
                if x < 0.0 {
                    0.0
                } else if x < 1.0 {
                    1.0 - p
                } else {
                    1.0
                }
            }
            Law::Discrete { support, cdf } => {
                let idx = support.partition_point(|v| *v <= x);
                if idx == 0 {
                    0.0
                } else {
                    cdf[idx - 1]
                }
            }
            Law::Uniform01 => x.clamp(0.0, 1.0),
        }
    }

    /// Atoms of the distribution, if it is purely discrete.
    pub(crate) fn atoms(&self) -> Option<Vec<f64>> {
        match &self.law {
            Law::Bernoulli(_) => Some(vec![0.0, 1.0]),
            Law::Discrete { support, .. } => Some(support.clone()),
            Law::Uniform01 => None,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match &self.law {
            Law::Bernoulli(p) => {
                if rng.gen::<f64>() < *p {
                    1.0
                } else {
                    0.0
                }
            }
            Law::Discrete { support, cdf } => {
                let u: f64 = rng.gen();
                let idx = cdf.partition_point(|c| *c <= u).min(support.len() - 1);
                support[idx]
            }
            Law::Uniform01 => rng.gen(),
        }
    }
}

/// Fixed priority order the oracle uses to break ties between maximizing arms.
///
/// `priority[0]` wins every tie it takes part in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TieBreak {
    priority: Vec<usize>,
}

impl TieBreak {
    pub fn ascending(n: usize) -> Self {
        Self { priority: (0..n).collect() }
    }

    pub fn new(priority: Vec<usize>) -> Result<Self> {
        let n = priority.len();
        let mut seen = vec![false; n];
        for &arm in &priority {
            if arm >= n || seen[arm] {
                return Err(Error::config(format!("tie_break {priority:?} is not a permutation of 0..{n}")));
            }
            seen[arm] = true;
        }
        Ok(Self { priority })
    }

    pub fn priority(&self) -> &[usize] {
        &self.priority
    }

    pub fn len(&self) -> usize {
        self.priority.len()
    }

    pub fn is_empty(&self) -> bool {
        self.priority.is_empty()
    }

    pub fn is_ascending(&self) -> bool {
        self.priority.iter().enumerate().all(|(i, &a)| i == a)
    }

    /// Arm maximizing `rewards`; ties go to the arm appearing first in the priority order.
    pub fn argmax(&self, rewards: &[f64]) -> usize {
        let mut best = self.priority[0];
        for &arm in &self.priority[1..] {
            if rewards[arm] > rewards[best] {
                best = arm;
            }
        }
        best
    }
}

/// Draws one reward vector from independent arms; returns the oracle's arm.
pub fn sample_iid_round<R: Rng + ?Sized>(
    arms: &[ArmDistribution],
    tie_break: &TieBreak,
    rng: &mut R,
    rewards: &mut [f64],
) -> usize {
    for (slot, arm) in rewards.iter_mut().zip(arms) {
        *slot = arm.sample(rng);
    }
    tie_break.argmax(rewards)
}

/// Serializable instance description (JSON syntax, tagged by `family`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum InstanceSpec {
    Iid {
        arms: Vec<ArmSpec>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tie_break: Option<Vec<usize>>,
    },
    Correlated {
        variant: Variant,
        a: f64,
        eta: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tie_break: Option<Vec<usize>>,
    },
    LbStochastic {
        n: usize,
        horizon: u64,
        k: u64,
        variant: Variant,
        /// Perturbed arm; defaults to the lowest-priority arm.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        j: Option<usize>,
        /// `1` for the small-budget construction, `2` (default) for the large-budget one.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        case: Option<u8>,
        /// Case 1 only.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        delta: Option<f64>,
        /// Case 1 only.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        p: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tie_break: Option<Vec<usize>>,
    },
}

impl InstanceSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::config(format!("instance: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance specs always serialize")
    }

    pub fn bernoulli(means: &[f64]) -> Self {
        InstanceSpec::Iid { arms: means.iter().map(|&p| ArmSpec::Bernoulli { p }).collect(), tie_break: None }
    }

    pub fn family(&self) -> &'static str {
        match self {
            InstanceSpec::Iid { .. } => "iid",
            InstanceSpec::Correlated { .. } => "correlated",
            InstanceSpec::LbStochastic { .. } => "lb_stochastic",
        }
    }

    pub fn build(&self) -> Result<Instance> {
        Instance::from_spec(self)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    Iid(Vec<ArmDistribution>),
    Correlated(CorrelatedSpec),
}

/// A validated, ready-to-sample environment with its analytic optima.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    family: Family,
    tie_break: TieBreak,
    means: Vec<f64>,
    variances: Vec<f64>,
    opt_static: f64,
    opt_dynamic: f64,
}

impl Instance {
    pub fn from_spec(spec: &InstanceSpec) -> Result<Self> {
        match spec {
            InstanceSpec::Iid { arms, tie_break } => {
                let arms = arms.iter().cloned().map(ArmDistribution::from_spec).collect::<Result<Vec<_>>>()?;
                let tb = resolve_tie_break(tie_break.as_deref(), arms.len())?;
                Self::iid_with_tie_break(arms, tb)
            }
            InstanceSpec::Correlated { variant, a, eta, tie_break } => {
                resolve_tie_break(tie_break.as_deref(), 2)?;
                Ok(Self::correlated(CorrelatedSpec::new(*variant, *a, *eta)?))
            }
            InstanceSpec::LbStochastic { n, horizon, k, variant, j, case, delta, p, tie_break } => {
                let tb = resolve_tie_break(tie_break.as_deref(), *n)?;
                let (nu1, nu2) = match case.unwrap_or(2) {
                    2 => {
                        if delta.is_some() || p.is_some() {
                            return Err(Error::config("delta and p are derived in case 2 and may not be set"));
                        }
                        let built = lower_bound::build_lb_instances_with(*n, *horizon, *k, *j, &tb)?;
                        (built.nu1, built.nu2)
                    }
                    1 => {
                        let (nu1, nu2, _) = lower_bound::build_lb_case1_with(*n, *horizon, *k, *j, *delta, *p, &tb)?;
                        (nu1, nu2)
                    }
                    other => return Err(Error::config(format!("case must be 1 or 2, got {other}"))),
                };
                let arms = match variant {
                    Variant::Nu1 => nu1,
                    Variant::Nu2 => nu2,
                };
                Self::iid_with_tie_break(arms, tb)
            }
        }
    }

    pub fn iid(arms: Vec<ArmDistribution>) -> Result<Self> {
        let tb = TieBreak::ascending(arms.len());
        Self::iid_with_tie_break(arms, tb)
    }

    pub fn bernoulli(means: &[f64]) -> Result<Self> {
        let arms = means.iter().map(|&p| ArmDistribution::bernoulli(p)).collect::<Result<Vec<_>>>()?;
        Self::iid(arms)
    }

    pub fn iid_with_tie_break(arms: Vec<ArmDistribution>, tie_break: TieBreak) -> Result<Self> {
        if arms.is_empty() {
            return Err(Error::config("instance has no arms"));
        }
        if tie_break.len() != arms.len() {
            return Err(Error::config(format!(
                "tie_break covers {} arms but the instance has {}",
                tie_break.len(),
                arms.len()
            )));
        }
        let means: Vec<f64> = arms.iter().map(ArmDistribution::mean).collect();
        let variances = arms.iter().map(ArmDistribution::variance).collect();
        let opt_static = means.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let opt_dynamic = analysis::expected_max_independent(&arms);
        Ok(Self { family: Family::Iid(arms), tie_break, means, variances, opt_static, opt_dynamic })
    }

    pub fn correlated(spec: CorrelatedSpec) -> Self {
        let means = spec.arm_means().to_vec();
        let variances = spec.arm_variances().to_vec();
        Self {
            opt_static: spec.opt_static(),
            opt_dynamic: spec.opt_dynamic(),
            family: Family::Correlated(spec),
            tie_break: TieBreak::ascending(2),
            means,
            variances,
        }
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn is_iid(&self) -> bool {
        matches!(self.family, Family::Iid(_))
    }

    pub fn n_arms(&self) -> usize {
        self.means.len()
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn variances(&self) -> &[f64] {
        &self.variances
    }

    pub fn tie_break(&self) -> &TieBreak {
        &self.tie_break
    }

    /// Best fixed-arm mean, `max_i E[X_i]`.
    pub fn opt_static(&self) -> f64 {
        self.opt_static
    }

    /// Expected per-round maximum, `E[max_i X_i]` (exact).
    pub fn opt_dynamic(&self) -> f64 {
        self.opt_dynamic
    }

    /// `μ* − μ_i` for every arm.
    pub fn gaps(&self) -> Vec<f64> {
        self.means.iter().map(|m| self.opt_static - m).collect()
    }

    /// Fills `rewards` with one round's reward vector; returns the oracle's arm.
    pub fn sample_round<R: Rng + ?Sized>(&self, rng: &mut R, rewards: &mut [f64]) -> usize {
        match &self.family {
            Family::Iid(arms) => sample_iid_round(arms, &self.tie_break, rng, rewards),
            Family::Correlated(spec) => {
                let round = sample_correlated_round(spec, rng);
                rewards.copy_from_slice(&round.rewards);
                round.best
            }
        }
    }
}

fn resolve_tie_break(order: Option<&[usize]>, n: usize) -> Result<TieBreak> {
    match order {
        None => Ok(TieBreak::ascending(n)),
        Some(order) => {
            if order.len() != n {
                return Err(Error::config(format!("tie_break has {} entries for {n} arms", order.len())));
            }
            TieBreak::new(order.to_vec())
        }
    }
}
