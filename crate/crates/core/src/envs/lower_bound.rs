//! Bernoulli instance pairs witnessing the stochastic lower bound.
//!
//! Large-budget regime (`√(nT) ≤ k ≤ T/100`), with `M = T − k`:
//!
//! ```text
//! Δ = n / (1000 k),   ε = M Δ / (50 k),   p = 2Δ + ε
//! ν₁: arm 0 ~ Be(1 − p + Δ), every other arm ~ Be(1 − p)
//! ν₂: as ν₁, except arm j ~ Be(1 − p + 2Δ)
//! ```
//!
//! `j` must sit in the half of the arms with the lowest oracle tie-break
//! priority, so that queries rarely reveal it.

use super::{ArmDistribution, TieBreak};
use crate::error::{Error, Result};

/// Absolute constant in `k ≤ T / C`.
pub const BUDGET_RATIO: u64 = 100;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LbStochasticSpec {
    pub n: usize,
    pub horizon: u64,
    pub k: u64,
    pub j: usize,
    pub delta: f64,
    pub epsilon: f64,
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LbInstances {
    pub nu1: Vec<ArmDistribution>,
    pub nu2: Vec<ArmDistribution>,
    pub spec: LbStochasticSpec,
}

/// Small-budget regime (`k ≤ √(nT)`); `delta` and `p` are free parameters here.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LbCase1Spec {
    pub n: usize,
    pub horizon: u64,
    pub k: u64,
    pub j: usize,
    pub delta: f64,
    pub p: f64,
}

pub fn build_lb_instances(n: usize, horizon: u64, k: u64, j: Option<usize>) -> Result<LbInstances> {
    build_lb_instances_with(n, horizon, k, j, &TieBreak::ascending(n))
}

pub fn build_lb_instances_with(
    n: usize,
    horizon: u64,
    k: u64,
    j: Option<usize>,
    tie_break: &TieBreak,
) -> Result<LbInstances> {
    check_common(n, horizon, k, tie_break)?;
    if (k as u128) * (k as u128) < (n as u128) * (horizon as u128) {
        return Err(Error::config(format!(
            "constraint k >= sqrt(n*T) violated: k = {k}, n*T = {}",
            n as u64 * horizon
        )));
    }
    let j = resolve_j(n, j, tie_break)?;
    let m = (horizon - k) as f64;
    let kf = k as f64;
    let delta = n as f64 / (1000.0 * kf);
    let epsilon = m * delta / (50.0 * kf);
    let p = 2.0 * delta + epsilon;
    if p > 0.25 {
        return Err(Error::config(format!("constraint p <= 1/4 violated: p = {p}")));
    }
    if 1.0 - p + 2.0 * delta > 1.0 {
        return Err(Error::config(format!("constraint 1 - p + 2*delta <= 1 violated: {}", 1.0 - p + 2.0 * delta)));
    }
    let (nu1, nu2) = bernoulli_pair(n, j, delta, p)?;
    Ok(LbInstances { nu1, nu2, spec: LbStochasticSpec { n, horizon, k, j, delta, epsilon, p } })
}

/// Defaults: `delta = √(n/M) / 4`, `p = 1/8`.
pub fn build_lb_case1(
    n: usize,
    horizon: u64,
    k: u64,
    j: Option<usize>,
    delta: Option<f64>,
    p: Option<f64>,
) -> Result<(Vec<ArmDistribution>, Vec<ArmDistribution>, LbCase1Spec)> {
    build_lb_case1_with(n, horizon, k, j, delta, p, &TieBreak::ascending(n))
}

pub(crate) fn build_lb_case1_with(
    n: usize,
    horizon: u64,
    k: u64,
    j: Option<usize>,
    delta: Option<f64>,
    p: Option<f64>,
    tie_break: &TieBreak,
) -> Result<(Vec<ArmDistribution>, Vec<ArmDistribution>, LbCase1Spec)> {
    check_common(n, horizon, k, tie_break)?;
    if (k as u128) * (k as u128) > (n as u128) * (horizon as u128) {
        return Err(Error::config(format!(
            "constraint k <= sqrt(n*T) violated: k = {k}, n*T = {}",
            n as u64 * horizon
        )));
    }
    let j = resolve_j(n, j, tie_break)?;
    let m = (horizon - k) as f64;
    let delta = delta.unwrap_or_else(|| (n as f64 / m).sqrt() / 4.0);
    let p = p.unwrap_or(0.125);
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::config(format!("constraint 0 < p < 1 violated: p = {p}")));
    }
    if delta.is_nan() || delta <= 0.0 || 1.0 - p + 2.0 * delta > 1.0 {
        return Err(Error::config(format!("constraint 0 < delta <= p/2 violated: delta = {delta}, p = {p}")));
    }
    let (nu1, nu2) = bernoulli_pair(n, j, delta, p)?;
    Ok((nu1, nu2, LbCase1Spec { n, horizon, k, j, delta, p }))
}

fn check_common(n: usize, horizon: u64, k: u64, tie_break: &TieBreak) -> Result<()> {
    if n < 2 {
        return Err(Error::config(format!("constraint n >= 2 violated: n = {n}")));
    }
    if tie_break.len() != n {
        return Err(Error::config("tie_break length differs from n"));
    }
    if k < 1 {
        return Err(Error::config("constraint k >= 1 violated"));
    }
    if k.saturating_mul(BUDGET_RATIO) > horizon {
        return Err(Error::config(format!("constraint k <= T/{BUDGET_RATIO} violated: k = {k}, T = {horizon}")));
    }
    Ok(())
}

/// `j` defaults to the lowest-priority arm and must lie in the `⌊n/2⌋` lowest-priority arms.
fn resolve_j(n: usize, j: Option<usize>, tie_break: &TieBreak) -> Result<usize> {
    let priority = tie_break.priority();
    let low_half = &priority[n - n / 2..];
    let j = j.unwrap_or(priority[n - 1]);
    if j == 0 || !low_half.contains(&j) {
        return Err(Error::config(format!(
            "constraint j in lowest-priority half violated: j = {j}, allowed {low_half:?} excluding arm 0"
        )));
    }
    Ok(j)
}

fn bernoulli_pair(n: usize, j: usize, delta: f64, p: f64) -> Result<(Vec<ArmDistribution>, Vec<ArmDistribution>)> {
    let base = 1.0 - p;
    let mut nu1 = Vec::with_capacity(n);
    nu1.push(ArmDistribution::bernoulli(1.0 - p + delta)?);
    for _ in 1..n {
        nu1.push(ArmDistribution::bernoulli(base)?);
    }
    let mut nu2 = nu1.clone();
    nu2[j] = ArmDistribution::bernoulli(1.0 - p + 2.0 * delta)?;
    Ok((nu1, nu2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-15 * b.abs().max(1e-300) + 1e-21
    }

    #[test]
    fn two_arm_example() {
        let built = build_lb_instances(2, 101_000, 1000, Some(1)).unwrap();
        let s = built.spec;
        assert!(close(s.delta, 2e-6), "{}", s.delta);
        assert!(close(s.epsilon, 4e-6), "{}", s.epsilon);
        assert!(close(s.p, 8e-6), "{}", s.p);
        assert_eq!(s.p, 2.0 * s.delta + s.epsilon);
    }

    #[test]
    fn construction_table_means_and_gaps() {
        let built = build_lb_instances(6, 1_000_000, 5000, None).unwrap();
        let s = built.spec;
        assert_eq!(s.j, 5);
        let m1: Vec<f64> = built.nu1.iter().map(ArmDistribution::mean).collect();
        let m2: Vec<f64> = built.nu2.iter().map(ArmDistribution::mean).collect();
        assert_eq!(m1[0], 1.0 - s.p + s.delta);
        assert!(m1[1..].iter().all(|&m| m == 1.0 - s.p));
        assert_eq!(m2[5], 1.0 - s.p + 2.0 * s.delta);
        assert_eq!(&m2[..5], &m1[..5]);
        // ν₁: arm j trails arm 0 by Δ; ν₂: arm 0 trails arm j by Δ.
        assert!((m1[0] - m1[5] - s.delta).abs() < 1e-15);
        assert!((m2[5] - m2[0] - s.delta).abs() < 1e-15);
    }

    #[test]
    fn regime_violations_name_the_constraint() {
        let err = build_lb_instances(2, 1000, 5, None).unwrap_err().to_string();
        assert!(err.contains("k >= sqrt(n*T)"), "{err}");
        let err = build_lb_instances(2, 10_000, 200, None).unwrap_err().to_string();
        assert!(err.contains("k <= T/100"), "{err}");
        let err = build_lb_instances(1, 10_000, 100, None).unwrap_err().to_string();
        assert!(err.contains("n >= 2"), "{err}");
        let err = build_lb_instances(4, 1_000_000, 5000, Some(1)).unwrap_err().to_string();
        assert!(err.contains("lowest-priority half"), "{err}");
    }

    #[test]
    fn custom_priority_moves_the_low_half() {
        let tb = TieBreak::new(vec![3, 2, 0, 1]).unwrap();
        let built = build_lb_instances_with(4, 1_000_000, 5000, None, &tb).unwrap();
        assert_eq!(built.spec.j, 1);
        assert!(build_lb_instances_with(4, 1_000_000, 5000, Some(3), &tb).is_err());
    }

    #[test]
    fn case1_defaults() {
        let (nu1, nu2, spec) = build_lb_case1(4, 100_000, 100, None, None, None).unwrap();
        let m = 99_900.0f64;
        assert_eq!(spec.delta, (4.0 / m).sqrt() / 4.0);
        assert_eq!(spec.p, 0.125);
        assert_eq!(nu1[0].mean(), 1.0 - 0.125 + spec.delta);
        assert_eq!(nu2[3].mean(), 1.0 - 0.125 + 2.0 * spec.delta);
        assert!(build_lb_case1(4, 100_000, 1000, None, None, None).is_err());
    }
}
