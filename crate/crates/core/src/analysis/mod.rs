//! Analytic and Monte Carlo oracles.
//!
//! `OPT_s = max_i E[X_i]` is what the best fixed arm earns per round;
//! `OPT_d = E[max_i X_i]` is what an agent picking after seeing the reward
//! vector earns, i.e. the expected reward of a queried round. For independent
//! arms their gap is bounded below by `(1/2n) Σ_{Δ_i > 0} (σ_i² − Δ_i)₊`.

mod decomposition;
mod summary;

use rand::Rng;
use serde::Serialize;

use crate::envs::{ArmDistribution, Family, Instance};
use crate::error::{Error, Result};
use crate::stats::Moments;

pub use decomposition::{decomposition_residual, DecompositionReport};
pub use summary::{aggregate, aggregate_runs, RegretSummary, Z95};

/// Default Simpson grid for density KLs.
pub const DEFAULT_GRIDPOINTS: usize = 4097;

/// Best fixed-arm mean.
pub fn opt_static(instance: &Instance) -> Result<f64> {
    match instance.family() {
        Family::Iid(_) | Family::Correlated(_) => Ok(instance.opt_static()),
    }
}

/// `1 − Π (1 − p_i)` for independent Bernoulli arms.
pub fn opt_dynamic_bernoulli(means: &[f64]) -> f64 {
    1.0 - means.iter().map(|p| 1.0 - p).product::<f64>()
}

/// `E[max_i X_i]` for independent arms on `[0, 1]`, exactly.
///
/// Integrates `1 − Π_i F_i(x)` over `[0, 1]`. Between consecutive atoms every
/// discrete CDF is flat and every uniform arm contributes a factor `x`, so each
/// piece is `(r − l) − C (r^{u+1} − l^{u+1}) / (u + 1)`.
pub fn expected_max_independent(arms: &[ArmDistribution]) -> f64 {
    let mut cuts = vec![0.0, 1.0];
    let mut uniform = 0i32;
    for arm in arms {
        match arm.atoms() {
            Some(atoms) => cuts.extend(atoms.into_iter().filter(|v| *v > 0.0 && *v < 1.0)),
            None => uniform += 1,
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let discrete: Vec<&ArmDistribution> = arms.iter().filter(|a| a.atoms().is_some()).collect();
    cuts.windows(2)
        .map(|w| {
            let (l, r) = (w[0], w[1]);
            let c: f64 = discrete.iter().map(|a| a.cdf(l)).product();
            let e = uniform + 1;
            (r - l) - c * (r.powi(e) - l.powi(e)) / e as f64
        })
        .sum()
}

/// Closed-form `OPT_d` of a built instance.
pub fn opt_dynamic(instance: &Instance) -> f64 {
    instance.opt_dynamic()
}

/// Monte Carlo estimate of `E[max_i X_i]` with its standard error.
pub fn opt_dynamic_mc<R: Rng + ?Sized>(instance: &Instance, samples: usize, rng: &mut R) -> Result<(f64, f64)> {
    if samples < 2 {
        return Err(Error::Analysis("opt_dynamic_mc needs at least 2 samples".into()));
    }
    let mut rewards = vec![0.0; instance.n_arms()];
    let mut acc = Moments::default();
    for _ in 0..samples {
        let best = instance.sample_round(rng, &mut rewards);
        acc.push(rewards[best]);
    }
    Ok((acc.mean(), acc.std_err()))
}

/// `(1/2n) Σ_{i: Δ_i > 0} max(σ_i² − Δ_i, 0)`.
pub fn variance_gap_bound(gaps: &[f64], variances: &[f64], n: usize) -> f64 {
    let total: f64 =
        gaps.iter().zip(variances).filter(|(gap, _)| **gap > 0.0).map(|(gap, var)| (var - gap).max(0.0)).sum();
    total / (2.0 * n as f64)
}

/// `KL(Be(p) ‖ Be(q))`, with `0·ln 0 = 0`; `+∞` when `q` cannot produce an outcome `p` can.
pub fn kl_bernoulli(p: f64, q: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) || !(0.0..=1.0).contains(&q) {
        return Err(Error::input(format!("kl_bernoulli({p}, {q}) needs p, q in [0, 1]")));
    }
    if (q == 0.0 && p > 0.0) || (q == 1.0 && p < 1.0) {
        return Ok(f64::INFINITY);
    }
    let head = if p == 0.0 { 0.0 } else { p * (p / q).ln() };
    let tail = if p == 1.0 { 0.0 } else { (1.0 - p) * ((-p).ln_1p() - (-q).ln_1p()) };
    Ok((head + tail).max(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KlDirection {
    /// `KL(p₊ ‖ p₋)`
    Forward,
    /// `KL(p₋ ‖ p₊)`
    Reverse,
}

/// KL between the two observation densities of the correlated family.
///
/// `p₊(x) = 1 + ((a+b)/2)(2x−1)` and `p₋(x) = 1 + (b/2)(2x−1)`, integrated
/// with composite Simpson on `gridpoints` (odd) nodes.
pub fn kl_density_grid(a: f64, b: f64, direction: KlDirection, gridpoints: usize) -> Result<f64> {
    if gridpoints < 3 || gridpoints.is_multiple_of(2) {
        return Err(Error::Analysis(format!("Simpson grid needs an odd count >= 3, got {gridpoints}")));
    }
    let plus = |x: f64| 1.0 + 0.5 * (a + b) * (2.0 * x - 1.0);
    let minus = |x: f64| 1.0 + 0.5 * b * (2.0 * x - 1.0);
    for x in [0.0, 1.0] {
        if plus(x) <= 0.0 || minus(x) <= 0.0 {
            return Err(Error::Analysis(format!("density nonpositive at x = {x} for a = {a}, b = {b}")));
        }
    }
    // p₊ − p₋ = a (x − 1/2), kept exact to avoid cancellation.
    let integrand = |x: f64| {
        let diff = a * (x - 0.5);
        match direction {
            KlDirection::Forward => plus(x) * (diff / minus(x)).ln_1p(),
            KlDirection::Reverse => minus(x) * (-diff / plus(x)).ln_1p(),
        }
    };
    Ok(simpson(integrand, 0.0, 1.0, gridpoints))
}

pub(crate) fn simpson<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, points: usize) -> f64 {
    let intervals = points - 1;
    let h = (hi - lo) / intervals as f64;
    let mut acc = f(lo) + f(hi);
    for i in 1..intervals {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(lo + i as f64 * h);
    }
    acc * h / 3.0
}

/// `(1/2)·exp(−kl)`: lower bound on the summed error probabilities of any test.
pub fn bh_lower_bound(kl: f64) -> f64 {
    0.5 * (-kl).exp()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub family: &'static str,
    pub n_arms: usize,
    pub opt_static: f64,
    pub opt_dynamic: f64,
    /// Half-width of the 95% interval on `opt_dynamic`; 0 for closed forms.
    pub opt_dynamic_ci: f64,
    /// Only defined for independent arms.
    pub variance_gap_bound: Option<f64>,
    pub gaps: Vec<f64>,
    pub variances: Vec<f64>,
    /// Monte Carlo cross-check `(estimate, std_err)`, when requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub opt_dynamic_mc: Option<(f64, f64)>,
}

impl AnalysisReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }
}

pub fn analyze(instance: &Instance) -> AnalysisReport {
    let gaps = instance.gaps();
    let variances = instance.variances().to_vec();
    let gap_bound = instance.is_iid().then(|| variance_gap_bound(&gaps, &variances, instance.n_arms()));
    AnalysisReport {
        family: match instance.family() {
            Family::Iid(_) => "iid",
            Family::Correlated(_) => "correlated",
        },
        n_arms: instance.n_arms(),
        opt_static: instance.opt_static(),
        opt_dynamic: instance.opt_dynamic(),
        opt_dynamic_ci: 0.0,
        variance_gap_bound: gap_bound,
        gaps,
        variances,
        opt_dynamic_mc: None,
    }
}

/// [`analyze`] plus a Monte Carlo estimate of `OPT_d`.
pub fn analyze_with_mc<R: Rng + ?Sized>(instance: &Instance, samples: usize, rng: &mut R) -> Result<AnalysisReport> {
    let mut report = analyze(instance);
    report.opt_dynamic_mc = Some(opt_dynamic_mc(instance, samples, rng)?);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envs::{build_lb_instances, correlated_params, CorrelatedSpec, InstanceSpec, Variant};
    use crate::rng::{stream, Stream};
    use proptest::prelude::*;

    #[test]
    fn opt_static_examples() {
        assert_eq!(opt_static(&Instance::bernoulli(&[0.3, 0.7]).unwrap()).unwrap(), 0.7);
        assert_eq!(opt_static(&Instance::bernoulli(&[0.42]).unwrap()).unwrap(), 0.42);
        let spec = CorrelatedSpec::new(Variant::Nu1, 0.1, 0.02).unwrap();
        let got = opt_static(&Instance::correlated(spec)).unwrap();
        assert!((got - (0.5 + 0.22 / 12.0)).abs() < 1e-15);
    }

    #[test]
    fn opt_dynamic_bernoulli_examples() {
        assert_eq!(opt_dynamic_bernoulli(&[0.5, 0.5]), 0.75);
        assert_eq!(opt_dynamic_bernoulli(&[0.37]), 0.37);
        assert_eq!(opt_dynamic_bernoulli(&[1.0, 0.2, 0.6]), 1.0);
    }

    /// Brute-force enumeration of every outcome of small discrete instances.
    fn enumerate_max(arms: &[(Vec<f64>, Vec<f64>)]) -> f64 {
        fn go(arms: &[(Vec<f64>, Vec<f64>)], i: usize, prob: f64, best: f64) -> f64 {
            if i == arms.len() {
                return prob * best;
            }
            let (vals, probs) = &arms[i];
            vals.iter().zip(probs).map(|(v, q)| go(arms, i + 1, prob * q, best.max(*v))).sum()
        }
        go(arms, 0, 1.0, f64::NEG_INFINITY)
    }

    #[test]
    fn expected_max_matches_enumeration() {
        let table = vec![
            (vec![0.0, 0.3, 0.8], vec![0.2, 0.5, 0.3]),
            (vec![0.1, 0.3], vec![0.6, 0.4]),
            (vec![0.0, 1.0], vec![0.35, 0.65]),
            (vec![0.5, 0.95, 0.25], vec![0.1, 0.1, 0.8]),
        ];
        let arms: Vec<ArmDistribution> =
            table.iter().map(|(v, p)| ArmDistribution::discrete(v.clone(), p.clone()).unwrap()).collect();
        assert!((expected_max_independent(&arms) - enumerate_max(&table)).abs() < 1e-12);
    }

    #[test]
    fn expected_max_with_uniform_arms() {
        // E[max of two uniforms] = 2/3; with a sure 0.5 atom it is 0.5 + ∫_{.5}^1 (1 − x²) dx.
        let u = ArmDistribution::uniform01();
        assert!((expected_max_independent(&[u.clone(), u.clone()]) - 2.0 / 3.0).abs() < 1e-14);
        let half = ArmDistribution::discrete(vec![0.5], vec![1.0]).unwrap();
        let want = 0.5 + (0.5 - (1.0 - 0.125) / 3.0);
        assert!((expected_max_independent(&[u.clone(), u, half]) - want).abs() < 1e-14);
    }

    proptest! {
        #[test]
        fn general_formula_agrees_with_bernoulli_closed_form(ps in proptest::collection::vec(0.0f64..=1.0, 1..8)) {
            let arms: Vec<ArmDistribution> = ps.iter().map(|&p| ArmDistribution::bernoulli(p).unwrap()).collect();
            prop_assert!((expected_max_independent(&arms) - opt_dynamic_bernoulli(&ps)).abs() < 1e-12);
        }

        #[test]
        fn gap_bound_holds_exactly_for_bernoulli(ps in proptest::collection::vec(0.0f64..=1.0, 2..9)) {
            let inst = Instance::bernoulli(&ps).unwrap();
            let bound = variance_gap_bound(&inst.gaps(), inst.variances(), ps.len());
            prop_assert!(bound >= 0.0);
            prop_assert!(opt_dynamic_bernoulli(&ps) - inst.opt_static() >= bound);
        }

        #[test]
        fn kl_bernoulli_is_nonnegative(p in 0.0f64..=1.0, q in 0.001f64..0.999) {
            let kl = kl_bernoulli(p, q).unwrap();
            prop_assert!(kl >= 0.0);
            prop_assert_eq!(kl_bernoulli(q, q).unwrap(), 0.0);
        }
    }

    #[test]
    fn opt_dynamic_mc_agrees_with_closed_forms() {
        let mut rng = stream(31, Stream::Analysis);
        let inst = Instance::bernoulli(&[0.5, 0.5]).unwrap();
        let (est, se) = opt_dynamic_mc(&inst, 1_000_000, &mut rng).unwrap();
        assert!((est - 0.75).abs() < 4.0 * se);

        let (nu1, _) = correlated_params(401, 1).unwrap();
        let inst = Instance::correlated(nu1);
        let (est, se) = opt_dynamic_mc(&inst, 400_000, &mut rng).unwrap();
        assert!((est - (0.5 + nu1.b() / 6.0)).abs() < 4.0 * se);

        let inst = Instance::bernoulli(&[1.0, 0.0]).unwrap();
        assert_eq!(opt_dynamic_mc(&inst, 1000, &mut rng).unwrap(), (1.0, 0.0));
        assert!(opt_dynamic_mc(&inst, 1, &mut rng).is_err());
    }

    #[test]
    fn variance_gap_bound_examples() {
        assert_eq!(variance_gap_bound(&[0.0, 0.0], &[0.25, 0.2], 2), 0.0);
        assert!((variance_gap_bound(&[0.0, 0.01], &[0.25, 0.25], 2) - 0.06).abs() < 1e-15);
        assert_eq!(variance_gap_bound(&[0.0, 0.3, 0.5], &[0.1, 0.2, 0.25], 3), 0.0);
    }

    #[test]
    fn kl_bernoulli_examples() {
        assert_eq!(kl_bernoulli(0.3, 0.3).unwrap(), 0.0);
        let want = 0.5 * 2f64.ln() + 0.5 * (2.0f64 / 3.0).ln();
        assert!((kl_bernoulli(0.5, 0.25).unwrap() - want).abs() < 1e-15);
        assert!((want - 0.14384).abs() < 1e-5);
        assert_eq!(kl_bernoulli(0.5, 0.0).unwrap(), f64::INFINITY);
        assert_eq!(kl_bernoulli(0.5, 1.0).unwrap(), f64::INFINITY);
        assert_eq!(kl_bernoulli(0.0, 0.0).unwrap(), 0.0);
        assert_eq!(kl_bernoulli(1.0, 1.0).unwrap(), 0.0);
        assert!(kl_bernoulli(1.5, 0.5).is_err());
        assert_eq!(bh_lower_bound(kl_bernoulli(0.5, 0.0).unwrap()), 0.0);
    }

    #[test]
    fn lb_parameters_respect_the_kl_bound() {
        let built = build_lb_instances(2, 101_000, 1000, None).unwrap();
        let s = built.spec;
        let kl = kl_bernoulli(s.p, s.epsilon).unwrap();
        assert!(kl <= 8.0 * s.delta * s.delta / s.epsilon);
        // The same divergence written on the reflected means.
        let kl_arm = kl_bernoulli(1.0 - s.p, 1.0 - s.p + 2.0 * s.delta).unwrap();
        assert!((kl - kl_arm).abs() < 1e-9 * kl);
    }

    /// Independent oracle: adaptive Simpson-free trapezoid on a very fine grid.
    fn kl_trapezoid(a: f64, b: f64, forward: bool) -> f64 {
        let n = 200_000;
        let f = |x: f64| {
            let p = 1.0 + 0.5 * (a + b) * (2.0 * x - 1.0);
            let q = 1.0 + 0.5 * b * (2.0 * x - 1.0);
            if forward {
                p * (p / q).ln()
            } else {
                q * (q / p).ln()
            }
        };
        let h = 1.0 / n as f64;
        (0..=n).map(|i| f(i as f64 * h) * if i == 0 || i == n { 0.5 } else { 1.0 }).sum::<f64>() * h
    }

    #[test]
    fn density_kl_examples() {
        for dir in [KlDirection::Forward, KlDirection::Reverse] {
            assert_eq!(kl_density_grid(0.0, 0.1, dir, DEFAULT_GRIDPOINTS).unwrap(), 0.0);
        }
        let fwd = kl_density_grid(0.1, 0.11, KlDirection::Forward, DEFAULT_GRIDPOINTS).unwrap();
        let rev = kl_density_grid(0.1, 0.11, KlDirection::Reverse, DEFAULT_GRIDPOINTS).unwrap();
        assert!(fwd <= 0.01 / 9.0 + 1e-9);
        assert!(rev <= 0.01 / 9.0 + 1e-9);
        assert!((fwd - kl_trapezoid(0.1, 0.11, true)).abs() < 1e-10);
        assert!((rev - kl_trapezoid(0.1, 0.11, false)).abs() < 1e-10);
        for i in 1..=10 {
            let a = 0.01 * i as f64;
            let b = a + a / 48.0;
            let f = kl_density_grid(a, b, KlDirection::Forward, DEFAULT_GRIDPOINTS).unwrap();
            let r = kl_density_grid(a, b, KlDirection::Reverse, DEFAULT_GRIDPOINTS).unwrap();
            assert!((f - r).abs() <= a.powi(3), "a = {a}");
        }
    }

    #[test]
    fn density_kl_converges_and_rejects_bad_input() {
        let k1 = kl_density_grid(0.12, 0.125, KlDirection::Forward, DEFAULT_GRIDPOINTS).unwrap();
        let k2 = kl_density_grid(0.12, 0.125, KlDirection::Forward, 2 * DEFAULT_GRIDPOINTS - 1).unwrap();
        assert!((k1 - k2).abs() < 1e-10);
        assert!(kl_density_grid(0.1, 0.1, KlDirection::Forward, 4096).is_err());
        assert!(kl_density_grid(1.5, 1.6, KlDirection::Forward, 101).is_err());
    }

    #[test]
    fn bh_examples() {
        assert_eq!(bh_lower_bound(0.0), 0.5);
        assert!((bh_lower_bound(1.0 / 9.0) - 0.447_419_658_4).abs() < 1e-9);
        assert!(bh_lower_bound(0.3) < bh_lower_bound(0.2));
    }

    #[test]
    fn reports() {
        let r = analyze(&Instance::bernoulli(&[0.5, 0.5]).unwrap());
        assert_eq!((r.opt_static, r.opt_dynamic), (0.5, 0.75));
        assert_eq!(r.opt_dynamic - r.opt_static, 0.25);
        assert_eq!(r.variance_gap_bound, Some(0.0));

        let r = analyze(&Instance::bernoulli(&[0.8]).unwrap());
        assert_eq!(r.variance_gap_bound, Some(0.0));

        let spec = InstanceSpec::Correlated { variant: Variant::Nu1, a: 0.1, eta: 0.01, tie_break: None };
        let r = analyze(&spec.build().unwrap());
        assert!((r.opt_static - (0.5 + 0.21 / 12.0)).abs() < 1e-15);
        assert!((r.opt_dynamic - (0.5 + 0.11 / 6.0)).abs() < 1e-15);
        assert_eq!(r.variance_gap_bound, None);
        assert!(r.to_json().contains("\"variance_gap_bound\": null"));
    }

    #[test]
    fn dominance_and_gap_bound_on_discrete_instances() {
        let arms = vec![
            ArmDistribution::discrete(vec![0.0, 0.6, 1.0], vec![0.3, 0.4, 0.3]).unwrap(),
            ArmDistribution::uniform01(),
            ArmDistribution::bernoulli(0.45).unwrap(),
        ];
        let inst = Instance::iid(arms).unwrap();
        let r = analyze(&inst);
        assert!(r.opt_dynamic >= r.opt_static);
        assert!(r.opt_dynamic - r.opt_static >= r.variance_gap_bound.unwrap());
        let mut rng = stream(3, Stream::Analysis);
        let (est, se) = opt_dynamic_mc(&inst, 200_000, &mut rng).unwrap();
        assert!((est - r.opt_dynamic).abs() < 4.0 * se);
    }
}
