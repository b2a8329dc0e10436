//! Named numerical checks.
//!
//! Each check returns a [`Check`] with its measured value and threshold. The
//! `quick` level caps Monte Carlo work at 10⁵ samples and 50 replicates;
//! `full` runs the sizes the acceptance suite uses.

use std::fmt;

use qbl_core::analysis::{
    aggregate, decomposition_residual, kl_bernoulli, kl_density_grid, opt_dynamic_bernoulli, opt_dynamic_mc,
    variance_gap_bound, KlDirection, RegretSummary, DEFAULT_GRIDPOINTS,
};
use qbl_core::batch::{replicate_seeds, run_replicates};
use qbl_core::envs::{
    build_lb_instances, correlated_params, h_inverse, h_map, sample_correlated_round, ArmDistribution, CorrelatedSpec,
};
use qbl_core::rng::{stream, Stream};
use qbl_core::stats::{ks_critical_one_sample, ks_critical_two_sample, ks_one_sample, ks_two_sample, Moments};
use qbl_core::{simulate_run, Instance, PolicyKind, PolicySpec};
use rand::Rng;

const KS_ALPHA: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Level {
    Quick,
    Full,
}

/// Inverse of the `H_c` distortion, injectable so fault detection is testable.
pub type HInverse = fn(f64, f64) -> f64;

pub fn exact_h_inverse(c: f64, u: f64) -> f64 {
    h_inverse(c, u).expect("verification grids stay in the domain")
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub level: Level,
    pub seed: u64,
    pub threads: usize,
    pub h_inverse: HInverse,
}

impl VerifyOptions {
    pub fn new(level: Level) -> Self {
        Self { level, seed: 0, threads: 1, h_inverse: exact_h_inverse }
    }

    fn samples(&self, full: usize) -> usize {
        match self.level {
            Level::Quick => full.min(100_000),
            Level::Full => full,
        }
    }

    fn replicates(&self, full: usize) -> usize {
        match self.level {
            Level::Quick => full.min(50),
            Level::Full => full,
        }
    }

    fn rng(&self, offset: u64) -> qbl_core::rng::StreamRng {
        stream(self.seed.wrapping_add(offset), Stream::Analysis)
    }

    fn batch(&self, inst: &Instance, kind: PolicyKind, horizon: u64, k: u64, seeds: &[u64]) -> RegretSummary {
        let runs = run_replicates(inst, &PolicySpec::new(kind), horizon, k, seeds, self.threads)
            .expect("verification configurations are valid");
        aggregate(&runs).expect("replicates share one configuration")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub measured: f64,
    pub threshold: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &'static str, measured: f64, threshold: impl Into<String>, passed: bool) -> Self {
        Check { name, measured, threshold: threshold.into(), passed, detail: String::new() }
    }

    fn with_detail(mut self, detail: String) -> Self {
        self.detail = detail;
        self
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{status} {} {} {}", self.name, number(self.measured), self.threshold)
    }
}

fn number(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else if (1e-3..1e6).contains(&v.abs()) {
        format!("{v:.6}")
    } else {
        format!("{v:.4e}")
    }
}

pub type CheckFn = fn(&VerifyOptions) -> Check;

/// The headline experiments, in order.
pub const CRITERIA: [(&str, CheckFn); 11] = [
    ("h_sampler_moments", h_sampler_moments),
    ("correlated_ordering", correlated_ordering),
    ("kl_budget", kl_budget),
    ("gap_bound_exactness", gap_bound_exactness),
    ("query_decomposition", query_decomposition),
    ("negative_regret_with_queries", negative_regret_with_queries),
    ("regret_decreasing_in_k", regret_decreasing_in_k),
    ("correlated_fidelity", correlated_fidelity),
    ("query_feedback_indistinguishable", query_feedback_indistinguishable),
    ("lb_parameter_algebra", lb_parameter_algebra),
    ("ucbv_pull_audit", ucbv_pull_audit),
];

/// Structural invariants.
pub const INVARIANTS: [(&str, CheckFn); 11] = [
    ("h_roundtrip", h_roundtrip),
    ("h_monotone", h_monotone),
    ("h_density_ks", h_density_ks),
    ("opt_dominance", opt_dominance),
    ("kl_grid_convergence", kl_grid_convergence),
    ("run_determinism", run_determinism),
    ("budget_cap_and_query_optimality", budget_cap_and_query_optimality),
    ("parallel_determinism", parallel_determinism),
    ("lb_instance_means", lb_instance_means),
    ("query_feedback_variant_free", query_feedback_variant_free),
    ("ci_contains_mean", ci_contains_mean),
];

/// Runs every check, handing each result to `on_check` as soon as it is known.
pub fn run_suite(opts: &VerifyOptions, mut on_check: impl FnMut(&Check)) -> Vec<Check> {
    INVARIANTS
        .iter()
        .chain(CRITERIA.iter())
        .map(|(_, f)| {
            let check = f(opts);
            on_check(&check);
            check
        })
        .collect()
}

fn criterion_spec() -> (CorrelatedSpec, CorrelatedSpec) {
    correlated_params(10_001, 1).expect("valid parameters")
}

/// Mean of `h⁻¹(c, U)` against `1/2 + c/6`; measured is the worst |z|.
pub fn h_sampler_moments(opts: &VerifyOptions) -> Check {
    let n = opts.samples(1_000_000);
    let mut worst: f64 = 0.0;
    let mut detail = Vec::new();
    for (i, c) in [0.05, 0.1, 0.25, 0.5].into_iter().enumerate() {
        let mut rng = opts.rng(i as u64);
        let mut m = Moments::default();
        for _ in 0..n {
            m.push((opts.h_inverse)(c, rng.gen()));
        }
        let z = (m.mean() - (0.5 + c / 6.0)).abs() / m.std_err();
        worst = worst.max(z);
        detail.push(format!("c={c}: z={z:.3}"));
    }
    Check::new("h_sampler_moments", worst, "<=4", worst <= 4.0).with_detail(detail.join(", "))
}

/// Count of samples violating `Y ≤ Z⁻ ≤ Z⁺`.
pub fn correlated_ordering(opts: &VerifyOptions) -> Check {
    let (nu1, _) = criterion_spec();
    let mut rng = opts.rng(10);
    let n = opts.samples(1_000_000);
    let violations = (0..n)
        .map(|_| sample_correlated_round(&nu1, &mut rng))
        .filter(|r| !(r.y <= r.z_minus && r.z_minus <= r.z_plus))
        .count();
    Check::new("correlated_ordering", violations as f64, "==0", violations == 0).with_detail(format!("{n} samples"))
}

/// Largest ratio of a density KL to its bound (`1/9` after scaling by `m`, `a²/9` pointwise).
pub fn kl_budget(_opts: &VerifyOptions) -> Check {
    let (nu1, _) = criterion_spec();
    let m = 10_000.0;
    let mut worst: f64 = 0.0;
    let mut failed = false;
    for dir in [KlDirection::Forward, KlDirection::Reverse] {
        let kl = kl_density_grid(nu1.a(), nu1.b(), dir, DEFAULT_GRIDPOINTS).expect("valid densities");
        let bound = 1.0 / 9.0 + 1e-9;
        failed |= m * kl > bound;
        worst = worst.max(m * kl / bound);
    }
    for i in 1..=12 {
        let a = i as f64 / 100.0;
        let b = a + a / 48.0;
        for dir in [KlDirection::Forward, KlDirection::Reverse] {
            let kl = kl_density_grid(a, b, dir, DEFAULT_GRIDPOINTS).expect("valid densities");
            let bound = a * a / 9.0 + 1e-9;
            failed |= kl > bound;
            worst = worst.max(kl / bound);
        }
    }
    Check::new("kl_budget", worst, "<=1", !failed)
}

/// Random Bernoulli instances where `OPT_d − OPT_s` falls below the variance bound.
pub fn gap_bound_exactness(opts: &VerifyOptions) -> Check {
    let mut rng = opts.rng(20);
    let mut violations = 0;
    let mut min_slack = f64::INFINITY;
    for _ in 0..1000 {
        let n = rng.gen_range(2..=8);
        let means: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
        let best = means.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let gaps: Vec<f64> = means.iter().map(|m| best - m).collect();
        let vars: Vec<f64> = means.iter().map(|m| m * (1.0 - m)).collect();
        let slack = opt_dynamic_bernoulli(&means) - best - variance_gap_bound(&gaps, &vars, n);
        violations += usize::from(slack < 0.0);
        min_slack = min_slack.min(slack);
    }
    Check::new("gap_bound_exactness", violations as f64, "==0", violations == 0)
        .with_detail(format!("min slack {min_slack:.3e} over 1000 instances"))
}

/// `|R_{T,k}(query-first) − (R_{T−k,0}(UCB-V) − k(OPT_d − OPT_s))|` against the summed CI half-widths.
pub fn query_decomposition(opts: &VerifyOptions) -> Check {
    let inst = Instance::bernoulli(&[0.5, 0.45]).expect("valid means");
    let reps = opts.replicates(200);
    let lhs = replicate_seeds(opts.seed.wrapping_add(1_000), reps);
    let base = replicate_seeds(opts.seed.wrapping_add(1_000_000), reps);
    let r = decomposition_residual(&inst, 20_000, 5_000, qbl_core::policies::DEFAULT_ZETA, &lhs, &base, opts.threads)
        .expect("valid configuration");
    Check::new("query_decomposition", r.residual.abs(), format!("<={}", number(r.tolerance)), r.within_tolerance())
        .with_detail(format!(
            "lhs {:.3} ± {:.3}, baseline {:.3} ± {:.3}, rhs {:.3}",
            r.lhs.mean_pseudo_regret,
            r.lhs.half_width(),
            r.baseline.mean_pseudo_regret,
            r.baseline.half_width(),
            r.rhs
        ))
}

fn near_tie_instance(horizon: u64) -> Instance {
    Instance::bernoulli(&[0.5, 0.5 - 1.0 / (horizon as f64).sqrt()]).expect("valid means")
}

/// Upper CI end of query-first UCB-V with `k = T/10`; bare UCB-V must also be positive.
pub fn negative_regret_with_queries(opts: &VerifyOptions) -> Check {
    let horizon = 100_000;
    let inst = near_tie_instance(horizon);
    let seeds = replicate_seeds(opts.seed.wrapping_add(2_000), opts.replicates(100));
    let with_queries = opts.batch(&inst, PolicyKind::QueryThenUcbv, horizon, horizon / 10, &seeds);
    let bare = opts.batch(&inst, PolicyKind::Ucbv, horizon, 0, &seeds);
    let passed = with_queries.ci95.1 < 0.0 && bare.mean_pseudo_regret > 0.0;
    Check::new("negative_regret_with_queries", with_queries.ci95.1, "<0", passed).with_detail(format!(
        "query_then_ucbv {:.2} [{:.2}, {:.2}], ucbv {:.2} ± {:.2}",
        with_queries.mean_pseudo_regret,
        with_queries.ci95.0,
        with_queries.ci95.1,
        bare.mean_pseudo_regret,
        bare.half_width()
    ))
}

/// Smallest consecutive drop along the `k` grid, in combined standard errors.
pub fn regret_decreasing_in_k(opts: &VerifyOptions) -> Check {
    let horizon = 100_000u64;
    let t = horizon as f64;
    let grid = [0, t.sqrt() as u64, t.powf(2.0 / 3.0) as u64, horizon / 10, horizon / 2];
    let inst = near_tie_instance(horizon);
    let seeds = replicate_seeds(opts.seed.wrapping_add(3_000), opts.replicates(100));
    let rows: Vec<RegretSummary> =
        grid.iter().map(|&k| opts.batch(&inst, PolicyKind::QueryThenUcbv, horizon, k, &seeds)).collect();
    let worst = rows
        .windows(2)
        .map(|w| (w[0].mean_pseudo_regret - w[1].mean_pseudo_regret) / w[0].std_err.hypot(w[1].std_err))
        .fold(f64::INFINITY, f64::min);
    let detail = grid
        .iter()
        .zip(&rows)
        .map(|(k, r)| format!("k={k}: {:.2} (se {:.2})", r.mean_pseudo_regret, r.std_err))
        .collect::<Vec<_>>()
        .join(", ");
    Check::new("regret_decreasing_in_k", worst, ">1", worst > 1.0).with_detail(detail)
}

/// Worst |z| among both arm means and the queried-round regret `−η/12`.
pub fn correlated_fidelity(opts: &VerifyOptions) -> Check {
    let (nu1, _) = criterion_spec();
    let mut rng = opts.rng(30);
    let n = opts.samples(1_000_000);
    let opt_static = nu1.opt_static();
    let (mut arm0, mut arm1, mut queried) = (Moments::default(), Moments::default(), Moments::default());
    for _ in 0..n {
        let r = sample_correlated_round(&nu1, &mut rng);
        arm0.push(r.rewards[0]);
        arm1.push(r.rewards[1]);
        queried.push(opt_static - r.rewards[r.best]);
    }
    let b = nu1.b();
    let targets = [(arm0, 0.5 + (nu1.a() + b) / 12.0), (arm1, 0.5 + b / 12.0), (queried, -nu1.eta() / 12.0)];
    let zs: Vec<f64> = targets.iter().map(|(m, want)| (m.mean() - want).abs() / m.std_err()).collect();
    let worst = zs.iter().copied().fold(0.0, f64::max);
    Check::new("correlated_fidelity", worst, "<=4", worst <= 4.0)
        .with_detail(format!("z(arm 0)={:.3}, z(arm 1)={:.3}, z(query)={:.3}", zs[0], zs[1], zs[2]))
}

/// Queried-round feedback under both variants: max of `D/D_crit` and `z_W/3`.
pub fn query_feedback_indistinguishable(opts: &VerifyOptions) -> Check {
    let (nu1, nu2) = criterion_spec();
    let n = opts.samples(100_000);
    let draw = |spec: &CorrelatedSpec, offset| {
        let mut rng = opts.rng(offset);
        let mut ones = 0usize;
        let z: Vec<f64> = (0..n)
            .map(|_| {
                let r = sample_correlated_round(spec, &mut rng);
                ones += usize::from(r.w == 1);
                r.rewards[r.best]
            })
            .collect();
        (ones as f64 / n as f64, z)
    };
    let (p1, mut z1) = draw(&nu1, 40);
    let (p2, mut z2) = draw(&nu2, 41);
    let d = ks_two_sample(&mut z1, &mut z2);
    let d_crit = ks_critical_two_sample(KS_ALPHA, n, n);
    let pooled = 0.5 * (p1 + p2);
    let z_w = (p1 - p2).abs() / (pooled * (1.0 - pooled) * 2.0 / n as f64).sqrt();
    let measured = (d / d_crit).max(z_w / 3.0);
    Check::new("query_feedback_indistinguishable", measured, "<1", d < d_crit && z_w < 3.0)
        .with_detail(format!("KS D={d:.5} (crit {d_crit:.5}), W z={z_w:.3}"))
}

/// Parameter-regime violations over an `(n, T, k)` grid with `√(nT) ≤ k ≤ T/100`.
pub fn lb_parameter_algebra(_opts: &VerifyOptions) -> Check {
    let mut violations = 0;
    let mut cases = 0;
    let mut worst_ratio: f64 = 0.0;
    for n in [2usize, 3, 4, 8, 16, 64] {
        for horizon in [10_000u64, 100_000, 1_000_000, 10_000_000, 100_000_000] {
            let lo = ((n as f64 * horizon as f64).sqrt().ceil()) as u64;
            let hi = horizon / 100;
            if lo > hi {
                continue;
            }
            for step in 0..8 {
                let k = (lo as f64 * (hi as f64 / lo as f64).powf(step as f64 / 7.0)).round() as u64;
                let k = k.clamp(lo, hi);
                cases += 1;
                let Ok(built) = build_lb_instances(n, horizon, k, None) else {
                    violations += 1;
                    continue;
                };
                let s = built.spec;
                let kl = kl_bernoulli(s.p, s.epsilon).expect("probabilities in range");
                let bound = 8.0 * s.delta * s.delta / s.epsilon;
                worst_ratio = worst_ratio.max(kl / bound);
                if s.p > 0.25 || 1.0 - s.p + 2.0 * s.delta > 1.0 || kl > bound {
                    violations += 1;
                }
            }
        }
    }
    Check::new("lb_parameter_algebra", violations as f64, "==0", violations == 0)
        .with_detail(format!("{cases} cases, max KL / (8Δ²/ε) = {worst_ratio:.4}"))
}

/// `Δ · E[N_subopt(T)]` of UCB-V against `20 (σ²/Δ + 1) ln T`.
pub fn ucbv_pull_audit(opts: &VerifyOptions) -> Check {
    let horizon = 10_000u64;
    let inst = Instance::bernoulli(&[0.6, 0.5]).expect("valid means");
    let seeds = replicate_seeds(opts.seed.wrapping_add(4_000), opts.replicates(200));
    let runs = run_replicates(&inst, &PolicySpec::new(PolicyKind::Ucbv), horizon, 0, &seeds, opts.threads)
        .expect("valid configuration");
    let gap = inst.gaps()[1];
    let var = inst.variances()[1];
    let mean_pulls = runs.iter().map(|r| r.pulls[1] as f64).sum::<f64>() / runs.len() as f64;
    let measured = gap * mean_pulls;
    let bound = 20.0 * (var / gap + 1.0) * (horizon as f64).ln();
    Check::new("ucbv_pull_audit", measured, format!("<={}", number(bound)), measured <= bound)
        .with_detail(format!("empirical constant {:.3}", measured / ((var / gap + 1.0) * (horizon as f64).ln())))
}

/// Worst `|H_c(H_c⁻¹(u)) − u|` over a 1000-point `(c, u)` grid.
pub fn h_roundtrip(opts: &VerifyOptions) -> Check {
    let mut worst: f64 = 0.0;
    for i in 0..40 {
        let c = 0.5 * i as f64 / 39.0;
        for j in 0..25 {
            let u = j as f64 / 24.0;
            let back = h_map(c, (opts.h_inverse)(c, u).clamp(0.0, 1.0)).expect("in domain");
            worst = worst.max((back - u).abs());
        }
    }
    Check::new("h_roundtrip", worst, "<=1e-10", worst <= 1e-10)
}

pub fn h_monotone(_opts: &VerifyOptions) -> Check {
    let mut violations = 0;
    for i in 0..=10 {
        let c = 0.05 * i as f64;
        let ys: Vec<f64> = (0..=1000).map(|j| h_map(c, j as f64 / 1000.0).expect("in domain")).collect();
        violations += ys.windows(2).filter(|w| w[0] >= w[1]).count();
    }
    Check::new("h_monotone", violations as f64, "==0", violations == 0)
}

/// KS statistic of `H_c⁻¹(U)` against the CDF `H_c`, relative to the 1% critical value.
pub fn h_density_ks(opts: &VerifyOptions) -> Check {
    let n = opts.samples(1_000_000);
    let mut rng = opts.rng(50);
    let mut worst: f64 = 0.0;
    for c in [0.1, 0.25, 0.5] {
        let mut xs: Vec<f64> = (0..n).map(|_| (opts.h_inverse)(c, rng.gen())).collect();
        let d = ks_one_sample(&mut xs, |x| h_map(c, x.clamp(0.0, 1.0)).expect("in domain"));
        worst = worst.max(d / ks_critical_one_sample(KS_ALPHA, n));
    }
    Check::new("h_density_ks", worst, "<1", worst < 1.0)
}

/// Closed-form `OPT_d ≥ OPT_s`, and Monte Carlo `OPT_d` within 4 standard errors of it.
pub fn opt_dominance(opts: &VerifyOptions) -> Check {
    let (nu1, nu2) = criterion_spec();
    let instances = [
        Instance::bernoulli(&[0.5, 0.5]).expect("valid"),
        Instance::bernoulli(&[0.3, 0.7, 0.5]).expect("valid"),
        Instance::iid(vec![
            ArmDistribution::uniform01(),
            ArmDistribution::discrete(vec![0.2, 0.6, 0.9], vec![0.3, 0.3, 0.4]).expect("valid"),
            ArmDistribution::bernoulli(0.4).expect("valid"),
        ])
        .expect("valid"),
        Instance::correlated(nu1),
        Instance::correlated(nu2),
    ];
    let n = opts.samples(1_000_000);
    let mut worst: f64 = 0.0;
    let mut passed = true;
    for (i, inst) in instances.iter().enumerate() {
        passed &= inst.opt_dynamic() >= inst.opt_static();
        let (est, se) = opt_dynamic_mc(inst, n, &mut opts.rng(60 + i as u64)).expect("enough samples");
        let z = (est - inst.opt_dynamic()).abs() / se;
        worst = worst.max(z);
        passed &= z <= 4.0;
    }
    Check::new("opt_dominance", worst, "<=4", passed)
}

pub fn kl_grid_convergence(_opts: &VerifyOptions) -> Check {
    let mut worst: f64 = 0.0;
    for (a, b) in [(0.1, 0.11), (0.01, 0.0102), (0.2, 0.24)] {
        for dir in [KlDirection::Forward, KlDirection::Reverse] {
            let coarse = kl_density_grid(a, b, dir, DEFAULT_GRIDPOINTS).expect("valid");
            let fine = kl_density_grid(a, b, dir, 2 * DEFAULT_GRIDPOINTS - 1).expect("valid");
            worst = worst.max((coarse - fine).abs());
        }
    }
    Check::new("kl_grid_convergence", worst, "<1e-10", worst < 1e-10)
}

const ALL_KINDS: [PolicyKind; 5] = [
    PolicyKind::Ucb1,
    PolicyKind::Ucbv,
    PolicyKind::QueryThenUcbv,
    PolicyKind::SpreadQueryUcbv,
    PolicyKind::Exp3WithQueries,
];

pub fn run_determinism(opts: &VerifyOptions) -> Check {
    let inst = Instance::bernoulli(&[0.4, 0.55, 0.5]).expect("valid");
    let mismatches = ALL_KINDS
        .iter()
        .filter(|&&kind| {
            let spec = PolicySpec::new(kind);
            let a = simulate_run(&inst, &spec, 5_000, 300, opts.seed).expect("valid");
            let b = simulate_run(&inst, &spec, 5_000, 300, opts.seed).expect("valid");
            a != b
        })
        .count();
    Check::new("run_determinism", mismatches as f64, "==0", mismatches == 0)
}

/// Replays each run's environment stream to recover the full reward vectors,
/// then counts budget overruns and queried rounds that missed the round maximum.
pub fn budget_cap_and_query_optimality(opts: &VerifyOptions) -> Check {
    let inst = Instance::bernoulli(&[0.3, 0.5, 0.45, 0.5]).expect("valid");
    let (horizon, k) = (4_000, 700);
    let mut violations = 0;
    for (i, &kind) in ALL_KINDS.iter().enumerate() {
        let seed = opts.seed.wrapping_add(70 + i as u64);
        let run = simulate_run(&inst, &PolicySpec::new(kind), horizon, k, seed).expect("valid");
        let mut env = stream(seed, Stream::Environment);
        let mut rewards = vec![0.0; inst.n_arms()];
        let mut used = 0;
        for r in &run.records {
            inst.sample_round(&mut env, &mut rewards);
            used += u64::from(r.queried);
            violations += usize::from(used > k);
            if r.queried && rewards.iter().any(|&x| x > r.reward) {
                violations += 1;
            }
        }
    }
    Check::new("budget_cap_and_query_optimality", violations as f64, "==0", violations == 0)
}

pub fn parallel_determinism(opts: &VerifyOptions) -> Check {
    let inst = Instance::bernoulli(&[0.6, 0.5]).expect("valid");
    let spec = PolicySpec::new(PolicyKind::SpreadQueryUcbv);
    let seeds = replicate_seeds(opts.seed, 16);
    let one = run_replicates(&inst, &spec, 3_000, 100, &seeds, 1).expect("valid");
    let many = run_replicates(&inst, &spec, 3_000, 100, &seeds, opts.threads.max(4)).expect("valid");
    let mismatches = one.iter().zip(&many).filter(|(a, b)| a != b).count();
    Check::new("parallel_determinism", mismatches as f64, "==0", mismatches == 0)
}

pub fn lb_instance_means(_opts: &VerifyOptions) -> Check {
    let built = build_lb_instances(6, 1_000_000, 5_000, None).expect("valid regime");
    let s = built.spec;
    let mut bad = 0;
    for i in 0..s.n {
        let want1 = if i == 0 { 1.0 - s.p + s.delta } else { 1.0 - s.p };
        let want2 = if i == s.j { 1.0 - s.p + 2.0 * s.delta } else { want1 };
        bad += usize::from(built.nu1[i].mean() != want1) + usize::from(built.nu2[i].mean() != want2);
    }
    Check::new("lb_instance_means", bad as f64, "==0", bad == 0)
}

/// Same seed under both variants: the queried-round feedback `(W, Z⁺)` must coincide.
pub fn query_feedback_variant_free(opts: &VerifyOptions) -> Check {
    let (nu1, nu2) = criterion_spec();
    let (mut r1, mut r2) = (opts.rng(80), opts.rng(80));
    let mismatches = (0..opts.samples(100_000))
        .filter(|_| {
            let a = sample_correlated_round(&nu1, &mut r1);
            let b = sample_correlated_round(&nu2, &mut r2);
            (a.w, a.rewards[a.best]) != (b.w, b.rewards[b.best])
        })
        .count();
    Check::new("query_feedback_variant_free", mismatches as f64, "==0", mismatches == 0)
}

pub fn ci_contains_mean(opts: &VerifyOptions) -> Check {
    let inst = Instance::bernoulli(&[0.5, 0.45]).expect("valid");
    let seeds = replicate_seeds(opts.seed, 10);
    let bad = ALL_KINDS
        .iter()
        .map(|&kind| opts.batch(&inst, kind, 2_000, 200, &seeds))
        .filter(|s| !(s.ci95.0 <= s.mean_pseudo_regret && s.mean_pseudo_regret <= s.ci95.1))
        .count();
    Check::new("ci_contains_mean", bad as f64, "==0", bad == 0)
}
