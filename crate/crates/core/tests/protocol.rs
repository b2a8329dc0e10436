use proptest::prelude::*;
use qbl_core::envs::correlated_params;
use qbl_core::rng::StreamRng;
use qbl_core::{
    pseudo_regret, simulate_learner, simulate_run, Instance, InstanceSpec, Learner, PolicyKind, PolicySpec, Result,
};

const KINDS: [PolicyKind; 5] = [
    PolicyKind::Ucb1,
    PolicyKind::Ucbv,
    PolicyKind::QueryThenUcbv,
    PolicyKind::SpreadQueryUcbv,
    PolicyKind::Exp3WithQueries,
];

fn arb_means() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..=1.0, 2..6)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn run_invariants(means in arb_means(), kind in 0usize..5, horizon in 1u64..400, frac in 0.0f64..=1.0, seed: u64) {
        let inst = Instance::bernoulli(&means).unwrap();
        let k = (horizon as f64 * frac) as u64;
        let run = simulate_run(&inst, &PolicySpec::new(KINDS[kind]), horizon, k, seed).unwrap();

        prop_assert_eq!(run.records.len() as u64, horizon);
        let mut used = 0;
        for (i, r) in run.records.iter().enumerate() {
            prop_assert_eq!(r.round, i as u64 + 1);
            prop_assert!((0.0..=1.0).contains(&r.reward));
            used += r.queried as u64;
            prop_assert!(used <= k);
        }
        prop_assert_eq!(used, run.queries_used());

        let total: f64 = run.records.iter().map(|r| r.reward).sum();
        prop_assert!((total - run.total_reward()).abs() < 1e-9);

        let chosen: f64 = run.records.iter().map(|r| r.chosen_mean).sum();
        let identity = horizon as f64 * inst.opt_static() - chosen;
        prop_assert!((identity - run.pseudo_regret()).abs() < 1e-9);
        prop_assert!((pseudo_regret(&run, &inst) - run.pseudo_regret()).abs() < 1e-9);

        let again = simulate_run(&inst, &PolicySpec::new(KINDS[kind]), horizon, k, seed).unwrap();
        prop_assert_eq!(run, again);
    }

    #[test]
    fn query_first_spends_the_whole_budget(horizon in 1u64..300, frac in 0.0f64..=1.0, seed: u64) {
        let inst = Instance::bernoulli(&[0.3, 0.6, 0.5]).unwrap();
        let k = (horizon as f64 * frac) as u64;
        for kind in [PolicyKind::QueryThenUcbv, PolicyKind::SpreadQueryUcbv, PolicyKind::Exp3WithQueries] {
            let run = simulate_run(&inst, &PolicySpec::new(kind), horizon, k, seed).unwrap();
            prop_assert_eq!(run.queries_used(), k);
        }
    }
}

/// Always plays one arm and records everything it is fed.
struct Spy {
    seen: Vec<(usize, f64, bool)>,
    arm: usize,
}

impl Learner for Spy {
    fn label(&self) -> &str {
        "spy"
    }

    fn wants_query(&self, round: u64) -> bool {
        round.is_multiple_of(3)
    }

    fn select(&mut self, _rng: &mut StreamRng) -> usize {
        self.arm
    }

    fn observe(&mut self, arm: usize, reward: f64, was_query: bool) -> Result<()> {
        self.seen.push((arm, reward, was_query));
        Ok(())
    }
}

#[test]
fn learner_sees_exactly_the_played_rewards() {
    let inst = Instance::bernoulli(&[0.2, 0.5, 0.7]).unwrap();
    let mut spy = Spy { seen: Vec::new(), arm: 1 };
    let mut log = Vec::new();
    let summary = simulate_learner(&inst, &mut spy, 300, 40, 11, |r| log.push(*r)).unwrap();
    assert_eq!(summary.queries_used, 40);
    assert_eq!(spy.seen.len(), 300);
    for (r, &(arm, reward, q)) in log.iter().zip(&spy.seen) {
        assert_eq!((r.arm, r.reward, r.queried), (arm, reward, q));
        if !q {
            assert_eq!(arm, 1);
        }
    }
    // The first 40 multiples of three are granted, the rest are clamped.
    let queried: Vec<u64> = log.iter().filter(|r| r.queried).map(|r| r.round).collect();
    assert_eq!(queried, (1..=40).map(|i| 3 * i).collect::<Vec<_>>());
}

#[test]
fn queried_rounds_collect_the_round_maximum() {
    // Deterministic arms make the realized maximum known in advance.
    let inst = Instance::bernoulli(&[0.0, 1.0, 0.0]).unwrap();
    let run = simulate_run(&inst, &PolicySpec::new(PolicyKind::QueryThenUcbv), 50, 20, 3).unwrap();
    for r in run.records.iter().filter(|r| r.queried) {
        assert_eq!((r.arm, r.reward, r.chosen_mean), (1, 1.0, 1.0));
    }
}

#[test]
fn correlated_runs_respect_the_protocol() {
    let (nu1, _) = correlated_params(2001, 1).unwrap();
    let inst = Instance::correlated(nu1);
    for kind in KINDS {
        let run = simulate_run(&inst, &PolicySpec::new(kind), 2000, 200, 9).unwrap();
        assert!(run.queries_used() <= 200);
        for r in run.records.iter().filter(|r| r.queried) {
            assert_eq!(r.chosen_mean, inst.opt_dynamic());
        }
    }
}

#[test]
fn instances_built_from_json_simulate_identically() {
    let spec = InstanceSpec::bernoulli(&[0.25, 0.75]);
    let parsed = InstanceSpec::from_json(&spec.to_json()).unwrap();
    let a = simulate_run(&spec.build().unwrap(), &PolicySpec::new(PolicyKind::Ucbv), 500, 50, 1).unwrap();
    let b = simulate_run(&parsed.build().unwrap(), &PolicySpec::new(PolicyKind::Ucbv), 500, 50, 1).unwrap();
    assert_eq!(a, b);
}
