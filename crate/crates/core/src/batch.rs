//! Seeded replicate batches.
//!
//! Replicate `r` of a batch always runs with seed `root_seed + r`, so results
//! do not depend on how many workers ran them. With the `parallel` feature,
//! batches with `parallelism > 1` run on a dedicated rayon pool of that size;
//! otherwise they run in order on the calling thread.

use crate::engine::{simulate_with, RunSummary};
use crate::envs::Instance;
use crate::error::Result;
use crate::policies::PolicySpec;

/// `root_seed + r` for `r in 0..count` (wrapping).
pub fn replicate_seeds(root_seed: u64, count: usize) -> Vec<u64> {
    (0..count as u64).map(|r| root_seed.wrapping_add(r)).collect()
}

pub fn run_replicates(
    instance: &Instance,
    policy: &PolicySpec,
    horizon: u64,
    budget: u64,
    seeds: &[u64],
    parallelism: usize,
) -> Result<Vec<RunSummary>> {
    #[cfg(feature = "parallel")]
    if parallelism > 1 && seeds.len() > 1 {
        return run_replicates_parallel(instance, policy, horizon, budget, seeds, parallelism);
    }
    let _ = parallelism;
    run_replicates_sequential(instance, policy, horizon, budget, seeds)
}

pub fn run_replicates_sequential(
    instance: &Instance,
    policy: &PolicySpec,
    horizon: u64,
    budget: u64,
    seeds: &[u64],
) -> Result<Vec<RunSummary>> {
    seeds.iter().map(|&seed| simulate_with(instance, policy, horizon, budget, seed, |_| {})).collect()
}

#[cfg(feature = "parallel")]
pub fn run_replicates_parallel(
    instance: &Instance,
    policy: &PolicySpec,
    horizon: u64,
    budget: u64,
    seeds: &[u64],
    threads: usize,
) -> Result<Vec<RunSummary>> {
    use rayon::prelude::*;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| crate::Error::Config(format!("cannot start worker pool: {e}")))?;
    pool.install(|| {
        seeds.par_iter().map(|&seed| simulate_with(instance, policy, horizon, budget, seed, |_| {})).collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::policies::PolicyKind;

    #[test]
    fn seeds_bind_to_replicate_index() {
        assert_eq!(replicate_seeds(40, 3), vec![40, 41, 42]);
        assert_eq!(replicate_seeds(u64::MAX, 2), vec![u64::MAX, 0]);
    }

    #[test]
    fn results_do_not_depend_on_parallelism() {
        let inst = Instance::bernoulli(&[0.6, 0.5, 0.55]).unwrap();
        let spec = PolicySpec::new(PolicyKind::SpreadQueryUcbv);
        let seeds = replicate_seeds(7, 12);
        let one = run_replicates(&inst, &spec, 800, 40, &seeds, 1).unwrap();
        let four = run_replicates(&inst, &spec, 800, 40, &seeds, 4).unwrap();
        assert_eq!(one, four);
        assert_eq!(one.iter().map(|r| r.seed).collect::<Vec<_>>(), seeds);
    }

    #[test]
    fn errors_propagate() {
        let inst = Instance::bernoulli(&[0.6, 0.5]).unwrap();
        let spec = PolicySpec::new(PolicyKind::Ucbv);
        assert!(run_replicates(&inst, &spec, 10, 11, &[1, 2], 2).is_err());
    }
}
