use rand::Rng;

/// `√(2 ln n / (n·m))` for `m` rounds without queries.
pub(crate) fn auto_rate(n_arms: usize, rounds: u64) -> f64 {
    let n = n_arms as f64;
    (2.0 * n.ln() / (n * rounds.max(1) as f64)).sqrt()
}

/// Exponential weights over importance-weighted reward estimates.
///
/// Weights are kept in log space as `rate · Ŝ_i`, where `Ŝ_i` sums
/// `reward / p_i` over the rounds arm `i` was drawn.
#[derive(Debug, Clone, PartialEq)]
pub struct Exp3State {
    rate: f64,
    log_weights: Vec<f64>,
    probs: Vec<f64>,
}

impl Exp3State {
    pub fn new(n_arms: usize, rate: f64) -> Self {
        Self { rate, log_weights: vec![0.0; n_arms], probs: vec![1.0 / n_arms as f64; n_arms] }
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        for (i, p) in self.probs.iter().enumerate() {
            acc += p;
            if u < acc {
                return i;
            }
        }
        // u landed in the rounding slack above the last partial sum.
        self.probs.iter().rposition(|p| *p > 0.0).unwrap_or(0)
    }

    pub fn update(&mut self, arm: usize, reward: f64) {
        let estimate = reward / self.probs[arm];
        self.log_weights[arm] += self.rate * estimate;
        self.renormalize();
    }

    fn renormalize(&mut self) {
        let top = self.log_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut total = 0.0;
        for (p, lw) in self.probs.iter_mut().zip(&self.log_weights) {
            *p = (lw - top).exp();
            total += *p;
        }
        for p in &mut self.probs {
            *p /= total;
        }
    }
}
