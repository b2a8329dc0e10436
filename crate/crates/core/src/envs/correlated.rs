//! Correlated two-arm family.
//!
//! Each round draws `U ~ Unif[0,1]` and a coin `W ~ Unif{1,2}`. With
//! `H_c(x) = x − c·x·(1−x)` the three coupled rewards are
//!
//! ```text
//! Y = U,   Z⁻ = H_a⁻¹(U),   Z⁺ = H_b⁻¹(U),   Y ≤ Z⁻ ≤ Z⁺
//! ```
//!
//! and the variants assemble them as
//!
//! ```text
//!        W = 1        W = 2
//! ν₁   (Z⁺, Y)      (Z⁻, Z⁺)
//! ν₂   (Z⁺, Z⁻)     (Y, Z⁺)
//! ```
//!
//! The arm picked by `W` always holds `Z⁺`, so what a query reveals is the same
//! under both variants.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Nu1,
    Nu2,
}

/// `H_c(x) = x − c·x·(1−x)` for `c ∈ [0, 1/2]`, `x ∈ [0, 1]`.
pub fn h_map(c: f64, x: f64) -> Result<f64> {
    check_c(c)?;
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::input(format!("x = {x} outside [0, 1]")));
    }
    Ok(h_map_unchecked(c, x))
}

/// Inverse of [`h_map`] in `x`.
pub fn h_inverse(c: f64, u: f64) -> Result<f64> {
    check_c(c)?;
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::input(format!("u = {u} outside [0, 1]")));
    }
    Ok(h_inverse_unchecked(c, u))
}

#[inline]
pub(crate) fn h_map_unchecked(c: f64, x: f64) -> f64 {
    x - c * x * (1.0 - x)
}

/// Positive root of `c·x² + (1−c)·x − u = 0`.
///
/// Written as `2u / ((1−c) + √((1−c)² + 4cu))`, which has no cancellation and
/// reduces to `u` at `c = 0`.
#[inline]
pub(crate) fn h_inverse_unchecked(c: f64, u: f64) -> f64 {
    let lin = 1.0 - c;
    (2.0 * u / (lin + (lin * lin + 4.0 * c * u).sqrt())).clamp(0.0, 1.0)
}

fn check_c(c: f64) -> Result<()> {
    if !(0.0..=0.5).contains(&c) {
        return Err(Error::input(format!("c = {c} outside [0, 1/2]")));
    }
    Ok(())
}

/// Parameters of one correlated instance. `b = a + eta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelatedSpec {
    variant: Variant,
    a: f64,
    eta: f64,
}

impl CorrelatedSpec {
    pub fn new(variant: Variant, a: f64, eta: f64) -> Result<Self> {
        if !(a > 0.0 && a < 0.25) {
            return Err(Error::config(format!("a = {a} must lie in (0, 1/4)")));
        }
        if !(eta > 0.0 && eta < 0.25 - a) {
            return Err(Error::config(format!("eta = {eta} must lie in (0, 1/4 - a)")));
        }
        Ok(Self { variant, a, eta })
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn b(&self) -> f64 {
        self.a + self.eta
    }

    pub fn with_variant(self, variant: Variant) -> Self {
        Self { variant, ..self }
    }

    /// Per-arm means: the favoured arm gets `1/2 + (a+b)/12`, the other `1/2 + b/12`.
    pub fn arm_means(&self) -> [f64; 2] {
        let hi = 0.5 + (self.a + self.b()) / 12.0;
        let lo = 0.5 + self.b() / 12.0;
        match self.variant {
            Variant::Nu1 => [hi, lo],
            Variant::Nu2 => [lo, hi],
        }
    }

    /// Uses `E[X²] = 1/3 + c/6` for `X = H_c⁻¹(U)`.
    pub fn arm_variances(&self) -> [f64; 2] {
        let [m1, m2] = self.arm_means();
        let (a, b) = (self.a, self.b());
        let second_hi = 1.0 / 3.0 + (a + b) / 12.0;
        let second_lo = 1.0 / 3.0 + b / 12.0;
        match self.variant {
            Variant::Nu1 => [second_hi - m1 * m1, second_lo - m2 * m2],
            Variant::Nu2 => [second_lo - m1 * m1, second_hi - m2 * m2],
        }
    }

    pub fn opt_static(&self) -> f64 {
        0.5 + (self.a + self.b()) / 12.0
    }

    /// `E[Z⁺] = 1/2 + b/6`.
    pub fn opt_dynamic(&self) -> f64 {
        0.5 + self.b() / 6.0
    }

    /// Gap between the two arm means, `a/12`.
    pub fn gap(&self) -> f64 {
        self.a / 12.0
    }

    fn assemble(&self, w: u8, y: f64, z_minus: f64, z_plus: f64) -> [f64; 2] {
        match (self.variant, w) {
            (Variant::Nu1, 1) => [z_plus, y],
            (Variant::Nu1, _) => [z_minus, z_plus],
            (Variant::Nu2, 1) => [z_plus, z_minus],
            (Variant::Nu2, _) => [y, z_plus],
        }
    }
}

/// What a queried round reveals: the coin and the top reward.
///
/// Takes only the latent draws and the shared `b`, never the variant.
pub fn query_feedback(b: f64, u: f64, w: u8) -> (u8, f64) {
    (w, h_inverse_unchecked(b, u))
}

/// One round of a correlated instance, with its latent variables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelatedRound {
    pub rewards: [f64; 2],
    /// Zero-indexed arm chosen by the coin.
    pub best: usize,
    /// Coin value in `{1, 2}`.
    pub w: u8,
    pub u: f64,
    pub y: f64,
    pub z_minus: f64,
    pub z_plus: f64,
}

pub fn sample_correlated_round<R: Rng + ?Sized>(spec: &CorrelatedSpec, rng: &mut R) -> CorrelatedRound {
    let u: f64 = rng.gen();
    let w: u8 = if rng.gen::<bool>() { 1 } else { 2 };
    let y = u;
    let z_minus = h_inverse_unchecked(spec.a, u);
    let (_, z_plus) = query_feedback(spec.b(), u, w);
    CorrelatedRound {
        rewards: spec.assemble(w, y, z_minus, z_plus),
        best: usize::from(w - 1),
        w,
        u,
        y,
        z_minus,
        z_plus,
    }
}

/// `a = min{1/8, 1/√m}`, `η = a / (24(k+1))` with `m = T − k`; returns `(ν₁, ν₂)`.
pub fn correlated_params(horizon: u64, k: u64) -> Result<(CorrelatedSpec, CorrelatedSpec)> {
    if k < 1 || k >= horizon {
        return Err(Error::config(format!("correlated_params needs 1 <= k <= T - 1, got k = {k}, T = {horizon}")));
    }
    let m = (horizon - k) as f64;
    let a = (1.0f64 / 8.0).min(1.0 / m.sqrt());
    let eta = a / (24.0 * (k as f64 + 1.0));
    let nu1 = CorrelatedSpec::new(Variant::Nu1, a, eta)?;
    Ok((nu1, nu1.with_variant(Variant::Nu2)))
}
