//! Seed discipline.
//!
//! A run owns one root seed. Each consumer draws from its own ChaCha stream
//! keyed by `(root_seed, stream_id)`, so adding randomness to a policy never
//! shifts the environment's sample path.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Named stream identifiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Environment = 0,
    Policy = 1,
    Analysis = 2,
}

pub fn stream(root_seed: u64, which: Stream) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(root_seed);
    rng.set_stream(which as u64);
    rng
}
