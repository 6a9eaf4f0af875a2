//! Seeded generators. Every randomized routine takes either a seed or a
//! caller-owned generator; nothing draws from global state.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type TrialRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> TrialRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent generator for trial `stream` of a run keyed by `seed`.
pub fn trial_rng(seed: u64, stream: u64) -> TrialRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
