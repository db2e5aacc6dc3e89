//! Deterministic RNG substreams.
//!
//! Every randomized component draws from a ChaCha stream derived from
//! `(master_seed, domain, index)`. Substreams are independent of
//! execution order, which is what makes parallel cohort generation,
//! replicate farms, and bootstrap loops reproducible regardless of
//! worker count.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Namespaces for substream derivation. Values are stable; changing one
/// silently reshuffles every seeded pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    FeatureColumn = 1,
    Outcomes = 2,
    Surrogate = 3,
    Sampler = 4,
    CvFolds = 5,
    Bootstrap = 6,
    Replicate = 7,
    Validation = 8,
    Calibration = 9,
    Corpus = 10,
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Derive a 64-bit child seed; useful when a component needs a seed to
/// pass along rather than a live generator.
pub fn derive_seed(master_seed: u64, domain: Domain, index: u64) -> u64 {
    let mut state = master_seed ^ (domain as u64).rotate_left(32);
    let a = splitmix64(&mut state);
    state ^= index;
    a ^ splitmix64(&mut state)
}

/// A generator seeded from `(master_seed, domain, index)`.
pub fn substream(master_seed: u64, domain: Domain, index: u64) -> ChaCha8Rng {
    let mut state = derive_seed(master_seed, domain, index);
    let mut seed = [0u8; 32];
    for chunk in seed.chunks_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    ChaCha8Rng::from_seed(seed)
}
