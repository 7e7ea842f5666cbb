//! Seeding scheme shared by every sampler.
//!
//! Each sampler owns a [`ChaCha8Rng`] keyed by a 64-bit seed. Independent
//! ingredients of one realization (arrival increments, atom locations, the
//! gamma mixing variable, stick proportions, categorical draws) read from
//! distinct ChaCha stream ids of the same key, so adding atoms never
//! perturbs the weights and vice versa.
//!
//! Replication `i` of an experiment keyed by `master` uses
//! `splitmix64(master ^ splitmix64(i + 1))`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Name recorded in provenance for the generator scheme above.
pub const GENERATOR_ID: &str = "chacha8";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Arrivals = 0,
    Atoms = 1,
    Mixing = 2,
    Sticks = 3,
    Draws = 4,
}

pub fn stream_rng(seed: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

/// SplitMix64 finalizer.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for replication `index` of an experiment keyed by `master`.
pub fn replication_seed(master: u64, index: u64) -> u64 {
    splitmix64(master ^ splitmix64(index.wrapping_add(1)))
}
