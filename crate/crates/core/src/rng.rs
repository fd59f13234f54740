//! Seeded random streams.
//!
//! Every random decision in the crate draws from a ChaCha8 generator keyed by
//! a 64-bit seed and a stream number. ChaCha is counter based, so distinct
//! streams under the same seed are independent and the output is identical on
//! every platform.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Purpose of a random stream. The discriminant is the ChaCha stream id.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    /// Random network structures.
    Structure = 1,
    /// CPT rows of random networks.
    Cpt = 2,
    /// Ancestral sampling of trajectories.
    Sampling = 3,
    /// Missingness masks.
    Missingness = 4,
    /// Initial networks for EM and Structural EM.
    Init = 5,
}

pub fn stream_rng(seed: u64, stream: Stream) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

/// Mixes `tags` into `seed` with splitmix64 so that grid points derived from
/// one experiment seed get unrelated seeds.
pub fn derive_seed(seed: u64, tags: &[u64]) -> u64 {
    let mut state = seed;
    for &tag in tags {
        state = splitmix64(state ^ splitmix64(tag.wrapping_add(0x9e37_79b9_7f4a_7c15)));
    }
    state
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
