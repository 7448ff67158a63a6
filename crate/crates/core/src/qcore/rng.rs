//! Deterministic random streams.
//!
//! Every stochastic routine draws from a ChaCha8 generator keyed by a master
//! seed and a stream id derived from a tuple of indices, so results do not
//! depend on thread scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub mod tag {
    pub const HAAR: u64 = 1;
    pub const VQE_INIT: u64 = 2;
    pub const NOISE: u64 = 3;
    pub const BOOTSTRAP: u64 = 4;
    pub const MEASUREMENT: u64 = 5;
    pub const LANCZOS: u64 = 6;
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes an index tuple into a single 64-bit stream id.
pub fn stream_id(indices: &[u64]) -> u64 {
    indices
        .iter()
        .fold(0x2545_F491_4F6C_DD1D, |acc, &i| splitmix(acc ^ splitmix(i)))
}

/// Generator for `(seed, indices...)`.
pub fn stream(seed: u64, indices: &[u64]) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_id(indices));
    rng
}
