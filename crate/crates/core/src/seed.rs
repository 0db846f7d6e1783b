//! Counter-based seed derivation.
//!
//! Every random stream in a run is keyed by the master seed plus a path of
//! counters (alpha index, episode index, stream tag). Keys are mixed with the
//! SplitMix64 finalizer, so distinct paths never share a stream and the
//! mapping does not depend on execution order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The random stream type used by every simulator and search.
pub type SimRng = ChaCha8Rng;

/// Stream tags so that environment dynamics and search randomness within one
/// episode are independent.
pub const STREAM_ENV: u64 = 0x454e_5600;
pub const STREAM_SEARCH: u64 = 0x5345_4152;
pub const STREAM_INIT: u64 = 0x494e_4954;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive a child seed from `master` and a key path.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(master), |acc, &k| splitmix64(acc ^ splitmix64(k)))
}

pub fn rng_for(master: u64, path: &[u64]) -> SimRng {
    SimRng::seed_from_u64(derive_seed(master, path))
}
