//! Seeded random streams.
//!
//! Every run derives two independent ChaCha8 streams from its 64-bit seed:
//! stream 0 drives deployment (positions), stream 1 drives elections and
//! cluster-join tie breaks. Both share the key produced by
//! `ChaCha8Rng::seed_from_u64(seed)` and differ only in the ChaCha stream id,
//! so the deployment of a seed is identical whichever protocol runs on it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

pub const DEPLOYMENT_STREAM: u64 = 0;
pub const ELECTION_STREAM: u64 = 1;

fn stream(seed: u64, id: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

pub fn deployment_rng(seed: u64) -> SimRng {
    stream(seed, DEPLOYMENT_STREAM)
}

pub fn election_rng(seed: u64) -> SimRng {
    stream(seed, ELECTION_STREAM)
}
