//! Counter-based random streams.
//!
//! Each consumer draws from `ChaCha8(master_seed ⊕ index)` on its own ChaCha
//! stream, so results depend only on `(seed, stream, index)` and never on the
//! order in which drops are processed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum Stream {
    TestDrops = 1,
    ThinningDrops = 2,
    PiaDrops = 3,
    PiaSwarm = 4,
    MovableSwarm = 5,
    RatioSweep = 6,
    Permutation = 7,
}

pub fn stream_rng(master_seed: u64, stream: Stream, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed ^ index);
    rng.set_stream(stream as u64);
    rng
}
