//! Seeded random streams.
//!
//! A node's stream depends only on the global seed and the node id, so two
//! runs that differ only in processing order see identical random bits.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Stream = ChaCha8Rng;

/// Private stream of `node` under `seed`.
pub fn node_stream(seed: u64, node: usize) -> Stream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(node as u64);
    rng
}

/// Stream for a named sub-task (e.g. a cluster id), disjoint from node streams.
pub fn tagged_stream(seed: u64, tag: u64, index: u64) -> Stream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    rng.set_stream(index.wrapping_add(1 << 62));
    rng
}
