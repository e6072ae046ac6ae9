//! Deterministic sharded random streams.
//!
//! Shard `s` of a run seeded with `seed` draws from ChaCha8 keyed by `seed`
//! on stream `s`, so results depend only on `(seed, shards)` and never on
//! thread scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::Result;

pub type ShardRng = ChaCha8Rng;

pub fn shard_rng(seed: u64, shard: u64) -> ShardRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shard);
    rng
}

/// Splits `total` into `shards` near-equal parts, larger parts first.
pub fn shard_sizes(total: u64, shards: u64) -> Vec<u64> {
    let shards = shards.max(1);
    let base = total / shards;
    let extra = total % shards;
    (0..shards).map(|s| base + u64::from(s < extra)).collect()
}

/// Runs `work(rng, count)` for every shard in parallel; results come back in
/// shard order.
pub fn run_sharded<T, F>(seed: u64, shards: u64, total: u64, work: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut ShardRng, u64) -> Result<T> + Sync,
{
    shard_sizes(total, shards)
        .into_par_iter()
        .enumerate()
        .map(|(s, count)| work(&mut shard_rng(seed, s as u64), count))
        .collect()
}
