//! Replicate-keyed random streams.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Independent sub-seeds for one Monte-Carlo replicate, derived only from
/// the master seed and the replicate index.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReplicateSeeds {
    pub graph: u64,
    pub membership: u64,
    pub kmeans: u64,
    pub sgm: u64,
    pub split: u64,
}

impl ReplicateSeeds {
    pub fn new(master_seed: u64, replicate: u64) -> Self {
        let mut rng = replicate_rng(master_seed, replicate);
        ReplicateSeeds {
            graph: rng.next_u64(),
            membership: rng.next_u64(),
            kmeans: rng.next_u64(),
            sgm: rng.next_u64(),
            split: rng.next_u64(),
        }
    }
}

pub fn replicate_rng(master_seed: u64, replicate: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(replicate);
    rng
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_differ_and_repeat() {
        assert_eq!(ReplicateSeeds::new(1, 5), ReplicateSeeds::new(1, 5));
        assert_ne!(ReplicateSeeds::new(1, 5), ReplicateSeeds::new(1, 6));
        assert_ne!(ReplicateSeeds::new(1, 5), ReplicateSeeds::new(2, 5));
    }
}
