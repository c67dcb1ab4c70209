use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::{Adjacency, BlockAssignment, BlockModel, LabeledGraph};

/// Draws a graph from the block model: every unordered pair `{i, j}` is an
/// edge independently with probability `lambda[b(i)][b(j)]`.
///
/// Pairs are visited in row-major order from a ChaCha8 stream seeded with
/// `rng_seed`, so the same inputs give the same graph on every platform.
pub fn sample_sbm<T: Scalar>(
    model: &BlockModel<T>,
    membership: &BlockAssignment,
    rng_seed: u64,
) -> Result<LabeledGraph> {
    let n_total = model.num_vertices();
    let m = model.num_seeds();
    let k = model.num_blocks();
    if membership.len() != n_total || membership.num_blocks() != k {
        return Err(Error::InvalidAssignment(format!(
            "membership covers {} vertices in {} blocks; model has {n_total} in {k}",
            membership.len(),
            membership.num_blocks()
        )));
    }
    let labels = membership.labels();
    let mut seed_counts = vec![0; k];
    labels[..m].iter().for_each(|&b| seed_counts[b] += 1);
    let mut amb_counts = vec![0; k];
    labels[m..].iter().for_each(|&b| amb_counts[b] += 1);
    if seed_counts != model.seed_sizes() || amb_counts != model.ambiguous_sizes() {
        return Err(Error::InvalidAssignment(format!(
            "membership sizes {seed_counts:?}/{amb_counts:?} differ from model {:?}/{:?}",
            model.seed_sizes(),
            model.ambiguous_sizes()
        )));
    }

    let probs: Vec<f64> = (0..k * k)
        .map(|x| model.lambda().get(x / k, x % k).to_f64_lossy())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut adj = Adjacency::empty(n_total);
    for i in 0..n_total {
        let row = &probs[labels[i] * k..(labels[i] + 1) * k];
        for j in i + 1..n_total {
            if rng.gen::<f64>() < row[labels[j]] {
                adj.add_edge(i, j);
            }
        }
    }
    LabeledGraph::new(adj, k, labels[..m].to_vec(), Some(labels[m..].to_vec()))
}
