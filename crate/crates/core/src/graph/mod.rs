//! Graphs, block models, SBM sampling and block-assignment likelihoods.

mod adjacency;
mod assignment;
mod estimate;
pub mod io;
mod model;
mod sample;

pub use adjacency::Adjacency;
pub use assignment::{edge_counts, log_likelihood, BlockAssignment, EdgeCounts};
pub use estimate::estimate_lambda;
pub use model::{mix_lambda, BlockModel, Lambda, LambdaEntries, LambdaFile, LogWeights, DEFAULT_EPSILON};
pub use sample::sample_sbm;

use crate::error::{Error, Result};

/// A simple undirected graph whose first `m` vertices are seeds with observed
/// block labels. The remaining `n` vertices are ambiguous; their true labels
/// may be attached for evaluation.
///
/// Vertices and blocks are 0-based internally. Block `0` is the block of
/// interest. `external_ids` carries the 1-based identifiers used in files.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledGraph {
    adjacency: Adjacency,
    num_blocks: usize,
    seed_labels: Vec<usize>,
    true_labels: Option<Vec<usize>>,
    external_ids: Vec<usize>,
}

impl LabeledGraph {
    pub fn new(
        adjacency: Adjacency,
        num_blocks: usize,
        seed_labels: Vec<usize>,
        true_labels: Option<Vec<usize>>,
    ) -> Result<Self> {
        let n_total = adjacency.num_vertices();
        if num_blocks == 0 {
            return Err(Error::InvalidArgument("block count must be positive".into()));
        }
        if seed_labels.len() > n_total {
            return Err(Error::InvalidArgument(format!(
                "{} seeds for a graph on {n_total} vertices",
                seed_labels.len()
            )));
        }
        if let Some(&bad) = seed_labels.iter().find(|&&b| b >= num_blocks) {
            return Err(Error::InvalidArgument(format!(
                "seed label {} outside 1..={num_blocks}",
                bad + 1
            )));
        }
        if let Some(truth) = &true_labels {
            if truth.len() != n_total - seed_labels.len() {
                return Err(Error::InvalidArgument(format!(
                    "{} true labels for {} ambiguous vertices",
                    truth.len(),
                    n_total - seed_labels.len()
                )));
            }
            if let Some(&bad) = truth.iter().find(|&&b| b >= num_blocks) {
                return Err(Error::InvalidArgument(format!(
                    "true label {} outside 1..={num_blocks}",
                    bad + 1
                )));
            }
        }
        Ok(LabeledGraph {
            adjacency,
            num_blocks,
            seed_labels,
            true_labels,
            external_ids: (1..=n_total).collect(),
        })
    }

    /// Replaces the 1-based identifiers reported for each internal vertex.
    pub fn with_external_ids(mut self, ids: Vec<usize>) -> Result<Self> {
        if ids.len() != self.num_vertices() {
            return Err(Error::InvalidArgument(format!(
                "{} external ids for {} vertices",
                ids.len(),
                self.num_vertices()
            )));
        }
        self.external_ids = ids;
        Ok(self)
    }

    pub fn adjacency(&self) -> &Adjacency {
        &self.adjacency
    }

    pub fn num_blocks(&self) -> usize {
        self.num_blocks
    }

    pub fn num_vertices(&self) -> usize {
        self.adjacency.num_vertices()
    }

    pub fn num_seeds(&self) -> usize {
        self.seed_labels.len()
    }

    pub fn num_ambiguous(&self) -> usize {
        self.num_vertices() - self.num_seeds()
    }

    pub fn seed_labels(&self) -> &[usize] {
        &self.seed_labels
    }

    /// True labels of the ambiguous vertices, indexed from `0` at vertex `m`.
    pub fn true_labels(&self) -> Option<&[usize]> {
        self.true_labels.as_deref()
    }

    pub fn external_ids(&self) -> &[usize] {
        &self.external_ids
    }

    pub fn external_id(&self, v: usize) -> usize {
        self.external_ids[v]
    }

    /// Seed count per block.
    pub fn seed_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.num_blocks];
        for &b in &self.seed_labels {
            counts[b] += 1;
        }
        counts
    }

    /// True ambiguous count per block, when truth is attached.
    pub fn ambiguous_counts(&self) -> Option<Vec<usize>> {
        self.true_labels.as_ref().map(|truth| {
            let mut counts = vec![0; self.num_blocks];
            for &b in truth {
                counts[b] += 1;
            }
            counts
        })
    }

    /// Checks block count, seed counts and ambiguous total against `model`.
    pub fn check_model<T: crate::scalar::Scalar>(&self, model: &BlockModel<T>) -> Result<()> {
        if self.num_blocks != model.num_blocks() {
            return Err(Error::InvalidModel(format!(
                "graph has {} blocks, model has {}",
                self.num_blocks,
                model.num_blocks()
            )));
        }
        if self.seed_counts() != model.seed_sizes() {
            return Err(Error::InvalidModel(format!(
                "seed counts {:?} differ from model {:?}",
                self.seed_counts(),
                model.seed_sizes()
            )));
        }
        if self.num_ambiguous() != model.num_ambiguous() {
            return Err(Error::InvalidModel(format!(
                "graph has {} ambiguous vertices, model expects {}",
                self.num_ambiguous(),
                model.num_ambiguous()
            )));
        }
        Ok(())
    }

    /// Observed or hidden label of any vertex, if known.
    pub fn label_of(&self, v: usize) -> Option<usize> {
        let m = self.num_seeds();
        if v < m {
            Some(self.seed_labels[v])
        } else {
            self.true_labels.as_ref().map(|t| t[v - m])
        }
    }

    /// Induced subgraph on `seeds` followed by `ambiguous`, with the listed
    /// seeds revealed. Seed labels must be known; the result carries truth
    /// only if every listed ambiguous vertex has a known label.
    pub fn select(&self, seeds: &[usize], ambiguous: &[usize]) -> Result<LabeledGraph> {
        let order: Vec<usize> = seeds.iter().chain(ambiguous).copied().collect();
        let mut seen = vec![false; self.num_vertices()];
        for &v in &order {
            if v >= self.num_vertices() || std::mem::replace(&mut seen[v], true) {
                return Err(Error::InvalidArgument(format!("vertex index {v} repeated or out of range")));
            }
        }
        let seed_labels = seeds
            .iter()
            .map(|&v| {
                self.label_of(v).ok_or_else(|| {
                    Error::InvalidArgument(format!("vertex {} has no known label", self.external_ids[v]))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let truth: Option<Vec<usize>> = ambiguous.iter().map(|&v| self.label_of(v)).collect();
        let ids = order.iter().map(|&v| self.external_ids[v]).collect();
        LabeledGraph::new(self.adjacency.induced(&order), self.num_blocks, seed_labels, truth)?
            .with_external_ids(ids)
    }

    /// Same graph with ambiguous vertex `m + i` of the result taken from
    /// ambiguous vertex `m + perm[i]` of `self`.
    pub fn permute_ambiguous(&self, perm: &[usize]) -> Result<LabeledGraph> {
        let m = self.num_seeds();
        if perm.len() != self.num_ambiguous() {
            return Err(Error::DimensionMismatch(format!(
                "permutation of length {} for {} ambiguous vertices",
                perm.len(),
                self.num_ambiguous()
            )));
        }
        let seeds: Vec<usize> = (0..m).collect();
        let ambiguous: Vec<usize> = perm.iter().map(|&p| m + p).collect();
        self.select(&seeds, &ambiguous)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path4() -> LabeledGraph {
        let adj = Adjacency::from_edges(4, [(0, 1), (1, 2), (2, 3)]);
        LabeledGraph::new(adj, 2, vec![0], Some(vec![0, 1, 1])).unwrap()
    }

    #[test]
    fn counts_and_labels() {
        let g = path4();
        assert_eq!(g.num_seeds(), 1);
        assert_eq!(g.num_ambiguous(), 3);
        assert_eq!(g.seed_counts(), vec![1, 0]);
        assert_eq!(g.ambiguous_counts(), Some(vec![1, 2]));
        assert_eq!(g.label_of(2), Some(1));
    }

    #[test]
    fn rejects_bad_labels() {
        let adj = Adjacency::empty(3);
        assert!(LabeledGraph::new(adj.clone(), 2, vec![2], None).is_err());
        assert!(LabeledGraph::new(adj.clone(), 2, vec![0], Some(vec![0])).is_err());
        assert!(LabeledGraph::new(adj, 2, vec![0, 0, 0, 0], None).is_err());
    }

    #[test]
    fn select_reorders_and_keeps_ids() {
        let g = path4();
        let sub = g.select(&[2], &[3, 1]).unwrap();
        assert_eq!(sub.seed_labels(), &[1]);
        assert_eq!(sub.true_labels(), Some(&[1, 0][..]));
        assert_eq!(sub.external_ids(), &[3, 4, 2]);
        assert!(sub.adjacency().has_edge(0, 1));
        assert!(sub.adjacency().has_edge(0, 2));
        assert!(!sub.adjacency().has_edge(1, 2));
    }

    #[test]
    fn permute_ambiguous_moves_edges() {
        let g = path4();
        let p = g.permute_ambiguous(&[2, 0, 1]).unwrap();
        // new vertex 1 is old 3, new 2 is old 1, new 3 is old 2
        assert!(p.adjacency().has_edge(0, 2));
        assert!(p.adjacency().has_edge(2, 3));
        assert!(p.adjacency().has_edge(3, 1));
        assert_eq!(p.true_labels(), Some(&[1, 0, 1][..]));
    }
}
