use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::{BlockModel, LabeledGraph};

/// A block label for every vertex of the graph.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BlockAssignment {
    labels: Vec<usize>,
    num_blocks: usize,
}

impl BlockAssignment {
    pub fn new(labels: Vec<usize>, num_blocks: usize) -> Result<Self> {
        if let Some(&bad) = labels.iter().find(|&&b| b >= num_blocks) {
            return Err(Error::InvalidAssignment(format!(
                "label {} outside 1..={num_blocks}",
                bad + 1
            )));
        }
        Ok(BlockAssignment { labels, num_blocks })
    }

    /// Seeds labelled contiguously by `m_k`, then ambiguous vertices contiguously by `n_k`.
    pub fn contiguous<T: Scalar>(model: &BlockModel<T>) -> Self {
        let seeds = contiguous_labels(model.seed_sizes());
        Self::with_contiguous_ambiguous(&seeds, model.ambiguous_sizes(), model.num_blocks())
    }

    /// The given seed labels followed by ambiguous labels `0..0, 1..1, ...` of sizes `n_k`.
    pub fn with_contiguous_ambiguous(seed_labels: &[usize], ambiguous_sizes: &[usize], num_blocks: usize) -> Self {
        let mut labels = seed_labels.to_vec();
        labels.extend(contiguous_labels(ambiguous_sizes));
        BlockAssignment { labels, num_blocks }
    }

    /// Seed labels plus the attached truth.
    pub fn from_truth(graph: &LabeledGraph) -> Result<Self> {
        let truth = graph
            .true_labels()
            .ok_or_else(|| Error::InvalidAssignment("graph carries no true labels".into()))?;
        let mut labels = graph.seed_labels().to_vec();
        labels.extend_from_slice(truth);
        Ok(BlockAssignment {
            labels,
            num_blocks: graph.num_blocks(),
        })
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn num_blocks(&self) -> usize {
        self.num_blocks
    }

    #[inline]
    pub fn get(&self, v: usize) -> usize {
        self.labels[v]
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.num_blocks];
        for &b in &self.labels {
            sizes[b] += 1;
        }
        sizes
    }

    /// Same labels with vertices `v` and `w` exchanged.
    pub fn swapped(&self, v: usize, w: usize) -> Self {
        let mut out = self.clone();
        out.labels.swap(v, w);
        out
    }

    /// Checks membership in the feasible set: agrees with the observed seed
    /// labels and puts exactly `n_k` ambiguous vertices in block `k`.
    pub fn validate<T: Scalar>(&self, graph: &LabeledGraph, model: &BlockModel<T>) -> Result<()> {
        if self.num_blocks != model.num_blocks() || graph.num_blocks() != model.num_blocks() {
            return Err(Error::InvalidAssignment("block counts disagree".into()));
        }
        if self.labels.len() != graph.num_vertices() {
            return Err(Error::InvalidAssignment(format!(
                "{} labels for {} vertices",
                self.labels.len(),
                graph.num_vertices()
            )));
        }
        let m = graph.num_seeds();
        if self.labels[..m] != *graph.seed_labels() {
            return Err(Error::InvalidAssignment("disagrees with the observed seed labels".into()));
        }
        let mut counts = vec![0; self.num_blocks];
        for &b in &self.labels[m..] {
            counts[b] += 1;
        }
        if counts != model.ambiguous_sizes() {
            return Err(Error::InvalidAssignment(format!(
                "ambiguous block sizes {counts:?} differ from the model's {:?}",
                model.ambiguous_sizes()
            )));
        }
        Ok(())
    }
}

fn contiguous_labels(sizes: &[usize]) -> Vec<usize> {
    sizes
        .iter()
        .enumerate()
        .flat_map(|(k, &s)| std::iter::repeat(k).take(s))
        .collect()
}

/// Edge and non-edge counts within and between blocks. Stored symmetrically.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeCounts {
    k: usize,
    edges: Vec<u64>,
    non_edges: Vec<u64>,
}

impl EdgeCounts {
    pub fn num_blocks(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn edges(&self, a: usize, b: usize) -> u64 {
        self.edges[a * self.k + b]
    }

    #[inline]
    pub fn non_edges(&self, a: usize, b: usize) -> u64 {
        self.non_edges[a * self.k + b]
    }
}

/// Edge counts per block pair under `assignment`.
pub fn edge_counts(graph: &LabeledGraph, assignment: &BlockAssignment) -> Result<EdgeCounts> {
    if assignment.len() != graph.num_vertices() {
        return Err(Error::InvalidAssignment(format!(
            "{} labels for {} vertices",
            assignment.len(),
            graph.num_vertices()
        )));
    }
    let k = assignment.num_blocks();
    let mut edges = vec![0u64; k * k];
    for (i, j) in graph.adjacency().edges() {
        let (a, b) = (assignment.get(i), assignment.get(j));
        edges[a * k + b] += 1;
        if a != b {
            edges[b * k + a] += 1;
        }
    }
    let sizes: Vec<u64> = assignment.block_sizes().into_iter().map(|s| s as u64).collect();
    let mut non_edges = vec![0u64; k * k];
    for a in 0..k {
        for b in 0..k {
            let pairs = if a == b {
                sizes[a] * sizes[a].saturating_sub(1) / 2
            } else {
                sizes[a] * sizes[b]
            };
            non_edges[a * k + b] = pairs - edges[a * k + b];
        }
    }
    Ok(EdgeCounts { k, edges, non_edges })
}

/// `log p(assignment, G)`: sum over block pairs `k <= l` of
/// `e log p + c log (1 - p)` with the model's clamped probabilities.
pub fn log_likelihood<T: Scalar>(
    graph: &LabeledGraph,
    assignment: &BlockAssignment,
    model: &BlockModel<T>,
) -> Result<T> {
    if assignment.num_blocks() != model.num_blocks() {
        return Err(Error::InvalidAssignment("block counts disagree".into()));
    }
    let counts = edge_counts(graph, assignment)?;
    let w = model.log_weights();
    let k = model.num_blocks();
    let mut total = T::zero();
    for a in 0..k {
        for b in a..k {
            total += T::of(counts.edges(a, b) as f64) * w.log_p(a, b)
                + T::of(counts.non_edges(a, b) as f64) * w.log_q(a, b);
        }
    }
    Ok(total)
}
