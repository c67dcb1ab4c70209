//! Likelihood maximization nomination.
//!
//! Stage one estimates the hidden labels by the maximum-likelihood block
//! assignment, found with seeded graph matching against the log-odds matrix.
//! Stage two scores every ambiguous vertex by the geometric mean of the
//! likelihood ratios of swapping it with each vertex on the other side of
//! the estimated block-one boundary.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{BlockAssignment, BlockModel, LabeledGraph};
use crate::metrics::NominationList;
use crate::scalar::Scalar;
use crate::sgm::{build_logodds_matrix, sgm_match, SgmConfig};

/// Stage-two score of one ambiguous vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct SwapScore<T> {
    /// Ambiguous-local index.
    pub vertex: usize,
    pub in_block1: bool,
    /// Mean log swap ratio against the other side (0 when that side is empty).
    pub log_geo_mean: T,
}

#[derive(Clone, Debug)]
pub struct LikelihoodNomination<T> {
    pub list: NominationList,
    pub assignment: BlockAssignment,
    pub scores: Vec<SwapScore<T>>,
}

/// Block assignment maximizing the likelihood, as found by seeded graph
/// matching: vertex `i` takes the reference label of the position it is
/// matched to.
pub fn mle_block_assignment<T: Scalar>(
    graph: &LabeledGraph,
    model: &BlockModel<T>,
    config: &SgmConfig,
) -> Result<BlockAssignment> {
    graph.check_model(model)?;
    let b = build_logodds_matrix(model, graph.seed_labels());
    let a = graph.adjacency().to_matrix::<T>();
    let result = sgm_match(&a, &b.matrix, graph.num_seeds(), config)?;
    let labels = (0..graph.num_vertices())
        .map(|i| b.reference.get(result.permutation.apply(i)))
        .collect();
    BlockAssignment::new(labels, model.num_blocks())
}

/// Per-vertex neighbor counts by block under `assignment`, flattened `v * K + k`.
fn block_degrees(graph: &LabeledGraph, assignment: &BlockAssignment) -> Vec<u32> {
    let k = assignment.num_blocks();
    let adj = graph.adjacency();
    let mut out = vec![0u32; graph.num_vertices() * k];
    for v in 0..graph.num_vertices() {
        for w in adj.neighbors(v) {
            out[v * k + assignment.get(w)] += 1;
        }
    }
    out
}

struct SwapContext<'a, T> {
    graph: &'a LabeledGraph,
    assignment: &'a BlockAssignment,
    log_odds: Vec<T>,
    degrees: Vec<u32>,
    k: usize,
}

impl<'a, T: Scalar> SwapContext<'a, T> {
    fn new(graph: &'a LabeledGraph, assignment: &'a BlockAssignment, model: &BlockModel<T>) -> Self {
        let k = model.num_blocks();
        let w = model.log_weights();
        let log_odds = (0..k * k).map(|i| w.log_odds(i / k, i % k)).collect();
        SwapContext {
            graph,
            assignment,
            log_odds,
            degrees: block_degrees(graph, assignment),
            k,
        }
    }

    // Only edges at v or w change their block pair; the non-edge terms depend
    // on block sizes alone and cancel.
    fn log_ratio(&self, v: usize, w: usize) -> T {
        let k = self.k;
        let c = self.assignment.get(w);
        let joined = self.graph.adjacency().has_edge(v, w) as i64;
        let mut total = T::zero();
        for block in 0..k {
            let ev = self.degrees[v * k + block] as i64 - if block == c { joined } else { 0 };
            let ew = self.degrees[w * k + block] as i64 - if block == 0 { joined } else { 0 };
            if ev != ew {
                let diff = self.log_odds[c * k + block] - self.log_odds[block];
                total += T::of((ev - ew) as f64) * diff;
            }
        }
        total
    }
}

fn check_swap(graph: &LabeledGraph, assignment: &BlockAssignment, v: usize, w: usize) -> Result<()> {
    let m = graph.num_seeds();
    let total = graph.num_vertices();
    if v < m || w < m || v >= total || w >= total {
        return Err(Error::InvalidArgument(format!(
            "swap endpoints {v}, {w} must both be ambiguous vertices"
        )));
    }
    if assignment.len() != total {
        return Err(Error::InvalidAssignment("assignment does not cover the graph".into()));
    }
    if assignment.get(v) != 0 || assignment.get(w) == 0 {
        return Err(Error::InvalidArgument(format!(
            "swap needs vertex {v} in block 1 and vertex {w} outside it"
        )));
    }
    Ok(())
}

/// `log p(b with v and w exchanged, G) - log p(b, G)` for an ambiguous `v`
/// in block one and an ambiguous `w` outside it (internal 0-based indices).
pub fn swap_log_ratio<T: Scalar>(
    graph: &LabeledGraph,
    assignment: &BlockAssignment,
    model: &BlockModel<T>,
    v: usize,
    w: usize,
) -> Result<T> {
    check_swap(graph, assignment, v, w)?;
    if assignment.num_blocks() != model.num_blocks() {
        return Err(Error::InvalidAssignment("block counts disagree".into()));
    }
    Ok(SwapContext::new(graph, assignment, model).log_ratio(v, w))
}

/// Geometric-mean swap scores for every ambiguous vertex under `assignment`.
pub fn swap_scores<T: Scalar>(
    graph: &LabeledGraph,
    assignment: &BlockAssignment,
    model: &BlockModel<T>,
) -> Result<Vec<SwapScore<T>>> {
    assignment.validate(graph, model)?;
    let m = graph.num_seeds();
    let ctx = SwapContext::new(graph, assignment, model);
    let (inside, outside): (Vec<usize>, Vec<usize>) =
        (m..graph.num_vertices()).partition(|&v| assignment.get(v) == 0);
    let mean = |values: &mut dyn Iterator<Item = T>, count: usize| -> T {
        if count == 0 {
            T::zero()
        } else {
            values.sum::<T>() / T::of_usize(count)
        }
    };
    Ok((m..graph.num_vertices())
        .into_par_iter()
        .map(|v| {
            let in_block1 = assignment.get(v) == 0;
            let log_geo_mean = if in_block1 {
                mean(&mut outside.iter().map(|&w| ctx.log_ratio(v, w)), outside.len())
            } else {
                mean(&mut inside.iter().map(|&u| ctx.log_ratio(u, v)), inside.len())
            };
            SwapScore {
                vertex: v - m,
                in_block1,
                log_geo_mean,
            }
        })
        .collect())
}

/// Estimated block-one vertices first, by increasing score (a low ratio
/// means moving them out of block one is unlikely), then the rest by
/// decreasing score. Ties go to the lower vertex index.
pub fn order_by_swap_scores<T: Scalar>(scores: &[SwapScore<T>]) -> NominationList {
    let (mut inside, mut outside): (Vec<&SwapScore<T>>, Vec<&SwapScore<T>>) =
        scores.iter().partition(|s| s.in_block1);
    let cmp = |a: &&SwapScore<T>, b: &&SwapScore<T>| {
        a.log_geo_mean
            .partial_cmp(&b.log_geo_mean)
            .expect("finite swap scores")
    };
    inside.sort_by(|a, b| cmp(a, b).then(a.vertex.cmp(&b.vertex)));
    outside.sort_by(|a, b| cmp(b, a).then(a.vertex.cmp(&b.vertex)));
    NominationList::new(inside.iter().chain(outside.iter()).map(|s| s.vertex).collect())
        .expect("scores cover every ambiguous vertex once")
}

pub fn likelihood_nominate<T: Scalar>(
    graph: &LabeledGraph,
    model: &BlockModel<T>,
    config: &SgmConfig,
) -> Result<LikelihoodNomination<T>> {
    let assignment = mle_block_assignment(graph, model, config)?;
    let scores = swap_scores(graph, &assignment, model)?;
    Ok(LikelihoodNomination {
        list: order_by_swap_scores(&scores),
        assignment,
        scores,
    })
}
