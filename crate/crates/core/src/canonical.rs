//! The canonical scheme: exact posterior probability that each ambiguous
//! vertex belongs to the block of interest, by enumerating every way of
//! splitting the ambiguous vertices into blocks of the known sizes.

use crate::error::{Error, Result};
use crate::graph::{BlockModel, LabeledGraph};
use crate::metrics::NominationList;
use crate::scalar::Scalar;

/// Default cap on the number of enumerated partitions.
pub const DEFAULT_GUARD: u128 = 100_000_000;

/// Number of ways to split `sum(sizes)` items into labelled groups of the given sizes.
pub fn multinomial(sizes: &[usize]) -> u128 {
    let mut total: u128 = 1;
    let mut placed: u128 = 0;
    for &s in sizes {
        for i in 1..=s as u128 {
            placed += 1;
            // C(placed, i) built incrementally; exact at every step
            total = match total.checked_mul(placed) {
                Some(t) => t / i,
                None => return u128::MAX,
            };
        }
    }
    total
}

/// Every assignment of `n = sum(sizes)` ambiguous vertices to blocks with
/// exactly `sizes[k]` vertices in block `k`, in lexicographic order of the
/// label vector.
#[derive(Clone, Debug)]
pub struct Partitions {
    current: Vec<usize>,
    started: bool,
    finished: bool,
}

impl Partitions {
    fn new(sizes: &[usize]) -> Self {
        let current = sizes
            .iter()
            .enumerate()
            .flat_map(|(k, &s)| std::iter::repeat(k).take(s))
            .collect();
        Partitions {
            current,
            started: false,
            finished: false,
        }
    }

    /// Advances in place; `false` once the last assignment has been passed.
    fn advance(&mut self) -> bool {
        if !self.started {
            self.started = true;
            return true;
        }
        if self.finished || !next_permutation(&mut self.current) {
            self.finished = true;
            return false;
        }
        true
    }
}

impl Iterator for Partitions {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        self.advance().then(|| self.current.clone())
    }
}

fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let Some(i) = (0..v.len() - 1).rev().find(|&i| v[i] < v[i + 1]) else {
        return false;
    };
    let j = (i + 1..v.len()).rev().find(|&j| v[j] > v[i]).expect("pivot has a successor");
    v.swap(i, j);
    v[i + 1..].reverse();
    true
}

/// Iterator over all block assignments of the ambiguous vertices, refusing
/// when there are more than `guard` of them.
pub fn enumerate_partitions(sizes: &[usize], guard: u128) -> Result<Partitions> {
    let count = multinomial(sizes);
    if count > guard {
        return Err(Error::Infeasible { count, guard });
    }
    Ok(Partitions::new(sizes))
}

/// Posterior block-of-interest probabilities for the ambiguous vertices.
#[derive(Clone, Debug, PartialEq)]
pub struct CanonicalScores<T> {
    /// Indexed by ambiguous-local vertex.
    pub prob: Vec<T>,
    /// Log of the total probability of the observed graph summed over partitions.
    pub log_denominator: T,
}

/// Exact conditional probabilities with the default enumeration guard.
pub fn conditional_block1_probability<T: Scalar>(
    graph: &LabeledGraph,
    model: &BlockModel<T>,
) -> Result<CanonicalScores<T>> {
    conditional_block1_probability_guarded(graph, model, DEFAULT_GUARD)
}

/// For every ambiguous `v`, the weight of partitions placing `v` in block
/// one over the weight of all partitions, where a partition's weight is the
/// likelihood of the induced full assignment. Accumulated in the log domain
/// with a running maximum.
pub fn conditional_block1_probability_guarded<T: Scalar>(
    graph: &LabeledGraph,
    model: &BlockModel<T>,
    guard: u128,
) -> Result<CanonicalScores<T>> {
    graph.check_model(model)?;
    let mut partitions = enumerate_partitions(model.ambiguous_sizes(), guard)?;
    let k = model.num_blocks();
    let m = graph.num_seeds();
    let n = graph.num_ambiguous();
    let adj = graph.adjacency();
    let w = model.log_weights();
    let seeds = graph.seed_labels();

    // Constant part: non-edge mass of every block pair plus seed-seed edges.
    let sizes = model.block_sizes();
    let mut constant = T::zero();
    for a in 0..k {
        for b in a..k {
            let pairs = if a == b {
                sizes[a] * sizes[a].saturating_sub(1) / 2
            } else {
                sizes[a] * sizes[b]
            };
            constant += T::of_usize(pairs) * w.log_q(a, b);
        }
    }
    for i in 0..m {
        for j in adj.neighbors(i).filter(|&j| j > i && j < m) {
            constant += w.log_odds(seeds[i], seeds[j]);
        }
    }

    // seed_term[v * k + l]: log-odds mass of v's seed edges if v sits in block l.
    let mut seed_term = vec![T::zero(); n * k];
    for v in 0..n {
        let mut seed_deg = vec![0usize; k];
        for u in adj.neighbors(m + v).take_while(|&u| u < m) {
            seed_deg[seeds[u]] += 1;
        }
        for l in 0..k {
            seed_term[v * k + l] = (0..k).map(|b| T::of_usize(seed_deg[b]) * w.log_odds(l, b)).sum();
        }
    }
    let vv_edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|v| adj.neighbors(m + v).filter(move |&u| u > m + v).map(move |u| (v, u - m)))
        .collect();

    let mut running_max = T::neg_infinity();
    let mut total = T::zero();
    let mut numer = vec![T::zero(); n];
    while partitions.advance() {
        let labels = &partitions.current;
        let mut weight = constant;
        for (v, &l) in labels.iter().enumerate() {
            weight += seed_term[v * k + l];
        }
        for &(a, b) in &vv_edges {
            weight += w.log_odds(labels[a], labels[b]);
        }
        if weight > running_max {
            if running_max > T::neg_infinity() {
                let rescale = (running_max - weight).exp();
                total *= rescale;
                numer.iter_mut().for_each(|x| *x *= rescale);
            }
            running_max = weight;
        }
        let x = (weight - running_max).exp();
        total += x;
        for (v, &l) in labels.iter().enumerate() {
            if l == 0 {
                numer[v] += x;
            }
        }
    }

    Ok(CanonicalScores {
        prob: numer.iter().map(|&x| x / total).collect(),
        log_denominator: running_max + total.ln(),
    })
}

/// Ambiguous vertices in decreasing order of their block-of-interest
/// probability; exact ties go to the lower vertex index.
pub fn canonical_nominate<T: Scalar>(graph: &LabeledGraph, model: &BlockModel<T>) -> Result<NominationList> {
    canonical_nominate_guarded(graph, model, DEFAULT_GUARD)
}

pub fn canonical_nominate_guarded<T: Scalar>(
    graph: &LabeledGraph,
    model: &BlockModel<T>,
    guard: u128,
) -> Result<NominationList> {
    let scores = conditional_block1_probability_guarded(graph, model, guard)?;
    Ok(NominationList::by_key(&scores.prob, true))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Adjacency, Lambda};

    #[test]
    fn partition_counts() {
        assert_eq!(enumerate_partitions(&[1, 1], DEFAULT_GUARD).unwrap().count(), 2);
        assert_eq!(enumerate_partitions(&[4, 3, 3], DEFAULT_GUARD).unwrap().count(), 4200);
        assert_eq!(enumerate_partitions(&[2, 0], DEFAULT_GUARD).unwrap().count(), 1);
        assert_eq!(multinomial(&[4, 3, 3]), 4200);
        assert_eq!(multinomial(&[200, 150, 150]), u128::MAX);
    }

    #[test]
    fn partitions_are_lexicographic_and_distinct() {
        let all: Vec<Vec<usize>> = enumerate_partitions(&[2, 1, 1], DEFAULT_GUARD).unwrap().collect();
        assert_eq!(all.len(), 12);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(all[0], vec![0, 0, 1, 2]);
        assert_eq!(all[11], vec![2, 1, 0, 0]);
    }

    #[test]
    fn guard_reports_infeasible() {
        match enumerate_partitions(&[200, 150, 150], DEFAULT_GUARD) {
            Err(Error::Infeasible { .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(enumerate_partitions(&[4, 3, 3], 4199).is_err());
    }

    #[test]
    fn symmetric_two_vertex_case() {
        let lambda = Lambda::from_rows(&[vec![0.7, 0.2], vec![0.2, 0.7]]).unwrap();
        let model = BlockModel::new(lambda, vec![0, 0], vec![1, 1]).unwrap();
        let g = LabeledGraph::new(Adjacency::from_edges(2, [(0, 1)]), 2, vec![], None).unwrap();
        let s = conditional_block1_probability(&g, &model).unwrap();
        assert_eq!(s.prob, vec![0.5, 0.5]);
    }

    #[test]
    fn one_seed_two_partitions() {
        let lambda = Lambda::<f64>::from_rows(&[vec![0.8, 0.2], vec![0.2, 0.5]]).unwrap();
        let model = BlockModel::new(lambda, vec![1, 0], vec![1, 1]).unwrap();
        let g = LabeledGraph::new(Adjacency::from_edges(3, [(0, 1)]), 2, vec![0], None).unwrap();
        let s = conditional_block1_probability(&g, &model).unwrap();
        let expect = 0.512 / (0.512 + 0.032);
        assert!((s.prob[0] - expect).abs() < 1e-12);
        assert!((s.prob[1] - (1.0 - expect)).abs() < 1e-12);
        assert!((s.log_denominator - (0.512f64 + 0.032).ln()).abs() < 1e-12);
        let list = canonical_nominate(&g, &model).unwrap();
        assert_eq!(list.order(), &[0, 1]);
    }

    #[test]
    fn equal_probabilities_keep_vertex_order() {
        let model = BlockModel::new(Lambda::constant(3, 0.5).unwrap(), vec![2, 0, 0], vec![2, 2, 1]).unwrap();
        let adj = Adjacency::from_edges(7, [(0, 3), (4, 6), (5, 2)]);
        let g = LabeledGraph::new(adj, 3, vec![0, 0], None).unwrap();
        let list = canonical_nominate(&g, &model).unwrap();
        assert_eq!(list.order(), &[0, 1, 2, 3, 4]);
    }

    #[test]
    fn rejects_incompatible_graph() {
        let model = BlockModel::new(Lambda::constant(2, 0.5).unwrap(), vec![1, 0], vec![1, 1]).unwrap();
        let g = LabeledGraph::new(Adjacency::empty(3), 2, vec![1], None).unwrap();
        assert!(conditional_block1_probability(&g, &model).is_err());
    }
}
