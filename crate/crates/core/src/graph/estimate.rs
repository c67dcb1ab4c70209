use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::{Lambda, LabeledGraph};

/// Block-pair edge densities among labelled vertices, clamped to `[eps, 1 - eps]`.
///
/// With `seeds_only` the densities come from the subgraph induced by the
/// seeds. Otherwise the attached true labels are used as well.
pub fn estimate_lambda<T: Scalar>(graph: &LabeledGraph, seeds_only: bool, eps: T) -> Result<Lambda<T>> {
    let k = graph.num_blocks();
    let labelled: Vec<(usize, usize)> = if seeds_only {
        graph.seed_labels().iter().copied().enumerate().collect()
    } else {
        if graph.true_labels().is_none() {
            return Err(Error::InvalidArgument("estimating from all labels requires true labels".into()));
        }
        (0..graph.num_vertices())
            .map(|v| (v, graph.label_of(v).expect("truth attached")))
            .collect()
    };

    let mut sizes = vec![0u64; k];
    labelled.iter().for_each(|&(_, b)| sizes[b] += 1);
    for (b, &s) in sizes.iter().enumerate() {
        if s < 2 {
            return Err(Error::InvalidArgument(format!(
                "block {} has {s} labelled vertices; at least 2 are needed to estimate its density",
                b + 1
            )));
        }
    }

    let mut edges = vec![0u64; k * k];
    let adj = graph.adjacency();
    for (x, &(i, a)) in labelled.iter().enumerate() {
        for &(j, b) in &labelled[x + 1..] {
            if adj.has_edge(i, j) {
                edges[a * k + b] += 1;
                if a != b {
                    edges[b * k + a] += 1;
                }
            }
        }
    }

    let mut entries = vec![T::zero(); k * k];
    for a in 0..k {
        for b in 0..k {
            let pairs = if a == b { sizes[a] * (sizes[a] - 1) / 2 } else { sizes[a] * sizes[b] };
            let density = edges[a * k + b] as f64 / pairs as f64;
            entries[a * k + b] = T::of(density).max(eps).min(T::one() - eps);
        }
    }
    Lambda::new(k, entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Adjacency;

    const EPS: f64 = 1e-6;

    #[test]
    fn complete_block_clamps_high_and_empty_cross_clamps_low() {
        // seeds 0,1 in block 1 and 2,3 in block 2; only within-block edges
        let adj = Adjacency::from_edges(5, [(0, 1), (2, 3)]);
        let g = LabeledGraph::new(adj, 2, vec![0, 0, 1, 1], None).unwrap();
        let l = estimate_lambda(&g, true, EPS).unwrap();
        assert_eq!(l.get(0, 0), 1.0 - EPS);
        assert_eq!(l.get(0, 1), EPS);
        assert_eq!(l.get(1, 0), EPS);
    }

    #[test]
    fn direct_ratio() {
        let adj = Adjacency::from_edges(6, [(0, 1), (1, 2), (3, 4), (0, 3), (2, 5)]);
        let g = LabeledGraph::new(adj, 2, vec![0, 0, 0, 1, 1], None).unwrap();
        let l = estimate_lambda(&g, true, EPS).unwrap();
        assert!((l.get(0, 0) - 2.0 / 3.0).abs() < 1e-15);
        assert!((l.get(0, 1) - 1.0 / 6.0).abs() < 1e-15);
        assert_eq!(l.get(1, 1), 1.0 - EPS);
    }

    #[test]
    fn too_few_seeds_names_block() {
        let g = LabeledGraph::new(Adjacency::empty(4), 2, vec![0, 0, 1], None).unwrap();
        let err = estimate_lambda::<f64>(&g, true, EPS).unwrap_err();
        assert!(err.to_string().contains("block 2"), "{err}");
    }

    #[test]
    fn census_uses_truth() {
        let adj = Adjacency::from_edges(4, [(0, 1), (0, 2)]);
        let g = LabeledGraph::new(adj, 2, vec![0], Some(vec![0, 1, 1])).unwrap();
        assert!(estimate_lambda::<f64>(&g, true, EPS).is_err());
        let l = estimate_lambda::<f64>(&g, false, EPS).unwrap();
        assert_eq!(l.get(0, 0), 1.0 - EPS);
        assert!((l.get(0, 1) - 0.25).abs() < 1e-15);
        assert_eq!(l.get(1, 1), EPS);
    }
}
