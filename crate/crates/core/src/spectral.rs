//! Spectral partitioning nomination: adjacency spectral embedding, k-means,
//! and ranking by distance to the centroid holding the most block-one seeds.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{Adjacency, LabeledGraph};
use crate::kmeans::{kmeans, Clustering, KMeansConfig};
use crate::linalg::{lanczos_extreme, symmetric_eigen, top_modulus_indices, Matrix};
use crate::metrics::NominationList;
use crate::scalar::Scalar;

/// Graphs up to this many vertices use the dense eigensolver; larger ones use Lanczos.
pub const DENSE_EIGEN_LIMIT: usize = 1200;

/// Scaled spectral coordinates: column `j` is a unit eigenvector times
/// `sqrt(|eigenvalues[j]|)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Embedding<T> {
    pub coordinates: Matrix<T>,
    /// Largest-modulus eigenvalues, by decreasing modulus.
    pub eigenvalues: Vec<T>,
}

impl<T: Scalar> Embedding<T> {
    pub fn dimension(&self) -> usize {
        self.eigenvalues.len()
    }
}

fn adjacency_apply<T: Scalar>(adj: &Adjacency, x: &[T], y: &mut [T]) {
    y.par_iter_mut().enumerate().for_each(|(i, out)| {
        *out = adj.neighbors(i).map(|j| x[j]).sum();
    });
}

// Makes the largest-magnitude entry positive (first one on ties).
fn fix_sign<T: Scalar>(v: &mut [T]) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v.get(best).is_some_and(|&x| x < T::zero()) {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Embedding from the `d` largest-modulus eigenpairs of the adjacency matrix.
pub fn embed<T: Scalar>(graph: &LabeledGraph, d: usize) -> Result<Embedding<T>> {
    embed_adjacency(graph.adjacency(), d)
}

pub fn embed_adjacency<T: Scalar>(adj: &Adjacency, d: usize) -> Result<Embedding<T>> {
    let n = adj.num_vertices();
    if d == 0 || d > n {
        return Err(Error::InvalidArgument(format!(
            "embedding dimension {d} outside 1..={n}"
        )));
    }
    let (eigenvalues, mut vectors): (Vec<T>, Vec<Vec<T>>) = if n <= DENSE_EIGEN_LIMIT {
        let eig = symmetric_eigen(&adj.to_matrix::<T>());
        let top = top_modulus_indices(&eig.values, d);
        (
            top.iter().map(|&i| eig.values[i]).collect(),
            top.iter().map(|&i| eig.vectors.column(i)).collect(),
        )
    } else {
        let eig = lanczos_extreme(n, d, |x, y| adjacency_apply(adj, x, y), T::of(1e-9));
        (eig.values, eig.vectors)
    };
    for v in vectors.iter_mut() {
        fix_sign(v);
    }
    let scales: Vec<T> = eigenvalues.iter().map(|l| l.abs().sqrt()).collect();
    let coordinates = Matrix::from_fn(n, d, |i, j| vectors[j][i] * scales[j]);
    Ok(Embedding {
        coordinates,
        eigenvalues,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralConfig {
    /// Embedding dimension; `None` means the caller must resolve it (usually the rank of the model).
    pub dimension: Option<usize>,
    pub kmeans: KMeansConfig,
}

impl Default for SpectralConfig {
    fn default() -> Self {
        SpectralConfig {
            dimension: None,
            kmeans: KMeansConfig::default(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SpectralNomination<T> {
    pub list: NominationList,
    pub clustering: Clustering<T>,
    pub chosen_cluster: usize,
    /// Distance of each ambiguous vertex to the chosen centroid.
    pub distances: Vec<T>,
}

/// Embed in dimension `d`, cluster all vertices into `k` groups, pick the
/// cluster with the most block-one seeds (lowest index on ties), and list
/// ambiguous vertices by increasing distance to its centroid.
pub fn spectral_nominate<T: Scalar>(
    graph: &LabeledGraph,
    k: usize,
    d: usize,
    config: &KMeansConfig,
) -> Result<SpectralNomination<T>> {
    if !graph.seed_labels().contains(&0) {
        return Err(Error::InvalidArgument("spectral nomination needs at least one block-1 seed".into()));
    }
    let embedding = embed::<T>(graph, d)?;
    let clustering = kmeans(&embedding.coordinates, k, config)?;
    let mut seeds_in = vec![0usize; clustering.num_clusters()];
    for (v, &label) in graph.seed_labels().iter().enumerate() {
        if label == 0 {
            seeds_in[clustering.labels[v]] += 1;
        }
    }
    let chosen_cluster = (0..seeds_in.len())
        .max_by(|&a, &b| seeds_in[a].cmp(&seeds_in[b]).then(b.cmp(&a)))
        .expect("k >= 1");
    let centre = clustering.centroids.row(chosen_cluster);
    let m = graph.num_seeds();
    let distances: Vec<T> = (m..graph.num_vertices())
        .map(|v| {
            embedding
                .coordinates
                .row(v)
                .iter()
                .zip(centre)
                .map(|(&x, &c)| (x - c) * (x - c))
                .sum::<T>()
                .sqrt()
        })
        .collect();
    Ok(SpectralNomination {
        list: NominationList::by_key(&distances, false),
        clustering,
        chosen_cluster,
        distances,
    })
}
