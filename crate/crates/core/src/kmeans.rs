//! Lloyd's k-means with k-means++ seeding and parallel restarts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct KMeansConfig {
    pub restarts: usize,
    pub max_iter: usize,
    pub rng_seed: u64,
}

impl Default for KMeansConfig {
    fn default() -> Self {
        KMeansConfig {
            restarts: 10,
            max_iter: 300,
            rng_seed: 0,
        }
    }
}

/// Clusters are numbered by the lexicographic order of their centroids.
#[derive(Clone, Debug, PartialEq)]
pub struct Clustering<T> {
    pub labels: Vec<usize>,
    /// `k x d`, row `c` is the centroid of cluster `c`.
    pub centroids: Matrix<T>,
    /// Sum of squared distances from each point to its centroid.
    pub objective: T,
    /// Objective after seeding and after every Lloyd iteration of the winning restart.
    pub trace: Vec<T>,
}

impl<T: Scalar> Clustering<T> {
    pub fn num_clusters(&self) -> usize {
        self.centroids.rows()
    }
}

#[inline]
fn sq_dist<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| (x - y) * (x - y)).sum()
}

/// Best of `config.restarts` runs (lowest objective, then lowest restart index).
pub fn kmeans<T: Scalar>(points: &Matrix<T>, k: usize, config: &KMeansConfig) -> Result<Clustering<T>> {
    let n = points.rows();
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!("cannot form {k} clusters from {n} points")));
    }
    if !points.is_finite() {
        return Err(Error::InvalidArgument("points must be finite".into()));
    }
    // Seeding runs on lexicographically sorted points so the result does not
    // depend on the order the points arrive in.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        points
            .row(a)
            .iter()
            .zip(points.row(b))
            .map(|(x, y)| x.partial_cmp(y).expect("finite"))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let sorted = Matrix::from_fn(n, points.cols(), |i, j| points[(order[i], j)]);
    let runs: Vec<Clustering<T>> = (0..config.restarts.max(1))
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
            rng.set_stream(r as u64);
            let mut run = lloyd(&sorted, k, config.max_iter, &mut rng);
            let mut labels = vec![0; n];
            for (i, &o) in order.iter().enumerate() {
                labels[o] = run.labels[i];
            }
            run.labels = labels;
            run
        })
        .collect();
    let best = runs
        .into_iter()
        .reduce(|best, run| if run.objective < best.objective { run } else { best })
        .expect("at least one restart");
    Ok(canonical_order(best))
}

fn seed_centroids<T: Scalar>(points: &Matrix<T>, k: usize, rng: &mut ChaCha8Rng) -> Matrix<T> {
    let n = points.rows();
    let mut centroids = Matrix::zeros(k, points.cols());
    let first = rng.gen_range(0..n);
    centroids.row_mut(0).copy_from_slice(points.row(first));
    let mut dist: Vec<T> = (0..n).map(|i| sq_dist(points.row(i), points.row(first))).collect();
    for c in 1..k {
        let total: T = dist.iter().copied().sum();
        let pick = if total > T::zero() {
            let mut target = T::of(rng.gen::<f64>()) * total;
            let mut pick = n - 1;
            for (i, &d) in dist.iter().enumerate() {
                if d > T::zero() && target < d {
                    pick = i;
                    break;
                }
                target -= d;
            }
            if dist[pick] == T::zero() {
                pick = (0..n).rev().find(|&i| dist[i] > T::zero()).unwrap_or(pick);
            }
            pick
        } else {
            rng.gen_range(0..n)
        };
        centroids.row_mut(c).copy_from_slice(points.row(pick));
        for (i, d) in dist.iter_mut().enumerate() {
            *d = d.min(sq_dist(points.row(i), points.row(pick)));
        }
    }
    centroids
}

fn assign<T: Scalar>(points: &Matrix<T>, centroids: &Matrix<T>, labels: &mut [usize]) -> T {
    let mut total = T::zero();
    for (i, label) in labels.iter_mut().enumerate() {
        let p = points.row(i);
        let mut best = (sq_dist(p, centroids.row(0)), 0);
        for c in 1..centroids.rows() {
            let d = sq_dist(p, centroids.row(c));
            if d < best.0 {
                best = (d, c);
            }
        }
        *label = best.1;
        total += best.0;
    }
    total
}

fn objective<T: Scalar>(points: &Matrix<T>, centroids: &Matrix<T>, labels: &[usize]) -> T {
    labels
        .iter()
        .enumerate()
        .map(|(i, &c)| sq_dist(points.row(i), centroids.row(c)))
        .sum()
}

fn lloyd<T: Scalar>(points: &Matrix<T>, k: usize, max_iter: usize, rng: &mut ChaCha8Rng) -> Clustering<T> {
    let n = points.rows();
    let d = points.cols();
    let mut centroids = seed_centroids(points, k, rng);
    let mut labels = vec![0; n];
    let mut trace = vec![assign(points, &centroids, &mut labels)];
    for _ in 0..max_iter {
        let mut sums = Matrix::<T>::zeros(k, d);
        let mut counts = vec![0usize; k];
        for (i, &c) in labels.iter().enumerate() {
            counts[c] += 1;
            for (s, &x) in sums.row_mut(c).iter_mut().zip(points.row(i)) {
                *s += x;
            }
        }
        for c in 0..k {
            if counts[c] > 0 {
                let inv = T::one() / T::of_usize(counts[c]);
                for (dst, &s) in centroids.row_mut(c).iter_mut().zip(sums.row(c)) {
                    *dst = s * inv;
                }
            }
        }
        // Re-seed empty clusters at the point farthest from its own centroid.
        for c in 0..k {
            if counts[c] == 0 {
                let far = (0..n)
                    .map(|i| (sq_dist(points.row(i), centroids.row(labels[i])), i))
                    .fold((T::zero(), usize::MAX), |best, cand| if best.1 == usize::MAX || cand.0 > best.0 { cand } else { best });
                let i = far.1;
                counts[labels[i]] -= 1;
                counts[c] = 1;
                labels[i] = c;
                centroids.row_mut(c).copy_from_slice(points.row(i));
            }
        }
        let before = labels.clone();
        let value = assign(points, &centroids, &mut labels);
        trace.push(value);
        if labels == before {
            break;
        }
    }
    let objective = objective(points, &centroids, &labels);
    Clustering {
        labels,
        centroids,
        objective,
        trace,
    }
}

fn canonical_order<T: Scalar>(c: Clustering<T>) -> Clustering<T> {
    let k = c.centroids.rows();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| {
        c.centroids
            .row(a)
            .partial_cmp(c.centroids.row(b))
            .expect("finite centroids")
            .then(a.cmp(&b))
    });
    let mut rank = vec![0; k];
    for (new, &old) in order.iter().enumerate() {
        rank[old] = new;
    }
    let centroids = Matrix::from_fn(k, c.centroids.cols(), |i, j| c.centroids[(order[i], j)]);
    Clustering {
        labels: c.labels.iter().map(|&l| rank[l]).collect(),
        centroids,
        objective: c.objective,
        trace: c.trace,
    }
}
