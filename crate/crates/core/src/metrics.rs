//! Precision at depth, average precision and its weight expansion, and
//! Monte-Carlo mean average precision.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Ordering of the ambiguous vertices. Entries are ambiguous-local indices
/// (`0` is the first ambiguous vertex, internal vertex `m`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NominationList {
    order: Vec<usize>,
}

impl NominationList {
    /// Validates that `order` is a permutation of `0..order.len()`.
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; order.len()];
        for &v in &order {
            if v >= order.len() || std::mem::replace(&mut seen[v], true) {
                return Err(Error::InvalidArgument(format!(
                    "nomination list is not a permutation of 0..{}",
                    order.len()
                )));
            }
        }
        Ok(NominationList { order })
    }

    /// Ambiguous indices ordered by `key` (descending when `descending`),
    /// ties broken by ascending index.
    pub fn by_key<T: Scalar>(keys: &[T], descending: bool) -> Self {
        let mut order: Vec<usize> = (0..keys.len()).collect();
        order.sort_by(|&a, &b| {
            let ord = keys[a].partial_cmp(&keys[b]).expect("finite nomination keys");
            let ord = if descending { ord.reverse() } else { ord };
            ord.then(a.cmp(&b))
        });
        NominationList { order }
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Position (0-based) of each ambiguous index in the list.
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![0; self.order.len()];
        for (p, &v) in self.order.iter().enumerate() {
            pos[v] = p;
        }
        pos
    }

    /// Per-position indicator of membership in the block of interest.
    pub fn hits(&self, truth: &[usize]) -> Result<Vec<bool>> {
        if truth.len() != self.order.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} true labels for a list of {}",
                truth.len(),
                self.order.len()
            )));
        }
        Ok(self.order.iter().map(|&v| truth[v] == 0).collect())
    }
}

/// Fraction of the first `depth` nominees that are in the block of interest.
pub fn precision_at_depth<T: Scalar>(list: &NominationList, truth: &[usize], depth: usize) -> Result<T> {
    if depth == 0 || depth > list.len() {
        return Err(Error::InvalidArgument(format!("depth {depth} outside 1..={}", list.len())));
    }
    let hits = list.hits(truth)?;
    let found = hits[..depth].iter().filter(|&&h| h).count();
    Ok(T::of_usize(found) / T::of_usize(depth))
}

/// Mean of precision at depths `1..=n1`.
pub fn average_precision<T: Scalar>(list: &NominationList, truth: &[usize], n1: usize) -> Result<T> {
    if n1 == 0 || n1 > list.len() {
        return Err(Error::InvalidArgument(format!("n1 = {n1} outside 1..={}", list.len())));
    }
    Ok(average_precision_of_hits(&list.hits(truth)?, n1))
}

/// Average precision computed directly from a hit sequence.
pub fn average_precision_of_hits<T: Scalar>(hits: &[bool], n1: usize) -> T {
    let mut found = 0usize;
    let mut total = T::zero();
    for (j, &h) in hits.iter().take(n1).enumerate() {
        found += h as usize;
        total += T::of_usize(found) / T::of_usize(j + 1);
    }
    total / T::of_usize(n1)
}

/// Nonincreasing weights with `AP = sum_i alpha_i * hit_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct AlphaWeights<T> {
    alpha: Vec<T>,
}

impl<T: Scalar> AlphaWeights<T> {
    pub fn as_slice(&self) -> &[T] {
        &self.alpha
    }

    /// `sum_i alpha_i * hit_i`.
    pub fn weigh(&self, hits: &[bool]) -> T {
        self.alpha.iter().zip(hits).filter(|(_, &h)| h).map(|(&a, _)| a).sum()
    }
}

/// `alpha_i = (1/n1) sum_{j=i}^{n1} 1/j` for `i <= n1`, zero afterwards.
pub fn alpha_weights<T: Scalar>(n: usize, n1: usize) -> Result<AlphaWeights<T>> {
    if n1 == 0 || n1 > n {
        return Err(Error::InvalidArgument(format!("need 1 <= n1 <= n, got n1 = {n1}, n = {n}")));
    }
    let mut alpha = vec![T::zero(); n];
    let mut tail = T::zero();
    for i in (1..=n1).rev() {
        tail += T::one() / T::of_usize(i);
        alpha[i - 1] = tail / T::of_usize(n1);
    }
    Ok(AlphaWeights { alpha })
}

/// Sample mean with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanEstimate {
    pub mean: f64,
    pub std_error: f64,
}

/// Mean average precision over replicates with the standard error of the mean
/// (sample standard deviation over `sqrt(count)`; zero for a single value).
pub fn mean_average_precision(aps: &[f64]) -> Result<MeanEstimate> {
    if aps.is_empty() {
        return Err(Error::InvalidArgument("no average precisions to aggregate".into()));
    }
    if let Some(bad) = aps.iter().find(|a| !(0.0..=1.0).contains(*a)) {
        return Err(Error::InvalidArgument(format!("average precision {bad} outside [0, 1]")));
    }
    let count = aps.len() as f64;
    let mean = aps.iter().sum::<f64>() / count;
    let std_error = if aps.len() > 1 {
        let var = aps.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / (count - 1.0);
        (var / count).sqrt()
    } else {
        0.0
    };
    Ok(MeanEstimate { mean, std_error })
}
