//! Block-model parameters: the adjacency-probability matrix and block sizes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{symmetric_eigen, Matrix};
use crate::scalar::Scalar;

/// Probability clamp applied before any logarithm of a probability is taken.
pub const DEFAULT_EPSILON: f64 = 1e-6;

const SYMMETRY_TOL: f64 = 1e-12;

/// Symmetric `K x K` matrix of edge probabilities.
#[derive(Clone, Debug, PartialEq)]
pub struct Lambda<T> {
    k: usize,
    entries: Vec<T>,
}

impl<T: Scalar> Lambda<T> {
    /// Row-major construction; checks symmetry and the `[0, 1]` range.
    pub fn new(k: usize, entries: Vec<T>) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidModel("block count must be positive".into()));
        }
        if entries.len() != k * k {
            return Err(Error::InvalidModel(format!(
                "expected {} entries for K = {k}, got {}",
                k * k,
                entries.len()
            )));
        }
        for i in 0..k {
            for j in 0..k {
                let x = entries[i * k + j];
                if !x.is_finite() || x < T::zero() || x > T::one() {
                    return Err(Error::InvalidModel(format!(
                        "entry ({}, {}) = {x} outside [0, 1]",
                        i + 1,
                        j + 1
                    )));
                }
                if (x - entries[j * k + i]).abs() > T::of(SYMMETRY_TOL) {
                    return Err(Error::InvalidModel(format!(
                        "not symmetric at ({}, {})",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(Lambda { k, entries })
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let k = rows.len();
        if rows.iter().any(|r| r.len() != k) {
            return Err(Error::InvalidModel("lambda rows must form a square matrix".into()));
        }
        Lambda::new(k, rows.iter().flatten().copied().collect())
    }

    /// Every entry equal to `p`.
    pub fn constant(k: usize, p: T) -> Result<Self> {
        Lambda::new(k, vec![p; k * k])
    }

    #[inline]
    pub fn num_blocks(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize) -> T {
        self.entries[a * self.k + b]
    }

    pub fn rows(&self) -> Vec<Vec<T>> {
        self.entries.chunks(self.k).map(<[T]>::to_vec).collect()
    }

    /// Entrywise `theta * self + (1 - theta) / 2`.
    pub fn mixed(&self, theta: T) -> Result<Self> {
        mix_lambda(self, theta)
    }

    pub fn clamped(&self, eps: T) -> Self {
        let hi = T::one() - eps;
        Lambda {
            k: self.k,
            entries: self.entries.iter().map(|&x| x.max(eps).min(hi)).collect(),
        }
    }

    /// Count of singular values above `1e-8` times the largest.
    pub fn numerical_rank(&self) -> usize {
        let m = Matrix::from_fn(self.k, self.k, |i, j| self.get(i, j));
        let eig = symmetric_eigen(&m);
        let mags: Vec<T> = eig.values.iter().map(|v| v.abs()).collect();
        let max = mags.iter().copied().fold(T::zero(), T::max);
        if max == T::zero() {
            return 0;
        }
        mags.iter().filter(|&&s| s > max * T::of(1e-8)).count()
    }

    pub fn cast<U: Scalar>(&self) -> Lambda<U> {
        Lambda {
            k: self.k,
            entries: self.entries.iter().map(|x| U::of(x.to_f64_lossy())).collect(),
        }
    }
}

/// Convex combination of `base` with the all-one-half matrix.
pub fn mix_lambda<T: Scalar>(base: &Lambda<T>, theta: T) -> Result<Lambda<T>> {
    if !(theta >= T::zero() && theta <= T::one()) {
        return Err(Error::InvalidArgument(format!("theta = {theta} outside [0, 1]")));
    }
    let half = T::of(0.5);
    Ok(Lambda {
        k: base.k,
        entries: base
            .entries
            .iter()
            .map(|&x| (theta * x + (T::one() - theta) * half).max(T::zero()).min(T::one()))
            .collect(),
    })
}

/// On-disk representation: `{"K": 3, "lambda": [[..], [..], [..]]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LambdaFile {
    #[serde(rename = "K")]
    pub k: usize,
    pub lambda: LambdaEntries,
}

/// Either nested rows or a flat row-major array of `K * K` values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LambdaEntries {
    Rows(Vec<Vec<f64>>),
    Flat(Vec<f64>),
}

impl LambdaFile {
    pub fn to_lambda<T: Scalar>(&self) -> Result<Lambda<T>> {
        let flat: Vec<f64> = match &self.lambda {
            LambdaEntries::Rows(rows) => {
                if rows.len() != self.k || rows.iter().any(|r| r.len() != self.k) {
                    return Err(Error::InvalidModel(format!("lambda is not {0} x {0}", self.k)));
                }
                rows.iter().flatten().copied().collect()
            }
            LambdaEntries::Flat(v) => v.clone(),
        };
        Lambda::new(self.k, flat.into_iter().map(T::of).collect())
    }

    pub fn from_lambda<T: Scalar>(lambda: &Lambda<T>) -> Self {
        LambdaFile {
            k: lambda.k,
            lambda: LambdaEntries::Rows(
                lambda
                    .rows()
                    .into_iter()
                    .map(|r| r.into_iter().map(Scalar::to_f64_lossy).collect())
                    .collect(),
            ),
        }
    }
}

/// Stochastic block model parameters with per-block seed and ambiguous counts.
///
/// Block `0` is the block of interest; it must have at least one ambiguous member.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockModel<T> {
    lambda: Lambda<T>,
    seed_sizes: Vec<usize>,
    ambiguous_sizes: Vec<usize>,
    epsilon: T,
}

impl<T: Scalar> BlockModel<T> {
    pub fn new(lambda: Lambda<T>, seed_sizes: Vec<usize>, ambiguous_sizes: Vec<usize>) -> Result<Self> {
        let k = lambda.num_blocks();
        if seed_sizes.len() != k || ambiguous_sizes.len() != k {
            return Err(Error::InvalidModel(format!(
                "size vectors must have K = {k} entries (got {} seed, {} ambiguous)",
                seed_sizes.len(),
                ambiguous_sizes.len()
            )));
        }
        if ambiguous_sizes[0] == 0 {
            return Err(Error::InvalidModel(
                "the block of interest needs at least one ambiguous vertex".into(),
            ));
        }
        Ok(BlockModel {
            lambda,
            seed_sizes,
            ambiguous_sizes,
            epsilon: T::of(DEFAULT_EPSILON),
        })
    }

    pub fn with_epsilon(mut self, eps: T) -> Result<Self> {
        if !(eps > T::zero() && eps < T::of(0.5)) {
            return Err(Error::InvalidModel(format!("epsilon = {eps} outside (0, 1/2)")));
        }
        self.epsilon = eps;
        Ok(self)
    }

    #[inline]
    pub fn num_blocks(&self) -> usize {
        self.lambda.num_blocks()
    }

    pub fn lambda(&self) -> &Lambda<T> {
        &self.lambda
    }

    pub fn epsilon(&self) -> T {
        self.epsilon
    }

    pub fn seed_sizes(&self) -> &[usize] {
        &self.seed_sizes
    }

    pub fn ambiguous_sizes(&self) -> &[usize] {
        &self.ambiguous_sizes
    }

    pub fn num_seeds(&self) -> usize {
        self.seed_sizes.iter().sum()
    }

    pub fn num_ambiguous(&self) -> usize {
        self.ambiguous_sizes.iter().sum()
    }

    pub fn num_vertices(&self) -> usize {
        self.num_seeds() + self.num_ambiguous()
    }

    /// `m_k + n_k` for every block.
    pub fn block_sizes(&self) -> Vec<usize> {
        self.seed_sizes.iter().zip(&self.ambiguous_sizes).map(|(a, b)| a + b).collect()
    }

    /// Logarithms of the clamped probabilities.
    pub fn log_weights(&self) -> LogWeights<T> {
        LogWeights::new(&self.lambda.clamped(self.epsilon))
    }
}

/// `log p`, `log (1 - p)` and log-odds for every block pair of a clamped matrix.
#[derive(Clone, Debug)]
pub struct LogWeights<T> {
    k: usize,
    log_p: Vec<T>,
    log_q: Vec<T>,
    log_odds: Vec<T>,
}

impl<T: Scalar> LogWeights<T> {
    pub fn new(clamped: &Lambda<T>) -> Self {
        let log_p: Vec<T> = clamped.entries.iter().map(|p| p.ln()).collect();
        let log_q: Vec<T> = clamped.entries.iter().map(|p| (-*p).ln_1p()).collect();
        let log_odds = log_p.iter().zip(&log_q).map(|(a, b)| *a - *b).collect();
        LogWeights {
            k: clamped.k,
            log_p,
            log_q,
            log_odds,
        }
    }

    #[inline]
    pub fn log_p(&self, a: usize, b: usize) -> T {
        self.log_p[a * self.k + b]
    }

    #[inline]
    pub fn log_q(&self, a: usize, b: usize) -> T {
        self.log_q[a * self.k + b]
    }

    #[inline]
    pub fn log_odds(&self, a: usize, b: usize) -> T {
        self.log_odds[a * self.k + b]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> Lambda<f64> {
        Lambda::from_rows(&[
            vec![0.5, 0.3, 0.4],
            vec![0.3, 0.8, 0.6],
            vec![0.4, 0.6, 0.3],
        ])
        .unwrap()
    }

    #[test]
    fn mix_identity_and_flat() {
        assert_eq!(base().mixed(1.0).unwrap(), base());
        let flat = base().mixed(0.0).unwrap();
        assert!(flat.entries.iter().all(|&x| x == 0.5));
    }

    #[test]
    fn mix_medium_scale_matches_published_matrix() {
        let m = base().mixed(0.3).unwrap();
        let expect = [[0.50, 0.44, 0.47], [0.44, 0.59, 0.53], [0.47, 0.53, 0.44]];
        for i in 0..3 {
            for j in 0..3 {
                assert!((m.get(i, j) - expect[i][j]).abs() < 1e-12);
            }
        }
        let l = base().mixed(0.1).unwrap();
        let expect = [[0.50, 0.48, 0.49], [0.48, 0.53, 0.51], [0.49, 0.51, 0.48]];
        for i in 0..3 {
            for j in 0..3 {
                assert!((l.get(i, j) - expect[i][j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn mix_rejects_theta_out_of_range() {
        assert!(base().mixed(1.5).is_err());
        assert!(base().mixed(-0.1).is_err());
        assert!(base().mixed(f64::NAN).is_err());
    }

    #[test]
    fn rejects_asymmetric_and_out_of_range() {
        assert!(Lambda::<f64>::new(2, vec![0.1, 0.2, 0.3, 0.4]).is_err());
        assert!(Lambda::<f64>::new(1, vec![1.5]).is_err());
        assert!(Lambda::<f64>::new(2, vec![0.1; 3]).is_err());
    }

    #[test]
    fn rank_of_experiment_matrices() {
        assert_eq!(base().numerical_rank(), 3);
        assert_eq!(base().mixed(0.0).unwrap().numerical_rank(), 1);
        let rank2 = Lambda::from_rows(&[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        assert_eq!(rank2.numerical_rank(), 1);
    }

    #[test]
    fn clamp_and_log_odds() {
        let l = Lambda::from_rows(&[vec![1.0, 0.8], vec![0.8, 0.5]]).unwrap();
        let w = LogWeights::new(&l.clamped(1e-6));
        assert!((w.log_odds(0, 0) - ((1.0 - 1e-6) / 1e-6f64).ln()).abs() < 1e-6);
        assert!((w.log_odds(0, 1) - 4f64.ln()).abs() < 1e-12);
        assert_eq!(w.log_odds(1, 1), 0.0);
    }

    #[test]
    fn model_requires_block_of_interest() {
        let l = base();
        assert!(BlockModel::new(l.clone(), vec![4, 0, 0], vec![0, 3, 3]).is_err());
        assert!(BlockModel::new(l.clone(), vec![4, 0], vec![4, 3, 3]).is_err());
        let m = BlockModel::new(l, vec![4, 0, 0], vec![4, 3, 3]).unwrap();
        assert_eq!((m.num_seeds(), m.num_ambiguous(), m.num_vertices()), (4, 10, 14));
        assert_eq!(m.block_sizes(), vec![8, 3, 3]);
    }

    #[test]
    fn lambda_file_accepts_flat_and_nested() {
        let nested: LambdaFile = serde_json::from_str(r#"{"K":2,"lambda":[[0.1,0.2],[0.2,0.3]]}"#).unwrap();
        let flat: LambdaFile = serde_json::from_str(r#"{"K":2,"lambda":[0.1,0.2,0.2,0.3]}"#).unwrap();
        assert_eq!(nested.to_lambda::<f64>().unwrap(), flat.to_lambda::<f64>().unwrap());
        assert!(serde_json::from_str::<LambdaFile>(r#"{"K":2,"lambda":[],"x":1}"#).is_err());
    }
}
