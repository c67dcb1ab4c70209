#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use vn_core::graph::{log_likelihood, sample_sbm, Adjacency, BlockAssignment, BlockModel, LabeledGraph, Lambda};

/// Lambda with entries `num / 20`, symmetric, in `[1/20, 19/20]`.
pub fn random_rational_lambda(rng: &mut ChaCha8Rng, k: usize) -> Vec<Vec<i64>> {
    let mut num = vec![vec![0i64; k]; k];
    for a in 0..k {
        for b in a..k {
            let x = rng.gen_range(1..20);
            num[a][b] = x;
            num[b][a] = x;
        }
    }
    num
}

pub fn lambda_from_twentieths(num: &[Vec<i64>]) -> Lambda<f64> {
    Lambda::from_rows(&num.iter().map(|r| r.iter().map(|&x| x as f64 / 20.0).collect()).collect::<Vec<_>>())
        .unwrap()
}

/// Random sizes with `n <= max_n` ambiguous vertices and `n1 >= 1`.
pub fn random_sizes(rng: &mut ChaCha8Rng, k: usize, max_n: usize, max_m: usize) -> (Vec<usize>, Vec<usize>) {
    loop {
        let n_sizes: Vec<usize> = (0..k).map(|_| rng.gen_range(0..=max_n)).collect();
        let n: usize = n_sizes.iter().sum();
        if n_sizes[0] >= 1 && n <= max_n {
            let m_sizes = (0..k).map(|_| rng.gen_range(0..=max_m)).collect();
            return (m_sizes, n_sizes);
        }
    }
}

/// Sampled graph whose hidden labels are the contiguous layout.
pub fn sample(model: &BlockModel<f64>, seed: u64) -> LabeledGraph {
    sample_sbm(model, &BlockAssignment::contiguous(model), seed).unwrap()
}

/// Every label vector on `n` vertices over `k` blocks with the given counts,
/// found by filtering all `k^n` vectors.
pub fn all_partitions(k: usize, sizes: &[usize]) -> Vec<Vec<usize>> {
    let n: usize = sizes.iter().sum();
    let mut out = Vec::new();
    let total = k.pow(n as u32);
    for code in 0..total {
        let mut c = code;
        let labels: Vec<usize> = (0..n)
            .map(|_| {
                let l = c % k;
                c /= k;
                l
            })
            .collect();
        let counts: Vec<usize> = (0..k).map(|b| labels.iter().filter(|&&l| l == b).count()).collect();
        if counts == sizes {
            out.push(labels);
        }
    }
    out
}

/// Exact conditional probabilities from products of raw edge probabilities.
pub fn rational_block1_probabilities(
    adj: &Adjacency,
    seed_labels: &[usize],
    twentieths: &[Vec<i64>],
    sizes: &[usize],
) -> Vec<BigRational> {
    let k = twentieths.len();
    let m = seed_labels.len();
    let total = adj.num_vertices();
    let n = total - m;
    let p = |a: usize, b: usize| BigRational::new(BigInt::from(twentieths[a][b]), BigInt::from(20));
    let one = BigRational::from_integer(BigInt::from(1));
    let mut numer = vec![BigRational::from_integer(BigInt::from(0)); n];
    let mut denom = BigRational::from_integer(BigInt::from(0));
    for part in all_partitions(k, sizes) {
        let label = |v: usize| if v < m { seed_labels[v] } else { part[v - m] };
        let mut w = one.clone();
        for i in 0..total {
            for j in i + 1..total {
                let q = p(label(i), label(j));
                w *= if adj.has_edge(i, j) { q } else { &one - q };
            }
        }
        for v in 0..n {
            if part[v] == 0 {
                numer[v] += &w;
            }
        }
        denom += &w;
    }
    numer.into_iter().map(|x| x / &denom).collect()
}

pub fn to_f64(x: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap()
}

/// Largest log-likelihood over all feasible assignments of the ambiguous vertices.
pub fn exhaustive_max_log_likelihood(graph: &LabeledGraph, model: &BlockModel<f64>) -> f64 {
    let mut best = f64::NEG_INFINITY;
    let mut labels = graph.seed_labels().to_vec();
    let m = labels.len();
    labels.resize(graph.num_vertices(), 0);
    for part in all_partitions(model.num_blocks(), model.ambiguous_sizes()) {
        labels[m..].copy_from_slice(&part);
        let b = BlockAssignment::new(labels.clone(), model.num_blocks()).unwrap();
        best = best.max(log_likelihood(graph, &b, model).unwrap());
    }
    best
}

pub fn small_scale_model() -> BlockModel<f64> {
    BlockModel::new(base_lambda(), vec![4, 0, 0], vec![4, 3, 3]).unwrap()
}

pub fn base_lambda() -> Lambda<f64> {
    Lambda::from_rows(&[vec![0.5, 0.3, 0.4], vec![0.3, 0.8, 0.6], vec![0.4, 0.6, 0.3]]).unwrap()
}
