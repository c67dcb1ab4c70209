//! Seeded graph matching: approximately maximize `<A, P B P^T>` over
//! permutations `P` that fix the first `m` (seed) vertices.
//!
//! The ambiguous block of `P` is relaxed to the doubly stochastic matrices
//! and optimized by Frank-Wolfe: each step direction is an exact linear
//! assignment on the gradient, and the step length maximizes the objective,
//! a quadratic in the step, on `[0, 1]`.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{BlockAssignment, BlockModel};
use crate::lap::solve_lap;
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// Bijection on all vertices that is the identity on the seeds.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation {
    mapping: Vec<usize>,
}

impl Permutation {
    pub fn new(mapping: Vec<usize>, num_seeds: usize) -> Result<Self> {
        let mut seen = vec![false; mapping.len()];
        for &x in &mapping {
            if x >= mapping.len() || std::mem::replace(&mut seen[x], true) {
                return Err(Error::InvalidArgument("mapping is not a bijection".into()));
            }
        }
        if mapping.iter().take(num_seeds).enumerate().any(|(i, &x)| i != x) {
            return Err(Error::InvalidArgument("mapping moves a seed".into()));
        }
        Ok(Permutation { mapping })
    }

    fn from_ambiguous(m: usize, ambiguous: &[usize]) -> Self {
        Permutation {
            mapping: (0..m).chain(ambiguous.iter().map(|&j| m + j)).collect(),
        }
    }

    /// `P[i][mapping[i]] = 1`: vertex `i` of the graph is matched to position `mapping[i]` of `B`.
    pub fn mapping(&self) -> &[usize] {
        &self.mapping
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.mapping[i]
    }
}

/// Nonnegative square matrix with unit row and column sums.
#[derive(Clone, Debug, PartialEq)]
pub struct DoublyStochasticMatrix<T>(Matrix<T>);

impl<T: Scalar> DoublyStochasticMatrix<T> {
    /// Every entry `1/n`.
    pub fn barycenter(n: usize) -> Self {
        DoublyStochasticMatrix(Matrix::filled(n, n, T::one() / T::of_usize(n.max(1))))
    }

    /// Checks the row/column sums to `tol` and clamps tiny negatives to zero.
    pub fn new(mut m: Matrix<T>, tol: T) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch("doubly stochastic matrix must be square".into()));
        }
        let n = m.rows();
        for i in 0..n {
            for j in 0..n {
                let x = m[(i, j)];
                if x < T::of(-1e-12) {
                    return Err(Error::InvalidArgument(format!("negative entry {x} at ({i}, {j})")));
                }
                if x < T::zero() {
                    m[(i, j)] = T::zero();
                }
            }
        }
        for i in 0..n {
            let row: T = m.row(i).iter().copied().sum();
            let col: T = (0..n).map(|r| m[(r, i)]).sum();
            if (row - T::one()).abs() > tol || (col - T::one()).abs() > tol {
                return Err(Error::InvalidArgument(format!("line {i} does not sum to one")));
            }
        }
        Ok(DoublyStochasticMatrix(m))
    }

    pub fn as_matrix(&self) -> &Matrix<T> {
        &self.0
    }
}

/// Log-odds target matrix for likelihood matching, with the reference
/// assignment its rows and columns are laid out by.
#[derive(Clone, Debug, PartialEq)]
pub struct LogOddsMatrix<T> {
    pub matrix: Matrix<T>,
    pub reference: BlockAssignment,
}

/// `B[i][j] = log(p / (1 - p))` with `p = lambda[b'(i)][b'(j)]` (clamped),
/// where `b'` keeps the observed seed labels and places the ambiguous
/// positions contiguously: block one first, then block two, and so on.
pub fn build_logodds_matrix<T: Scalar>(model: &BlockModel<T>, seed_labels: &[usize]) -> LogOddsMatrix<T> {
    let reference =
        BlockAssignment::with_contiguous_ambiguous(seed_labels, model.ambiguous_sizes(), model.num_blocks());
    let w = model.log_weights();
    let n = reference.len();
    let matrix = Matrix::from_fn(n, n, |i, j| w.log_odds(reference.get(i), reference.get(j)));
    LogOddsMatrix { matrix, reference }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SgmConfig {
    pub max_iter: usize,
    /// Stop once the relative change of the relaxed objective falls below this.
    pub tol: f64,
    /// Number of starting points. The first is the barycenter, later ones
    /// are uniformly random permutation matrices.
    pub restarts: usize,
    /// Seeds the random starting points of restarts after the first.
    pub rng_seed: u64,
    /// Keep every relaxed iterate in the result (for inspection).
    pub record_iterates: bool,
}

impl Default for SgmConfig {
    fn default() -> Self {
        SgmConfig {
            max_iter: 20,
            tol: 1e-6,
            restarts: 1,
            rng_seed: 0,
            record_iterates: false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SgmResult<T> {
    pub permutation: Permutation,
    /// `<A, P B P^T>` at the returned permutation.
    pub objective: T,
    /// Relaxed objective at the start and after each iteration, for the best restart.
    pub relaxed_objectives: Vec<T>,
    pub iterations: usize,
    pub relaxed: DoublyStochasticMatrix<T>,
    pub iterates: Vec<DoublyStochasticMatrix<T>>,
}

/// The seeded objective restricted to the ambiguous block `Q`:
/// `f(Q) = c + <L, Q> + <A22, Q B22 Q^T>`.
#[derive(Clone, Debug)]
pub struct SeededRelaxation<T> {
    constant: T,
    linear: Matrix<T>,
    a22: Matrix<T>,
    b22: Matrix<T>,
    a22_t: Matrix<T>,
    b22_t: Matrix<T>,
    symmetric: bool,
}

impl<T: Scalar> SeededRelaxation<T> {
    pub fn new(a: &Matrix<T>, b: &Matrix<T>, num_seeds: usize) -> Result<Self> {
        if !a.is_square() || !b.is_square() || a.rows() != b.rows() {
            return Err(Error::DimensionMismatch(format!(
                "A is {} x {}, B is {} x {}",
                a.rows(),
                a.cols(),
                b.rows(),
                b.cols()
            )));
        }
        let total = a.rows();
        let m = num_seeds;
        if m >= total {
            return Err(Error::DimensionMismatch(format!("{m} seeds leave no vertex to match among {total}")));
        }
        let a11 = a.block(0, m, 0, m);
        let b11 = b.block(0, m, 0, m);
        let a12 = a.block(0, m, m, total);
        let b12 = b.block(0, m, m, total);
        let a21 = a.block(m, total, 0, m);
        let b21 = b.block(m, total, 0, m);
        let a22 = a.block(m, total, m, total);
        let b22 = b.block(m, total, m, total);
        let linear = a21.matmul(&b21.transpose()).add(&a12.transpose().matmul(&b12));
        let a22_t = a22.transpose();
        let b22_t = b22.transpose();
        let symmetric = a22 == a22_t && b22 == b22_t;
        Ok(SeededRelaxation {
            constant: a11.dot(&b11),
            linear,
            a22,
            b22,
            a22_t,
            b22_t,
            symmetric,
        })
    }

    pub fn size(&self) -> usize {
        self.a22.rows()
    }

    // (A22 Q B22^T, A22^T Q B22)
    fn products(&self, q: &Matrix<T>) -> (Matrix<T>, Matrix<T>) {
        let m1 = self.a22.matmul(&q.matmul(&self.b22_t));
        let m2 = if self.symmetric {
            m1.clone()
        } else {
            self.a22_t.matmul(&q.matmul(&self.b22))
        };
        (m1, m2)
    }

    pub fn objective(&self, q: &Matrix<T>) -> T {
        let (m1, _) = self.products(q);
        self.constant + self.linear.dot(q) + m1.dot(q)
    }

    pub fn gradient(&self, q: &Matrix<T>) -> Matrix<T> {
        let (m1, m2) = self.products(q);
        self.linear.add(&m1).add(&m2)
    }

    /// Objective at a permutation of the ambiguous block (`sigma[i]` is row i's column).
    pub fn permutation_objective(&self, sigma: &[usize]) -> T {
        let n = sigma.len();
        let mut total = self.constant;
        for i in 0..n {
            total += self.linear[(i, sigma[i])];
            let arow = self.a22.row(i);
            let brow = self.b22.row(sigma[i]);
            for j in 0..n {
                if arow[j] != T::zero() {
                    total += arow[j] * brow[sigma[j]];
                }
            }
        }
        total
    }
}

/// Seeded graph matching of `a` against `b` with the first `num_seeds`
/// vertices held fixed.
///
/// The returned permutation is the best (by the exact objective) among the
/// projection of the starting point, every Frank-Wolfe direction, and the
/// projection of the final relaxed iterate.
pub fn sgm_match<T: Scalar>(
    a: &Matrix<T>,
    b: &Matrix<T>,
    num_seeds: usize,
    config: &SgmConfig,
) -> Result<SgmResult<T>> {
    let relax = SeededRelaxation::new(a, b, num_seeds)?;
    let n = relax.size();
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let mut best: Option<SgmResult<T>> = None;
    for restart in 0..config.restarts.max(1) {
        let start = if restart == 0 {
            DoublyStochasticMatrix::barycenter(n).0
        } else {
            random_start(&mut rng, n)
        };
        let run = frank_wolfe(&relax, start, num_seeds, config)?;
        if best.as_ref().is_none_or(|b| run.objective > b.objective) {
            best = Some(run);
        }
    }
    Ok(best.expect("at least one restart"))
}

fn frank_wolfe<T: Scalar>(
    relax: &SeededRelaxation<T>,
    start: Matrix<T>,
    m: usize,
    config: &SgmConfig,
) -> Result<SgmResult<T>> {
    let n = relax.size();
    let tol = T::of(config.tol);
    let mut q = start;
    let mut iterates = Vec::new();
    if config.record_iterates {
        iterates.push(DoublyStochasticMatrix(q.clone()));
    }

    let mut best_sigma = solve_lap(&q, true)?.columns;
    let mut best_value = relax.permutation_objective(&best_sigma);
    let consider = |sigma: Vec<usize>, best_sigma: &mut Vec<usize>, best_value: &mut T| {
        let value = relax.permutation_objective(&sigma);
        if value > *best_value {
            *best_value = value;
            *best_sigma = sigma;
        }
    };

    let (mut m1, mut m2) = relax.products(&q);
    let mut f = relax.constant + relax.linear.dot(&q) + m1.dot(&q);
    let mut trace = vec![f];
    let mut iterations = 0;
    while iterations < config.max_iter {
        iterations += 1;
        let grad = relax.linear.add(&m1).add(&m2);
        let sigma = solve_lap(&grad, true)?.columns;

        let on_sigma = |mat: &Matrix<T>| -> T { sigma.iter().enumerate().map(|(i, &j)| mat[(i, j)]).sum() };
        let mut dbd = T::zero();
        for i in 0..n {
            let arow = relax.a22.row(i);
            let brow = relax.b22.row(sigma[i]);
            for j in 0..n {
                if arow[j] != T::zero() {
                    dbd += arow[j] * brow[sigma[j]];
                }
            }
        }
        // f(Q + t R) = f + t * lin + t^2 * quad, R = D - Q
        let quad = dbd - on_sigma(&m1) - on_sigma(&m2) + m1.dot(&q);
        let lin = on_sigma(&grad) - grad.dot(&q);
        let step = line_search(quad, lin);

        consider(sigma.clone(), &mut best_sigma, &mut best_value);

        let f_prev = f;
        if step > T::zero() {
            let keep = T::one() - step;
            for i in 0..n {
                let row = q.row_mut(i);
                row.iter_mut().for_each(|x| *x *= keep);
                row[sigma[i]] += step;
            }
            let products = relax.products(&q);
            m1 = products.0;
            m2 = products.1;
            f = relax.constant + relax.linear.dot(&q) + m1.dot(&q);
        }
        trace.push(f);
        if config.record_iterates {
            iterates.push(DoublyStochasticMatrix(q.clone()));
        }
        let scale = f_prev.abs().max(T::min_positive_value());
        if (f - f_prev).abs() <= tol * scale {
            break;
        }
    }

    consider(solve_lap(&q, true)?.columns, &mut best_sigma, &mut best_value);
    Ok(SgmResult {
        permutation: Permutation::from_ambiguous(m, &best_sigma),
        objective: best_value,
        relaxed_objectives: trace,
        iterations,
        relaxed: DoublyStochasticMatrix(q),
        iterates,
    })
}

/// Maximizer on `[0, 1]` of `t * lin + t^2 * quad`.
fn line_search<T: Scalar>(quad: T, lin: T) -> T {
    if quad < T::zero() {
        (-lin / (T::of(2.0) * quad)).max(T::zero()).min(T::one())
    } else if quad + lin > T::zero() {
        // convex or linear: best endpoint
        T::one()
    } else {
        T::zero()
    }
}

fn random_start<T: Scalar>(rng: &mut ChaCha8Rng, n: usize) -> Matrix<T> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    Matrix::from_fn(n, n, |i, j| if p[i] == j { T::one() } else { T::zero() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Lambda;
    use rand::Rng;

    fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> Matrix<f64> {
        Matrix::from_fn(n, n, |_, _| rng.gen::<f64>() * 2.0 - 1.0)
    }

    #[test]
    fn logodds_entries() {
        let lambda = Lambda::<f64>::from_rows(&[vec![0.5, 0.8], vec![0.8, 1.0]]).unwrap();
        let model = BlockModel::new(lambda, vec![1, 0], vec![1, 2]).unwrap();
        let b = build_logodds_matrix(&model, &[1]);
        assert_eq!(b.reference.labels(), &[1, 0, 1, 1]);
        assert!((b.matrix[(1, 1)]).abs() < 1e-15);
        assert!((b.matrix[(0, 1)] - 4f64.ln()).abs() < 1e-12);
        assert!((b.matrix[(0, 2)] - ((1.0 - 1e-6) / 1e-6f64).ln()).abs() < 1e-6);
        assert!((b.matrix[(0, 2)] - 13.815509).abs() < 1e-6);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for trial in 0..5 {
            let total = 8;
            let m = trial % 3;
            let a = random_matrix(&mut rng, total);
            let b = random_matrix(&mut rng, total);
            let relax = SeededRelaxation::new(&a, &b, m).unwrap();
            let n = total - m;
            let q = random_matrix(&mut rng, n);
            let g = relax.gradient(&q);
            let h = 1e-5;
            for i in 0..n {
                for j in 0..n {
                    let mut plus = q.clone();
                    plus[(i, j)] += h;
                    let mut minus = q.clone();
                    minus[(i, j)] -= h;
                    let fd = (relax.objective(&plus) - relax.objective(&minus)) / (2.0 * h);
                    let rel = (fd - g[(i, j)]).abs() / g[(i, j)].abs().max(1e-8);
                    assert!(rel < 1e-4, "({i}, {j}): {fd} vs {}", g[(i, j)]);
                }
            }
        }
    }

    #[test]
    fn permutation_objective_matches_full_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_matrix(&mut rng, 6);
        let b = random_matrix(&mut rng, 6);
        let relax = SeededRelaxation::new(&a, &b, 2).unwrap();
        let sigma = [2, 0, 3, 1];
        let mapping = [0, 1, 4, 2, 5, 3];
        let p = Matrix::from_fn(6, 6, |i, j| if mapping[i] == j { 1.0 } else { 0.0 });
        let full = a.dot(&p.matmul(&b).matmul(&p.transpose()));
        assert!((relax.permutation_objective(&sigma) - full).abs() < 1e-12);
        let q = Matrix::from_fn(4, 4, |i, j| if sigma[i] == j { 1.0 } else { 0.0 });
        assert!((relax.objective(&q) - full).abs() < 1e-12);
    }

    #[test]
    fn self_match_recovers_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..5 {
            let a = random_matrix(&mut rng, 9);
            let res = sgm_match(&a, &a, 3, &SgmConfig::default()).unwrap();
            assert_eq!(res.permutation.mapping(), &(0..9).collect::<Vec<_>>()[..]);
            assert!((res.objective - a.dot(&a)).abs() < 1e-9);
        }
    }

    #[test]
    fn single_ambiguous_vertex() {
        let a = Matrix::from_vec(2, 2, vec![0.0, 1.0, 1.0, 0.0]);
        let res = sgm_match(&a, &a, 1, &SgmConfig::default()).unwrap();
        assert_eq!(res.permutation.mapping(), &[0, 1]);
    }

    #[test]
    fn relaxed_objective_monotone_and_iterates_stochastic() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..10 {
            let a = random_matrix(&mut rng, 12);
            let b = random_matrix(&mut rng, 12);
            let config = SgmConfig {
                record_iterates: true,
                ..SgmConfig::default()
            };
            let res = sgm_match(&a, &b, 2, &config).unwrap();
            assert!(res.relaxed_objectives.windows(2).all(|w| w[1] >= w[0] - 1e-9));
            for it in &res.iterates {
                assert!(DoublyStochasticMatrix::new(it.as_matrix().clone(), 1e-9).is_ok());
            }
            let start = SeededRelaxation::new(&a, &b, 2).unwrap().permutation_objective(&(0..10).collect::<Vec<_>>());
            assert!(res.objective >= start);
        }
    }

    #[test]
    fn restarts_never_hurt() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let a = random_matrix(&mut rng, 10);
        let b = random_matrix(&mut rng, 10);
        let one = sgm_match(&a, &b, 1, &SgmConfig::default()).unwrap();
        let many = sgm_match(&a, &b, 1, &SgmConfig { restarts: 4, ..SgmConfig::default() }).unwrap();
        assert!(many.objective >= one.objective);
    }

    #[test]
    fn dimension_errors() {
        let a = Matrix::<f64>::zeros(3, 3);
        let b = Matrix::<f64>::zeros(4, 4);
        assert!(sgm_match(&a, &b, 1, &SgmConfig::default()).is_err());
        assert!(sgm_match(&a, &a, 3, &SgmConfig::default()).is_err());
    }

    #[test]
    fn line_search_cases() {
        assert_eq!(line_search(-1.0, 1.0), 0.5);
        assert_eq!(line_search(-1.0, 5.0), 1.0);
        assert_eq!(line_search(0.0, 1.0), 1.0);
        assert_eq!(line_search(0.0, -1.0), 0.0);
        assert_eq!(line_search(0.0, 0.0), 0.0);
        assert_eq!(line_search(1.0, -0.5), 1.0);
    }

    #[test]
    fn permutation_validation() {
        assert!(Permutation::new(vec![1, 0, 2], 1).is_err());
        assert!(Permutation::new(vec![0, 0, 2], 0).is_err());
        assert!(Permutation::new(vec![0, 2, 1], 1).is_ok());
    }
}
