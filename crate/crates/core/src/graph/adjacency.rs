//! Dense bit-packed adjacency for simple undirected graphs.

use crate::linalg::Matrix;
use crate::scalar::Scalar;

const WORD_BITS: usize = 64;

/// Symmetric 0/1 adjacency with an empty diagonal, one bit per ordered pair.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Adjacency {
    n: usize,
    words_per_row: usize,
    bits: Vec<u64>,
}

impl Adjacency {
    pub fn empty(n: usize) -> Self {
        let words_per_row = n.div_ceil(WORD_BITS);
        Adjacency {
            n,
            words_per_row,
            bits: vec![0; n * words_per_row],
        }
    }

    /// Builds from 0-based undirected pairs. Duplicates collapse; self-loops panic.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut adj = Adjacency::empty(n);
        for (i, j) in edges {
            adj.add_edge(i, j);
        }
        adj
    }

    pub fn complete(n: usize) -> Self {
        let mut adj = Adjacency::empty(n);
        for i in 0..n {
            for j in i + 1..n {
                adj.add_edge(i, j);
            }
        }
        adj
    }

    pub(crate) fn add_edge(&mut self, i: usize, j: usize) {
        assert!(i != j, "self-loop at vertex {i}");
        assert!(i < self.n && j < self.n, "vertex out of range");
        self.set_bit(i, j);
        self.set_bit(j, i);
    }

    #[inline]
    fn set_bit(&mut self, i: usize, j: usize) {
        self.bits[i * self.words_per_row + j / WORD_BITS] |= 1u64 << (j % WORD_BITS);
    }

    #[inline]
    pub fn num_vertices(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.words_per_row + j / WORD_BITS] >> (j % WORD_BITS) & 1 == 1
    }

    pub(crate) fn row_words(&self, i: usize) -> &[u64] {
        &self.bits[i * self.words_per_row..(i + 1) * self.words_per_row]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.row_words(i).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn num_edges(&self) -> usize {
        (0..self.n).map(|i| self.degree(i)).sum::<usize>() / 2
    }

    /// Neighbors of `i` in ascending order.
    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.row_words(i)
            .iter()
            .enumerate()
            .flat_map(|(wi, &word)| BitIter { word, base: wi * WORD_BITS })
    }

    /// Undirected edges `(i, j)` with `i < j`, in row-major order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |i| self.neighbors(i).filter(move |&j| j > i).map(move |j| (i, j)))
    }

    /// Dense 0/1 matrix.
    pub fn to_matrix<T: Scalar>(&self) -> Matrix<T> {
        let mut m = Matrix::zeros(self.n, self.n);
        for i in 0..self.n {
            let row = m.row_mut(i);
            for j in self.neighbors(i) {
                row[j] = T::one();
            }
        }
        m
    }

    /// Subgraph induced by `order`; vertex `k` of the result is `order[k]`.
    pub fn induced(&self, order: &[usize]) -> Adjacency {
        let mut out = Adjacency::empty(order.len());
        for (a, &i) in order.iter().enumerate() {
            for (b, &j) in order.iter().enumerate().skip(a + 1) {
                if self.has_edge(i, j) {
                    out.add_edge(a, b);
                }
            }
        }
        out
    }
}

impl std::fmt::Debug for Adjacency {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Adjacency")
            .field("n", &self.n)
            .field("edges", &self.num_edges())
            .finish()
    }
}

struct BitIter {
    word: u64,
    base: usize,
}

impl Iterator for BitIter {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.word == 0 {
            return None;
        }
        let tz = self.word.trailing_zeros() as usize;
        self.word &= self.word - 1;
        Some(self.base + tz)
    }
}
