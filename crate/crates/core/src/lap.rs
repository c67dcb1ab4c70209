//! Exact dense linear assignment.
//!
//! A shortest-augmenting-path Hungarian method produces an optimal
//! assignment and dual potentials. Among all assignments that are tight with
//! respect to those potentials (i.e. co-optimal), the lexicographically
//! smallest row-to-column map is then selected.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// `columns[i]` is the column assigned to row `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct Assignment<T> {
    pub columns: Vec<usize>,
    pub value: T,
}

/// Optimal assignment of rows to columns for a square cost matrix.
pub fn solve_lap<T: Scalar>(cost: &Matrix<T>, maximize: bool) -> Result<Assignment<T>> {
    if !cost.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "assignment needs a square matrix, got {} x {}",
            cost.rows(),
            cost.cols()
        )));
    }
    if !cost.is_finite() {
        return Err(Error::InvalidArgument("cost matrix has non-finite entries".into()));
    }
    let n = cost.rows();
    if n == 0 {
        return Ok(Assignment {
            columns: vec![],
            value: T::zero(),
        });
    }
    let c = if maximize { cost.scale(-T::one()) } else { cost.clone() };
    let (mut col_of_row, u, v) = hungarian(&c);
    let tol = T::epsilon() * T::of(1e4) * (T::one() + c.max_abs()) * T::of_usize(n);
    lexicographic_refine(&c, &u, &v, tol, &mut col_of_row);
    let value = col_of_row.iter().enumerate().map(|(i, &j)| cost[(i, j)]).sum();
    Ok(Assignment {
        columns: col_of_row,
        value,
    })
}

// Minimization. Returns the row->column map and potentials with
// `c[i][j] - u[i] - v[j] >= 0`, equality on the matching.
fn hungarian<T: Scalar>(c: &Matrix<T>) -> (Vec<usize>, Vec<T>, Vec<T>) {
    let n = c.rows();
    let inf = T::infinity();
    // 1-based with a virtual column 0
    let mut u = vec![T::zero(); n + 1];
    let mut v = vec![T::zero(); n + 1];
    let mut row_of = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    let mut minv = vec![inf; n + 1];
    let mut used = vec![false; n + 1];
    for i in 1..=n {
        row_of[0] = i;
        let mut j0 = 0usize;
        minv.iter_mut().for_each(|x| *x = inf);
        used.iter_mut().for_each(|x| *x = false);
        loop {
            used[j0] = true;
            let i0 = row_of[j0];
            let row = c.row(i0 - 1);
            let mut delta = inf;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = row[j - 1] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[row_of[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if row_of[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of[j0] = row_of[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut col_of_row = vec![0usize; n];
    for j in 1..=n {
        col_of_row[row_of[j] - 1] = j - 1;
    }
    (col_of_row, u[1..].to_vec(), v[1..].to_vec())
}

// Greedy over rows: give row i the smallest tight column for which the rows
// after it can still be perfectly matched on tight edges.
fn lexicographic_refine<T: Scalar>(c: &Matrix<T>, u: &[T], v: &[T], tol: T, col_of_row: &mut [usize]) {
    let n = col_of_row.len();
    let tight = |i: usize, j: usize| c[(i, j)] - u[i] - v[j] <= tol;
    let mut row_of_col = vec![0usize; n];
    for (i, &j) in col_of_row.iter().enumerate() {
        row_of_col[j] = i;
    }
    let mut via = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    for i in 0..n {
        let c0 = col_of_row[i];
        for j in 0..c0 {
            let r = row_of_col[j];
            if r < i || !tight(i, j) {
                continue;
            }
            // Row r gives up column j; look for an alternating path from r to c0
            // through rows after i.
            via.iter_mut().for_each(|x| *x = usize::MAX);
            queue.clear();
            queue.push_back(r);
            let mut found = false;
            'bfs: while let Some(x) = queue.pop_front() {
                for col in 0..n {
                    if col == j || via[col] != usize::MAX || !tight(x, col) {
                        continue;
                    }
                    if col != c0 && row_of_col[col] <= i {
                        continue;
                    }
                    via[col] = x;
                    if col == c0 {
                        found = true;
                        break 'bfs;
                    }
                    queue.push_back(row_of_col[col]);
                }
            }
            if !found {
                continue;
            }
            let mut col = c0;
            loop {
                let x = via[col];
                let next = col_of_row[x];
                col_of_row[x] = col;
                row_of_col[col] = x;
                if x == r {
                    break;
                }
                col = next;
            }
            col_of_row[i] = j;
            row_of_col[j] = i;
            break;
        }
    }
}
