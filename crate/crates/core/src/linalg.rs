//! Small exact linear algebra over the rationals.
//!
//! Systems here are tiny (dimension at most the number of points being
//! configured), so plain Gaussian elimination with exact pivots is the
//! right tool.

use crate::rational::Rational;
use num_traits::Zero;

/// Solves the square system `mat * x = rhs` exactly.
///
/// Returns `None` when the matrix is singular. A 0-dimensional system has
/// the empty solution.
pub fn solve_square(mat: &[Vec<Rational>], rhs: &[Rational]) -> Option<Vec<Rational>> {
    let n = mat.len();
    debug_assert_eq!(rhs.len(), n);
    let mut a: Vec<Vec<Rational>> = mat
        .iter()
        .zip(rhs)
        .map(|(row, b)| {
            debug_assert_eq!(row.len(), n);
            let mut r = row.clone();
            r.push(b.clone());
            r
        })
        .collect();

    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let factor = &a[r][col] / &a[col][col];
            for c in col..=n {
                let t = &a[col][c] * &factor;
                a[r][c] -= t;
            }
        }
    }

    let mut x = vec![Rational::zero(); n];
    for row in (0..n).rev() {
        let mut acc = a[row][n].clone();
        for c in row + 1..n {
            acc -= &a[row][c] * &x[c];
        }
        x[row] = acc / &a[row][row];
    }
    Some(x)
}

/// Rank of a rational matrix given as rows.
pub fn rank(rows: &[Vec<Rational>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let cols = rows[0].len();
    let mut a: Vec<Vec<Rational>> = rows.to_vec();
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..a.len()).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(rank, pivot);
        for r in rank + 1..a.len() {
            if a[r][col].is_zero() {
                continue;
            }
            let factor = &a[r][col] / &a[rank][col];
            for c in col..cols {
                let t = &a[rank][c] * &factor;
                a[r][c] -= t;
            }
        }
        rank += 1;
        if rank == a.len() {
            break;
        }
    }
    rank
}

/// Rank of an integer matrix (entries are tiny, so promote to rationals).
pub fn rank_int(rows: &[&[i64]]) -> usize {
    let rows: Vec<Vec<Rational>> = rows
        .iter()
        .map(|r| r.iter().map(|&v| crate::rational::rat_int(v)).collect())
        .collect();
    rank(&rows)
}

/// All `k`-element index combinations of `0..m` in lexicographic order.
pub fn combinations(m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > m {
        return out;
    }
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        // advance
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] != i + m - k {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}
