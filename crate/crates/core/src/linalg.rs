//! Dense complex elimination for the small systems of the moment problem.

#![allow(clippy::needless_range_loop)]

use crate::dd::CDd;
use crate::C64;

/// A pivot fell below the threshold during elimination.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct PivotFailure {
    pub column: usize,
    pub pivot: f64,
    pub threshold: f64,
}

fn max_entry(a: &[Vec<C64>]) -> f64 {
    a.iter()
        .flat_map(|row| row.iter().map(|v| v.norm()))
        .fold(0.0, f64::max)
}

/// Solve `a x = b` by Gaussian elimination with partial pivoting. A pivot
/// below `rel_tol` times the largest row max-norm is treated as singular.
pub(crate) fn solve_pivoted(
    mut a: Vec<Vec<C64>>,
    mut b: Vec<C64>,
    rel_tol: f64,
) -> Result<Vec<C64>, PivotFailure> {
    let n = b.len();
    let threshold = rel_tol * max_entry(&a);
    for col in 0..n {
        let (best, pivot) = (col..n)
            .map(|r| (r, a[r][col].norm()))
            .fold((col, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if pivot.is_nan() || pivot <= threshold {
            return Err(PivotFailure {
                column: col,
                pivot,
                threshold,
            });
        }
        a.swap(col, best);
        b.swap(col, best);
        for r in col + 1..n {
            let factor = a[r][col] / a[col][col];
            if factor == C64::new(0.0, 0.0) {
                continue;
            }
            for k in col..n {
                let v = a[col][k];
                a[r][k] -= factor * v;
            }
            let v = b[col];
            b[r] -= factor * v;
        }
    }
    let mut x = vec![C64::new(0.0, 0.0); n];
    for row in (0..n).rev() {
        let tail: C64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - tail) / a[row][row];
    }
    Ok(x)
}

/// [`solve_pivoted`] followed by `steps` rounds of iterative refinement
/// with residuals accumulated in double-double.
pub(crate) fn solve_refined(
    a: &[Vec<C64>],
    b: &[C64],
    rel_tol: f64,
    steps: usize,
) -> Result<Vec<C64>, PivotFailure> {
    let mut x = solve_pivoted(a.to_vec(), b.to_vec(), rel_tol)?;
    for _ in 0..steps {
        let residual: Vec<C64> = a
            .iter()
            .zip(b)
            .map(|(row, bi)| {
                row.iter()
                    .zip(&x)
                    .fold(CDd::from_c64(*bi), |acc, (aij, xj)| acc - CDd::product(*aij, *xj))
                    .to_c64()
            })
            .collect();
        let correction = solve_pivoted(a.to_vec(), residual, rel_tol)?;
        for (xi, di) in x.iter_mut().zip(correction) {
            *xi += di;
        }
    }
    Ok(x)
}

/// Numerical rank by elimination with complete pivoting, stopping once the
/// largest remaining entry is below `rel_tol` times the largest row max-norm.
pub(crate) fn numerical_rank(mut a: Vec<Vec<C64>>, rel_tol: f64) -> usize {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let threshold = rel_tol * max_entry(&a);
    let mut rank = 0;
    while rank < rows.min(cols) {
        let mut best = (rank, rank, 0.0);
        for r in rank..rows {
            for c in rank..cols {
                let v = a[r][c].norm();
                if v > best.2 {
                    best = (r, c, v);
                }
            }
        }
        if best.2 <= threshold || best.2 == 0.0 || best.2.is_nan() {
            break;
        }
        a.swap(rank, best.0);
        for row in a.iter_mut() {
            row.swap(rank, best.1);
        }
        for r in rank + 1..rows {
            let factor = a[r][rank] / a[rank][rank];
            for c in rank..cols {
                let v = a[rank][c];
                a[r][c] -= factor * v;
            }
        }
        rank += 1;
    }
    rank
}

/// Pivots of elimination without row exchanges on a real symmetric matrix;
/// these are the ratios of consecutive leading principal minors.
pub(crate) fn leading_pivots(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    let mut pivots = Vec::with_capacity(n);
    for col in 0..n {
        let pivot = a[col][col];
        pivots.push(pivot);
        if pivot == 0.0 {
            break;
        }
        for r in col + 1..n {
            let factor = a[r][col] / pivot;
            for k in col..n {
                let v = a[col][k];
                a[r][k] -= factor * v;
            }
        }
    }
    pivots
}
