//! Small dense linear algebra: partial-pivot elimination on row-major
//! matrices. Cone dimensions in this crate are tiny, so no external solver
//! is needed.

// index arithmetic reads better than iterator chains in elimination kernels
#![allow(clippy::needless_range_loop)]

pub(crate) type Matrix = Vec<Vec<f64>>;

const PIVOT_TOL: f64 = 1e-12;

/// Solve A x = b for square A. Returns `None` when A is singular.
pub(crate) fn solve(a: &Matrix, b: &[f64]) -> Option<Vec<f64>> {
    let n = a.len();
    if n == 0 || a.iter().any(|row| row.len() != n) || b.len() != n {
        return None;
    }
    // augmented elimination
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .zip(b)
        .map(|(row, &bi)| {
            let mut r = row.clone();
            r.push(bi);
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| {
            m[i][col]
                .abs()
                .partial_cmp(&m[j][col].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if m[pivot][col].abs() < PIVOT_TOL {
            return None;
        }
        m.swap(col, pivot);
        for row in 0..n {
            if row == col {
                continue;
            }
            let factor = m[row][col] / m[col][col];
            for k in col..=n {
                m[row][k] -= factor * m[col][k];
            }
        }
    }
    Some((0..n).map(|i| m[i][n] / m[i][i]).collect())
}

/// Inverse of a square matrix, column by column.
pub(crate) fn invert(a: &Matrix) -> Option<Matrix> {
    let n = a.len();
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        cols.push(solve(a, &e)?);
    }
    // transpose the list of solution columns into a row-major inverse
    let mut inv = vec![vec![0.0; n]; n];
    for (j, col) in cols.iter().enumerate() {
        for i in 0..n {
            inv[i][j] = col[i];
        }
    }
    Some(inv)
}

/// Numerical rank via row elimination with relative pivoting tolerance.
pub(crate) fn rank(a: &Matrix, tol: f64) -> usize {
    if a.is_empty() {
        return 0;
    }
    let rows = a.len();
    let cols = a[0].len();
    let scale = a
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |m, x| m.max(x.abs()))
        .max(1.0);
    let mut m = a.clone();
    let mut r = 0;
    for col in 0..cols {
        let pivot = (r..rows).max_by(|&i, &j| {
            m[i][col]
                .abs()
                .partial_cmp(&m[j][col].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let pivot = match pivot {
            Some(p) if m[p][col].abs() > tol * scale => p,
            _ => continue,
        };
        m.swap(r, pivot);
        for row in (r + 1)..rows {
            let factor = m[row][col] / m[r][col];
            for k in col..cols {
                m[row][k] -= factor * m[r][k];
            }
        }
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

/// Least-squares / minimum-norm solution of M y = b via normal equations.
///
/// For more rows than columns solves MᵀM y = Mᵀb; for fewer rows returns the
/// minimum-norm solution y = Mᵀ(MMᵀ)⁻¹b.
pub(crate) fn least_squares(m: &Matrix, b: &[f64]) -> Option<Vec<f64>> {
    let rows = m.len();
    if rows == 0 || b.len() != rows {
        return None;
    }
    let cols = m[0].len();
    if rows >= cols {
        let mut mtm = vec![vec![0.0; cols]; cols];
        let mut mtb = vec![0.0; cols];
        for i in 0..cols {
            for j in 0..cols {
                mtm[i][j] = (0..rows).map(|k| m[k][i] * m[k][j]).sum();
            }
            mtb[i] = (0..rows).map(|k| m[k][i] * b[k]).sum();
        }
        solve(&mtm, &mtb)
    } else {
        let mut mmt = vec![vec![0.0; rows]; rows];
        for i in 0..rows {
            for j in 0..rows {
                mmt[i][j] = (0..cols).map(|k| m[i][k] * m[j][k]).sum();
            }
        }
        let w = solve(&mmt, b)?;
        let mut y = vec![0.0; cols];
        for (i, wi) in w.iter().enumerate() {
            for k in 0..cols {
                y[k] += wi * m[i][k];
            }
        }
        Some(y)
    }
}
