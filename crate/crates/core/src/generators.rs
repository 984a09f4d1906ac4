//! Test-matrix and right-hand-side generators for the benchmark cases.

use crate::linalg::{DenseBlock, SparseMatrix};

/// Five-point Laplacian on a `k x k` grid (4 on the diagonal, -1 for each
/// grid neighbour); `n = k^2`, ordered row by row.
pub fn poisson(k: usize) -> SparseMatrix<f64> {
    let n = k * k;
    let mut t = Vec::with_capacity(5 * n);
    for r in 0..k {
        for c in 0..k {
            let i = r * k + c;
            if r > 0 {
                t.push((i, i - k, -1.0));
            }
            if c > 0 {
                t.push((i, i - 1, -1.0));
            }
            t.push((i, i, 4.0));
            if c + 1 < k {
                t.push((i, i + 1, -1.0));
            }
            if r + 1 < k {
                t.push((i, i + k, -1.0));
            }
        }
    }
    SparseMatrix::from_triplets(n, &t).expect("stencil entries are distinct")
}

/// Upper triangular with ones on the diagonal and `alpha` above it.
pub fn triw(n: usize, alpha: f64) -> SparseMatrix<f64> {
    let mut row_ptr = Vec::with_capacity(n + 1);
    let mut col_idx = Vec::with_capacity(n * (n + 1) / 2);
    let mut values = Vec::with_capacity(n * (n + 1) / 2);
    row_ptr.push(0);
    for i in 0..n {
        for j in i..n {
            col_idx.push(j);
            values.push(if i == j { 1.0 } else { alpha });
        }
        row_ptr.push(col_idx.len());
    }
    SparseMatrix::from_csr(n, row_ptr, col_idx, values).expect("valid by construction")
}

/// `diag(1, 2, ..., n)`.
pub fn diag_range(n: usize) -> SparseMatrix<f64> {
    SparseMatrix::from_diagonal(&(1..=n).map(|i| i as f64).collect::<Vec<_>>())
}

/// `diag(1, sqrt 2, ..., sqrt n)`, the principal square root of [`diag_range`].
pub fn diag_sqrt(n: usize) -> SparseMatrix<f64> {
    SparseMatrix::from_diagonal(&(1..=n).map(|i| (i as f64).sqrt()).collect::<Vec<_>>())
}

/// Tridiagonal `[-1, 2, -1]` stiffness matrix of a chain of `n` unit springs.
pub fn spring_chain(n: usize) -> SparseMatrix<f64> {
    let mut t = Vec::with_capacity(3 * n);
    for i in 0..n {
        if i > 0 {
            t.push((i, i - 1, -1.0));
        }
        t.push((i, i, 2.0));
        if i + 1 < n {
            t.push((i, i + 1, -1.0));
        }
    }
    SparseMatrix::from_triplets(n, &t).expect("distinct entries")
}

/// Right-hand-side patterns used by the benchmark cases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RhsKind {
    /// `[cos 1, cos 2, ..., cos n]`
    Cos,
    /// `[sin 1, sin 2, ..., sin n]`
    Sin,
    Ones,
    /// `[1, 0, ..., 0, 1]`
    Ends,
}

pub fn rhs(kind: RhsKind, n: usize) -> DenseBlock<f64> {
    let col = match kind {
        RhsKind::Cos => (1..=n).map(|i| (i as f64).cos()).collect(),
        RhsKind::Sin => (1..=n).map(|i| (i as f64).sin()).collect(),
        RhsKind::Ones => vec![1.0; n],
        RhsKind::Ends => {
            let mut v = vec![0.0; n];
            if n > 0 {
                v[0] = 1.0;
                v[n - 1] = 1.0;
            }
            v
        }
    };
    DenseBlock::from_column(col)
}
