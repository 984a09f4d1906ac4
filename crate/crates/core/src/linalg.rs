//! Sparse operator and dense block containers plus the primitive products,
//! norms and traces the rest of the crate is built on.

use num_complex::Complex64;

use crate::error::{FunmvError, Result};
use crate::scalar::Scalar;

/// Running count of matrix-vector products. One product of `A` with an
/// `n x n0` block adds `n0`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MatvecCounter {
    count: u64,
}

impl MatvecCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self) -> u64 {
        self.count
    }

    pub fn add(&mut self, n: u64) {
        self.count += n;
    }
}

/// Square sparse matrix in compressed sparse row form.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix<F> {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<F>,
}

impl<F: Scalar> SparseMatrix<F> {
    /// Builds from raw CSR arrays, validating the structure.
    pub fn from_csr(n: usize, row_ptr: Vec<usize>, col_idx: Vec<usize>, values: Vec<F>) -> Result<Self> {
        if row_ptr.len() != n + 1 {
            return Err(FunmvError::InvalidInput(format!(
                "row_ptr has length {}, expected {}",
                row_ptr.len(),
                n + 1
            )));
        }
        if row_ptr[0] != 0 || row_ptr[n] != col_idx.len() || col_idx.len() != values.len() {
            return Err(FunmvError::InvalidInput(
                "row_ptr endpoints do not match the number of stored entries".into(),
            ));
        }
        for i in 0..n {
            let (lo, hi) = (row_ptr[i], row_ptr[i + 1]);
            if lo > hi {
                return Err(FunmvError::InvalidInput(format!("row_ptr decreases at row {i}")));
            }
            let row = &col_idx[lo..hi];
            if row.iter().any(|&j| j >= n) {
                return Err(FunmvError::InvalidInput(format!(
                    "column index out of range in row {i}"
                )));
            }
            if row.windows(2).any(|w| w[0] >= w[1]) {
                return Err(FunmvError::InvalidInput(format!(
                    "columns in row {i} are not strictly increasing"
                )));
            }
        }
        Ok(Self {
            n,
            row_ptr,
            col_idx,
            values,
        })
    }

    /// Builds from `(row, col, value)` triplets in any order. Duplicate
    /// coordinates are rejected.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, F)]) -> Result<Self> {
        let mut sorted: Vec<(usize, usize, F)> = triplets.to_vec();
        if let Some(&(i, j, _)) = sorted.iter().find(|&&(i, j, _)| i >= n || j >= n) {
            return Err(FunmvError::InvalidInput(format!(
                "entry ({i}, {j}) outside a {n} x {n} matrix"
            )));
        }
        sorted.sort_by_key(|&(i, j, _)| (i, j));
        if let Some(w) = sorted.windows(2).find(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1)) {
            return Err(FunmvError::InvalidInput(format!(
                "duplicate entry ({}, {})",
                w[0].0, w[0].1
            )));
        }
        let mut row_ptr = vec![0usize; n + 1];
        for &(i, _, _) in &sorted {
            row_ptr[i + 1] += 1;
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        let col_idx = sorted.iter().map(|t| t.1).collect();
        let values = sorted.iter().map(|t| t.2).collect();
        Ok(Self {
            n,
            row_ptr,
            col_idx,
            values,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![F::one(); n])
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            row_ptr: vec![0; n + 1],
            col_idx: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn from_diagonal(diag: &[F]) -> Self {
        let n = diag.len();
        Self {
            n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: diag.to_vec(),
        }
    }

    /// Compresses a row-major dense array, dropping exact zeros.
    pub fn from_dense(n: usize, dense: &[F]) -> Self {
        assert_eq!(dense.len(), n * n, "dense array must be n*n");
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for i in 0..n {
            for j in 0..n {
                let v = dense[i * n + j];
                if v != F::zero() {
                    col_idx.push(j);
                    values.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        Self {
            n,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn values(&self) -> &[F] {
        &self.values
    }

    /// Iterates stored entries as `(row, col, value)`.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, F)> + '_ {
        (0..self.n).flat_map(move |i| {
            (self.row_ptr[i]..self.row_ptr[i + 1]).map(move |k| (i, self.col_idx[k], self.values[k]))
        })
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<F> {
        let mut out = vec![F::zero(); self.n * self.n];
        for (i, j, v) in self.triplets() {
            out[i * self.n + j] = v;
        }
        out
    }

    pub fn map<G: Scalar>(&self, f: impl Fn(F) -> G) -> SparseMatrix<G> {
        SparseMatrix {
            n: self.n,
            row_ptr: self.row_ptr.clone(),
            col_idx: self.col_idx.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn scaled(&self, alpha: F) -> Self {
        self.map(|v| v * alpha)
    }

    pub fn to_complex(&self) -> SparseMatrix<Complex64> {
        self.map(|v| v.to_complex())
    }

    /// True when every stored entry is finite.
    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// `A^T == A` (not conjugated) on the stored pattern.
    pub fn is_symmetric(&self) -> bool {
        self.triplets().all(|(i, j, v)| self.get(j, i) == v)
    }

    pub fn get(&self, i: usize, j: usize) -> F {
        let row = &self.col_idx[self.row_ptr[i]..self.row_ptr[i + 1]];
        match row.binary_search(&j) {
            Ok(k) => self.values[self.row_ptr[i] + k],
            Err(_) => F::zero(),
        }
    }
}

/// Dense `n x n0` block stored column by column.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseBlock<F> {
    n: usize,
    n0: usize,
    data: Vec<F>,
}

impl<F: Scalar> DenseBlock<F> {
    pub fn zeros(n: usize, n0: usize) -> Self {
        Self {
            n,
            n0,
            data: vec![F::zero(); n * n0],
        }
    }

    /// Builds from column-major data.
    pub fn from_col_major(n: usize, n0: usize, data: Vec<F>) -> Result<Self> {
        if data.len() != n * n0 {
            return Err(FunmvError::Dimension(format!(
                "{} values cannot fill a {n} x {n0} block",
                data.len()
            )));
        }
        Ok(Self { n, n0, data })
    }

    pub fn from_columns(columns: &[Vec<F>]) -> Result<Self> {
        let n0 = columns.len();
        let n = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != n) {
            return Err(FunmvError::Dimension("columns differ in length".into()));
        }
        Ok(Self {
            n,
            n0,
            data: columns.concat(),
        })
    }

    pub fn from_column(column: Vec<F>) -> Self {
        Self {
            n: column.len(),
            n0: 1,
            data: column,
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut out = Self::zeros(n, n);
        for i in 0..n {
            out.data[i * n + i] = F::one();
        }
        out
    }

    pub fn nrows(&self) -> usize {
        self.n
    }

    pub fn ncols(&self) -> usize {
        self.n0
    }

    pub fn data(&self) -> &[F] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> F {
        self.data[j * self.n + i]
    }

    pub fn set(&mut self, i: usize, j: usize, v: F) {
        self.data[j * self.n + i] = v;
    }

    pub fn column(&self, j: usize) -> &[F] {
        &self.data[j * self.n..(j + 1) * self.n]
    }

    pub fn column_mut(&mut self, j: usize) -> &mut [F] {
        &mut self.data[j * self.n..(j + 1) * self.n]
    }

    pub fn scale(&self, alpha: F) -> Self {
        self.map(|v| v * alpha)
    }

    pub fn map<G: Scalar>(&self, f: impl Fn(F) -> G) -> DenseBlock<G> {
        DenseBlock {
            n: self.n,
            n0: self.n0,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn to_complex(&self) -> DenseBlock<Complex64> {
        self.map(|v| v.to_complex())
    }

    /// `self += alpha * other`.
    pub fn axpy(&mut self, alpha: F, other: &Self) {
        debug_assert_eq!((self.n, self.n0), (other.n, other.n0));
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += alpha * b;
        }
    }

    /// `alpha * self + beta * other`.
    pub fn lincomb(&self, alpha: F, other: &Self, beta: F) -> Self {
        debug_assert_eq!((self.n, self.n0), (other.n, other.n0));
        DenseBlock {
            n: self.n,
            n0: self.n0,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| alpha * a + beta * b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.lincomb(F::one(), other, -F::one())
    }

    /// Max row-abs-sum.
    pub fn inf_norm(&self) -> f64 {
        let mut rows = vec![0.0f64; self.n];
        for col in self.data.chunks_exact(self.n.max(1)) {
            for (r, v) in rows.iter_mut().zip(col) {
                *r += v.abs();
            }
        }
        max_or_zero(rows.into_iter())
    }

    /// Max column-abs-sum.
    pub fn one_norm(&self) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        max_or_zero(
            self.data
                .chunks_exact(self.n)
                .map(|c| c.iter().map(|v| v.abs()).sum::<f64>()),
        )
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

fn max_or_zero(it: impl Iterator<Item = f64>) -> f64 {
    it.fold(0.0f64, |m, x| if x > m || x.is_nan() { x } else { m })
}

/// `A * B`; adds `B.ncols()` to the counter.
pub fn matmat<F: Scalar>(a: &SparseMatrix<F>, b: &DenseBlock<F>, counter: &mut MatvecCounter) -> Result<DenseBlock<F>> {
    if a.n != b.n {
        return Err(FunmvError::Dimension(format!(
            "operator is {0} x {0} but block has {1} rows",
            a.n, b.n
        )));
    }
    let mut out = DenseBlock::zeros(b.n, b.n0);
    for (x, y) in b
        .data
        .chunks_exact(b.n.max(1))
        .zip(out.data.chunks_exact_mut(b.n.max(1)))
    {
        for (i, yi) in y.iter_mut().enumerate() {
            let mut acc = F::zero();
            for k in a.row_ptr[i]..a.row_ptr[i + 1] {
                acc += a.values[k] * x[a.col_idx[k]];
            }
            *yi = acc;
        }
    }
    counter.add(b.n0 as u64);
    Ok(out)
}

/// `A^* B` (conjugate transpose) computed from the CSR storage of `A`.
pub fn matmat_adjoint<F: Scalar>(
    a: &SparseMatrix<F>,
    b: &DenseBlock<F>,
    counter: &mut MatvecCounter,
) -> Result<DenseBlock<F>> {
    if a.n != b.n {
        return Err(FunmvError::Dimension(format!(
            "operator is {0} x {0} but block has {1} rows",
            a.n, b.n
        )));
    }
    let mut out = DenseBlock::zeros(b.n, b.n0);
    for (x, y) in b
        .data
        .chunks_exact(b.n.max(1))
        .zip(out.data.chunks_exact_mut(b.n.max(1)))
    {
        for (i, &xi) in x.iter().enumerate() {
            for k in a.row_ptr[i]..a.row_ptr[i + 1] {
                y[a.col_idx[k]] += a.values[k].conj() * xi;
            }
        }
    }
    counter.add(b.n0 as u64);
    Ok(out)
}

/// Exact max column-abs-sum of `A`.
pub fn one_norm<F: Scalar>(a: &SparseMatrix<F>) -> f64 {
    let mut cols = vec![0.0f64; a.n];
    for (&j, v) in a.col_idx.iter().zip(&a.values) {
        cols[j] += v.abs();
    }
    max_or_zero(cols.into_iter())
}

pub fn inf_norm<F: Scalar>(b: &DenseBlock<F>) -> f64 {
    b.inf_norm()
}

pub fn one_norm_block<F: Scalar>(b: &DenseBlock<F>) -> f64 {
    b.one_norm()
}

/// `trace(A) / n`.
pub fn trace_mean<F: Scalar>(a: &SparseMatrix<F>) -> F {
    if a.n == 0 {
        return F::zero();
    }
    let trace: F = (0..a.n).map(|i| a.get(i, i)).sum();
    trace / a.n as f64
}

/// `A - mu I`, with every diagonal entry stored.
pub fn shift_diagonal<F: Scalar>(a: &SparseMatrix<F>, mu: F) -> SparseMatrix<F> {
    if mu == F::zero() {
        return a.clone();
    }
    let n = a.n;
    let mut row_ptr = Vec::with_capacity(n + 1);
    let mut col_idx = Vec::with_capacity(a.nnz() + n);
    let mut values = Vec::with_capacity(a.nnz() + n);
    row_ptr.push(0);
    for i in 0..n {
        let mut placed = false;
        for k in a.row_ptr[i]..a.row_ptr[i + 1] {
            let j = a.col_idx[k];
            if !placed && j > i {
                col_idx.push(i);
                values.push(-mu);
                placed = true;
            }
            if j == i {
                col_idx.push(i);
                values.push(a.values[k] - mu);
                placed = true;
            } else {
                col_idx.push(j);
                values.push(a.values[k]);
            }
        }
        if !placed {
            col_idx.push(i);
            values.push(-mu);
        }
        row_ptr.push(col_idx.len());
    }
    SparseMatrix {
        n,
        row_ptr,
        col_idx,
        values,
    }
}
