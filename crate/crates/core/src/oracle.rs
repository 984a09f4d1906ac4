//! Dense reference evaluators for tests and benchmarks.
//!
//! Nothing here is used by [`crate::engine`]. Two independent paths are
//! provided: an eigendecomposition path for symmetric real matrices and a
//! compensated Taylor series with double-angle recovery for anything else,
//! with a double-double variant for strongly nonnormal real data. A
//! sine-transform path handles the five-point Laplacian at full size.

use serde::{Deserialize, Serialize};

use crate::error::{FunmvError, Result};
use crate::linalg::{DenseBlock, SparseMatrix};
use crate::normest::Sigma;
use crate::scalar::Scalar;

/// Largest order a [`DenseMatrix`] may have.
pub const DENSE_LIMIT: usize = 16384;
/// Largest order accepted by [`dense_func_action_general`].
pub const GENERAL_LIMIT: usize = 512;
/// Largest order for which benchmarks prefer [`dense_func_action_precise`].
pub const PRECISE_LIMIT: usize = 256;

/// Square row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<F> {
    n: usize,
    data: Vec<F>,
}

impl<F: Scalar> DenseMatrix<F> {
    pub fn zeros(n: usize) -> Result<Self> {
        if n > DENSE_LIMIT {
            return Err(FunmvError::Dimension(format!(
                "dense reference limited to n <= {DENSE_LIMIT}, got {n}"
            )));
        }
        Ok(Self {
            n,
            data: vec![F::zero(); n * n],
        })
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut m = Self::zeros(n)?;
        for i in 0..n {
            m.data[i * n + i] = F::one();
        }
        Ok(m)
    }

    pub fn from_row_major(n: usize, data: Vec<F>) -> Result<Self> {
        if data.len() != n * n {
            return Err(FunmvError::Dimension(format!(
                "expected {} entries, got {}",
                n * n,
                data.len()
            )));
        }
        let mut m = Self::zeros(n)?;
        m.data = data;
        Ok(m)
    }

    pub fn from_sparse(a: &SparseMatrix<F>) -> Result<Self> {
        Self::from_row_major(a.n(), a.to_dense())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> F {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: F) {
        self.data[i * self.n + j] = v;
    }

    pub fn scale(&self, alpha: F) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|&x| x * alpha).collect(),
        }
    }

    /// `alpha self + beta other`
    pub fn lincomb(&self, alpha: F, other: &Self, beta: F) -> Self {
        Self {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&x, &y)| alpha * x + beta * y)
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.n;
        let mut out = vec![F::zero(); n * n];
        for i in 0..n {
            let row = &mut out[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == F::zero() {
                    continue;
                }
                for (o, &b) in row.iter_mut().zip(&other.data[k * n..(k + 1) * n]) {
                    *o += a * b;
                }
            }
        }
        Self { n, data: out }
    }

    pub fn mul_block(&self, b: &DenseBlock<F>) -> DenseBlock<F> {
        let n = self.n;
        let mut out = DenseBlock::zeros(n, b.ncols());
        for j in 0..b.ncols() {
            let x = b.column(j);
            let y = out.column_mut(j);
            for (i, yi) in y.iter_mut().enumerate() {
                *yi = self.data[i * n..(i + 1) * n].iter().zip(x).map(|(&a, &v)| a * v).sum();
            }
        }
        out
    }

    pub fn one_norm(&self) -> f64 {
        (0..self.n)
            .map(|j| (0..self.n).map(|i| self.get(i, j).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }
}

/// The six scalar functions of the reference evaluators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Func {
    Cos,
    Sin,
    Sinc,
    Cosh,
    Sinh,
    Sinch,
}

impl Func {
    fn hyperbolic(self) -> bool {
        matches!(self, Func::Cosh | Func::Sinh | Func::Sinch)
    }

    fn odd(self) -> bool {
        matches!(self, Func::Sin | Func::Sinh)
    }

    fn apply(self, x: f64) -> f64 {
        match self {
            Func::Cos => x.cos(),
            Func::Sin => x.sin(),
            Func::Sinc if x == 0.0 => 1.0,
            Func::Sinc => x.sin() / x,
            Func::Cosh => x.cosh(),
            Func::Sinh => x.sinh(),
            Func::Sinch if x == 0.0 => 1.0,
            Func::Sinch => x.sinh() / x,
        }
    }

    /// `f(t lambda^sigma)`. For `sigma = 1/2` and `lambda < 0` the even
    /// functions switch family (`cos(i y) = cosh(y)`), so only `lambda`
    /// enters; the odd ones are then undefined in the reals.
    pub fn eval(self, sigma: Sigma, t: f64, lambda: f64) -> Result<f64> {
        match sigma {
            Sigma::One => Ok(self.apply(t * lambda)),
            Sigma::Half if lambda >= 0.0 => Ok(self.apply(t * lambda.sqrt())),
            Sigma::Half => {
                let swapped = match self {
                    Func::Cos => Func::Cosh,
                    Func::Cosh => Func::Cos,
                    Func::Sinc => Func::Sinch,
                    Func::Sinch => Func::Sinc,
                    _ => {
                        return Err(FunmvError::InvalidInput(
                            "odd functions of a square root need a nonnegative spectrum".into(),
                        ))
                    }
                };
                Ok(swapped.apply(t * (-lambda).sqrt()))
            }
        }
    }
}

/// `f(t A^sigma) B` for symmetric real `A` through its eigendecomposition.
pub fn dense_func_action(
    f: Func,
    a: &DenseMatrix<f64>,
    sigma: Sigma,
    t: f64,
    b: &DenseBlock<f64>,
) -> Result<DenseBlock<f64>> {
    let n = a.n();
    check_block(n, b)?;
    let scale = a.data.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    for i in 0..n {
        for j in 0..i {
            if (a.get(i, j) - a.get(j, i)).abs() > 1e-14 * scale {
                return Err(FunmvError::InvalidInput(
                    "eigendecomposition oracle needs a symmetric matrix".into(),
                ));
            }
        }
    }
    let eig = nalgebra::SymmetricEigen::new(nalgebra::DMatrix::from_row_slice(n, n, &a.data));
    let fl = eig
        .eigenvalues
        .iter()
        .map(|&l| f.eval(sigma, t, l))
        .collect::<Result<Vec<_>>>()?;
    let q = &eig.eigenvectors;
    let bm = nalgebra::DMatrix::from_column_slice(n, b.ncols(), b.data());
    let mut y = q.transpose() * bm;
    for (i, &v) in fl.iter().enumerate() {
        y.row_mut(i).scale_mut(v);
    }
    let out = q * y;
    DenseBlock::from_col_major(n, b.ncols(), out.as_slice().to_vec())
}

fn check_block<F: Scalar>(n: usize, b: &DenseBlock<F>) -> Result<()> {
    if b.nrows() != n {
        return Err(FunmvError::Dimension(format!(
            "matrix is {n} x {n} but block has {} rows",
            b.nrows()
        )));
    }
    Ok(())
}

/// Kahan-compensated running sum of matrices.
struct CompensatedSum<F> {
    sum: DenseMatrix<F>,
    comp: DenseMatrix<F>,
}

impl<F: Scalar> CompensatedSum<F> {
    fn new(start: DenseMatrix<F>) -> Self {
        let comp = DenseMatrix {
            n: start.n,
            data: vec![F::zero(); start.data.len()],
        };
        Self { sum: start, comp }
    }

    fn add(&mut self, term: &DenseMatrix<F>) {
        for ((s, c), &x) in self.sum.data.iter_mut().zip(self.comp.data.iter_mut()).zip(&term.data) {
            let y = x - *c;
            let t = *s + y;
            *c = (t - *s) - y;
            *s = t;
        }
    }
}

/// `sum_k (sign W)^k / (2k + offset)!` to stagnation, with `offset` 0 or 1.
fn even_series<F: Scalar>(w: &DenseMatrix<F>, negate: bool, offset: u32) -> Result<DenseMatrix<F>> {
    let n = w.n();
    let sign = if negate { -F::one() } else { F::one() };
    let mut acc = CompensatedSum::new(DenseMatrix::identity(n)?);
    let mut term = DenseMatrix::identity(n)?;
    for k in 1..200u32 {
        let denom = ((2 * k - 1 + offset) * (2 * k + offset)) as f64;
        term = term.mul(w).scale(sign / denom);
        acc.add(&term);
        let tn = term.one_norm();
        if tn == 0.0 || tn <= 1e-20 * acc.sum.one_norm() {
            break;
        }
    }
    Ok(acc.sum)
}

/// `f(t A^sigma) B` for general `A` (`n <= 512`, real or complex).
///
/// With `W = (t A^sigma)^2` (so `W = t^2 A` when `sigma = 1/2`), the cosine
/// and sinc series are summed on `W / 4^j` with `||W / 4^j||_1 <= 1/16`, then
/// `cos(2Y) = 2 cos(Y)^2 - I` and `sinc(2Y) = sinc(Y) cos(Y)` are applied `j`
/// times. Odd functions use `sin(X) = X sinc(X)` and need `sigma = 1`.
pub fn dense_func_action_general<F: Scalar>(
    f: Func,
    a: &DenseMatrix<F>,
    sigma: Sigma,
    t: F,
    b: &DenseBlock<F>,
) -> Result<DenseBlock<F>> {
    let n = a.n();
    if n > GENERAL_LIMIT {
        return Err(FunmvError::Dimension(format!(
            "series oracle limited to n <= {GENERAL_LIMIT}, got {n}"
        )));
    }
    check_block(n, b)?;
    if f.odd() && sigma == Sigma::Half {
        return Err(FunmvError::InvalidInput(
            "odd functions of a square root are not defined by the series oracle".into(),
        ));
    }
    let w = match sigma {
        Sigma::One => {
            let x = a.scale(t);
            x.mul(&x)
        }
        Sigma::Half => a.scale(t * t),
    };
    let trig = !f.hyperbolic();
    let mut j = 0i32;
    let mut wn = w.one_norm();
    while wn > 1.0 / 16.0 {
        wn /= 4.0;
        j += 1;
    }
    let ws = w.scale(F::from_f64(4f64.powi(-j)));
    let mut c = even_series(&ws, trig, 0)?;
    let mut sc = even_series(&ws, trig, 1)?;
    let id = DenseMatrix::identity(n)?;
    for _ in 0..j {
        sc = sc.mul(&c);
        c = c.mul(&c).lincomb(F::from_f64(2.0), &id, -F::one());
        if !(c.is_finite() && sc.is_finite()) {
            return Err(FunmvError::Overflow("series oracle overflowed".into()));
        }
    }
    let m = match f {
        Func::Cos | Func::Cosh => c,
        Func::Sinc | Func::Sinch => sc,
        Func::Sin | Func::Sinh => a.scale(t).mul(&sc),
    };
    Ok(m.mul_block(b))
}

/// Double-double number `hi + lo`, `|lo| <= ulp(hi) / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    fn from(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    fn quick(s: f64, e: f64) -> Self {
        let hi = s + e;
        Dd { hi, lo: e - (hi - s) }
    }

    fn add(self, o: Dd) -> Dd {
        let s = self.hi + o.hi;
        let bb = s - self.hi;
        let e = (self.hi - (s - bb)) + (o.hi - bb) + self.lo + o.lo;
        Dd::quick(s, e)
    }

    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    fn mul(self, o: Dd) -> Dd {
        let p = self.hi * o.hi;
        let e = self.hi.mul_add(o.hi, -p) + (self.hi * o.lo + self.lo * o.hi);
        Dd::quick(p, e)
    }

    fn div_f64(self, d: f64) -> Dd {
        let q1 = self.hi / d;
        let r = self.add(Dd::from(q1).mul(Dd::from(d)).neg());
        Dd::quick(q1, r.hi / d)
    }
}

/// Row-major square matrix of [`Dd`].
#[derive(Clone)]
struct DdMatrix {
    n: usize,
    data: Vec<Dd>,
}

impl DdMatrix {
    fn identity(n: usize) -> Self {
        let mut data = vec![Dd::ZERO; n * n];
        for i in 0..n {
            data[i * n + i] = Dd::ONE;
        }
        Self { n, data }
    }

    fn map(&self, f: impl Fn(Dd) -> Dd) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    fn mul(&self, o: &Self) -> Self {
        let n = self.n;
        let mut out = vec![Dd::ZERO; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.hi == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[i * n + j] = out[i * n + j].add(a.mul(o.data[k * n + j]));
                }
            }
        }
        Self { n, data: out }
    }

    fn add(&self, o: &Self) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().zip(&o.data).map(|(&x, &y)| x.add(y)).collect(),
        }
    }

    fn one_norm(&self) -> f64 {
        (0..self.n)
            .map(|j| (0..self.n).map(|i| self.data[i * self.n + j].hi.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

fn dd_even_series(w: &DdMatrix, negate: bool, offset: u32) -> DdMatrix {
    let mut sum = DdMatrix::identity(w.n);
    let mut term = DdMatrix::identity(w.n);
    for k in 1..400u32 {
        let denom = ((2 * k - 1 + offset) * (2 * k + offset)) as f64;
        let denom = if negate { -denom } else { denom };
        term = term.mul(w).map(|x| x.div_f64(denom));
        sum = sum.add(&term);
        let tn = term.one_norm();
        if tn == 0.0 || tn <= 1e-36 * sum.one_norm() {
            break;
        }
    }
    sum
}

/// Same construction as [`dense_func_action_general`] carried out in
/// double-double arithmetic, for real data. The double-angle steps amplify
/// rounding errors by up to `4^j`, which the extra precision absorbs.
pub fn dense_func_action_precise(
    f: Func,
    a: &DenseMatrix<f64>,
    sigma: Sigma,
    t: f64,
    b: &DenseBlock<f64>,
) -> Result<DenseBlock<f64>> {
    let n = a.n();
    if n > GENERAL_LIMIT {
        return Err(FunmvError::Dimension(format!(
            "series oracle limited to n <= {GENERAL_LIMIT}, got {n}"
        )));
    }
    check_block(n, b)?;
    if f.odd() && sigma == Sigma::Half {
        return Err(FunmvError::InvalidInput(
            "odd functions of a square root are not defined by the series oracle".into(),
        ));
    }
    let ad = DdMatrix {
        n,
        data: a.data.iter().map(|&x| Dd::from(x)).collect(),
    };
    let td = Dd::from(t);
    let x = ad.map(|v| v.mul(td));
    let w = match sigma {
        Sigma::One => x.mul(&x),
        Sigma::Half => x.map(|v| v.mul(td)),
    };
    let mut j = 0i32;
    let mut wn = w.one_norm();
    while wn > 1.0 / 16.0 {
        wn /= 4.0;
        j += 1;
    }
    let quarter = 4f64.powi(-j);
    let ws = w.map(|v| Dd {
        hi: v.hi * quarter,
        lo: v.lo * quarter,
    });
    let trig = !f.hyperbolic();
    let mut c = dd_even_series(&ws, trig, 0);
    let mut sc = dd_even_series(&ws, trig, 1);
    let minus_id = DdMatrix::identity(n).map(Dd::neg);
    for _ in 0..j {
        sc = sc.mul(&c);
        c = c
            .mul(&c)
            .map(|v| Dd {
                hi: 2.0 * v.hi,
                lo: 2.0 * v.lo,
            })
            .add(&minus_id);
        if !c.data.iter().chain(&sc.data).all(|v| v.hi.is_finite()) {
            return Err(FunmvError::Overflow("series oracle overflowed".into()));
        }
    }
    let m = match f {
        Func::Cos | Func::Cosh => c,
        Func::Sinc | Func::Sinch => sc,
        Func::Sin | Func::Sinh => x.mul(&sc),
    };
    let mut out = DenseBlock::zeros(n, b.ncols());
    for col in 0..b.ncols() {
        let bc = b.column(col).to_vec();
        let y = out.column_mut(col);
        for (i, yi) in y.iter_mut().enumerate() {
            let mut acc = Dd::ZERO;
            for (k, &bk) in bc.iter().enumerate() {
                acc = acc.add(m.data[i * n + k].mul(Dd::from(bk)));
            }
            *yi = acc.hi + acc.lo;
        }
    }
    Ok(out)
}

/// `e^{tA}` by scaling and squaring a compensated Taylor series.
pub fn dense_expm<F: Scalar>(a: &DenseMatrix<F>, t: F) -> Result<DenseMatrix<F>> {
    let n = a.n();
    if n > GENERAL_LIMIT {
        return Err(FunmvError::Dimension(format!(
            "series oracle limited to n <= {GENERAL_LIMIT}, got {n}"
        )));
    }
    let x = a.scale(t);
    let mut j = 0i32;
    let mut xn = x.one_norm();
    while xn > 0.5 {
        xn /= 2.0;
        j += 1;
    }
    let xs = x.scale(F::from_f64(2f64.powi(-j)));
    let mut acc = CompensatedSum::new(DenseMatrix::identity(n)?);
    let mut term = DenseMatrix::identity(n)?;
    for k in 1..200 {
        term = term.mul(&xs).scale(F::from_f64(1.0 / k as f64));
        acc.add(&term);
        let tn = term.one_norm();
        if tn == 0.0 || tn <= 1e-20 * acc.sum.one_norm() {
            break;
        }
    }
    let mut e = acc.sum;
    for _ in 0..j {
        e = e.mul(&e);
    }
    if !e.is_finite() {
        return Err(FunmvError::Overflow("exponential oracle overflowed".into()));
    }
    Ok(e)
}

/// `f(t A^sigma) B` for the five-point Laplacian on a `k x k` grid (negated
/// when `negate`), through its sine-transform eigenbasis. Works at the full
/// benchmark size with `O(k^3)` work per column.
pub fn poisson_func_action(
    f: Func,
    k: usize,
    negate: bool,
    sigma: Sigma,
    t: f64,
    b: &DenseBlock<f64>,
) -> Result<DenseBlock<f64>> {
    check_block(k * k, b)?;
    let h = std::f64::consts::PI / (k + 1) as f64;
    let norm = (2.0 / (k + 1) as f64).sqrt();
    // symmetric orthogonal sine transform
    let q: Vec<f64> = (0..k * k)
        .map(|idx| {
            let (i, j) = (idx / k + 1, idx % k + 1);
            norm * (h * (i * j) as f64).sin()
        })
        .collect();
    let mut fl = vec![0.0; k * k];
    for p in 0..k {
        for r in 0..k {
            let lambda = 4.0 - 2.0 * (h * (p + 1) as f64).cos() - 2.0 * (h * (r + 1) as f64).cos();
            let lambda = if negate { -lambda } else { lambda };
            fl[p * k + r] = f.eval(sigma, t, lambda)?;
        }
    }
    let transform = |x: &[f64]| -> Vec<f64> {
        // Q X Q with X the k x k grid, both factors symmetric
        let mut tmp = vec![0.0; k * k];
        for i in 0..k {
            for l in 0..k {
                let qil = q[i * k + l];
                for c in 0..k {
                    tmp[i * k + c] += qil * x[l * k + c];
                }
            }
        }
        let mut out = vec![0.0; k * k];
        for r in 0..k {
            for c in 0..k {
                out[r * k + c] = (0..k).map(|l| tmp[r * k + l] * q[l * k + c]).sum();
            }
        }
        out
    };
    let mut data = Vec::with_capacity(b.data().len());
    for j in 0..b.ncols() {
        let mut y = transform(b.column(j));
        for (v, &s) in y.iter_mut().zip(&fl) {
            *v *= s;
        }
        data.extend(transform(&y));
    }
    DenseBlock::from_col_major(k * k, b.ncols(), data)
}

/// `||x - y||_1 / ||y||_1` (absolute when `y = 0`).
pub fn rel_err_one<F: Scalar>(x: &DenseBlock<F>, y: &DenseBlock<F>) -> f64 {
    let d = x.sub(y).one_norm();
    let r = y.one_norm();
    if r == 0.0 {
        d
    } else {
        d / r
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_symmetric(n: usize, scale: f64, rng: &mut ChaCha8Rng) -> DenseMatrix<f64> {
        let mut m = DenseMatrix::zeros(n).unwrap();
        for i in 0..n {
            for j in 0..=i {
                let v = scale * (rng.gen::<f64>() - 0.5);
                m.set(i, j, v);
                m.set(j, i, v);
            }
        }
        m
    }

    fn random_block(n: usize, n0: usize, rng: &mut ChaCha8Rng) -> DenseBlock<f64> {
        DenseBlock::from_col_major(n, n0, (0..n * n0).map(|_| rng.gen::<f64>() - 0.5).collect()).unwrap()
    }

    #[test]
    fn zero_matrix_cosine_is_identity() {
        let a = DenseMatrix::<f64>::zeros(4).unwrap();
        let b = DenseBlock::from_column(vec![1.0, 2.0, 3.0, 4.0]);
        assert_eq!(dense_func_action(Func::Cos, &a, Sigma::One, 1.0, &b).unwrap(), b);
        assert_eq!(
            dense_func_action_general(Func::Cos, &a, Sigma::One, 1.0, &b).unwrap(),
            b
        );
    }

    #[test]
    fn square_root_of_diagonal() {
        let a = DenseMatrix::from_row_major(1, vec![4.0]).unwrap();
        let b = DenseBlock::from_column(vec![1.0]);
        let c = dense_func_action(Func::Cos, &a, Sigma::Half, 1.0, &b).unwrap();
        assert!((c.get(0, 0) - 2f64.cos()).abs() < 1e-15);
        let g = dense_func_action_general(Func::Sinc, &a, Sigma::Half, 1.0, &b).unwrap();
        assert!((g.get(0, 0) - 2f64.sin() / 2.0).abs() < 1e-15);
        let neg = DenseMatrix::from_row_major(1, vec![-4.0]).unwrap();
        let c = dense_func_action(Func::Cos, &neg, Sigma::Half, 1.0, &b).unwrap();
        assert!((c.get(0, 0) - 2f64.cosh()).abs() < 1e-14);
        assert!(dense_func_action(Func::Sin, &neg, Sigma::Half, 1.0, &b).is_err());
    }

    #[test]
    fn sine_transform_matches_eigen_path_on_small_grid() {
        let a = generators::poisson(3);
        let dense = DenseMatrix::from_sparse(&a).unwrap();
        let b = DenseBlock::from_column((1..=9).map(|i| (i as f64).cos()).collect());
        for f in [Func::Cos, Func::Sin, Func::Sinch] {
            for negate in [false, true] {
                let d = if negate { dense.scale(-1.0) } else { dense.clone() };
                let e = dense_func_action(f, &d, Sigma::One, 0.7, &b).unwrap();
                let p = poisson_func_action(f, 3, negate, Sigma::One, 0.7, &b).unwrap();
                assert!(rel_err_one(&p, &e) < 1e-14, "{f:?} {negate}");
            }
        }
        // 3x3 grid spectrum: 4 - 2cos(p pi/4) - 2cos(r pi/4)
        let eig = nalgebra::SymmetricEigen::new(nalgebra::DMatrix::from_row_slice(9, 9, &a.to_dense()));
        let mut got: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        got.sort_by(f64::total_cmp);
        let h = std::f64::consts::FRAC_PI_4;
        let mut want: Vec<f64> = (1..=3)
            .flat_map(|p| (1..=3).map(move |r| 4.0 - 2.0 * (h * p as f64).cos() - 2.0 * (h * r as f64).cos()))
            .collect();
        want.sort_by(f64::total_cmp);
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() < 1e-13);
        }
    }

    #[test]
    fn series_and_eigen_paths_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for trial in 0..10 {
            let a = random_symmetric(8, 6.0, &mut rng);
            let b = random_block(8, 2, &mut rng);
            let t = [0.5, 1.0, -2.0][trial % 3];
            for f in [Func::Cos, Func::Sin, Func::Sinc, Func::Cosh, Func::Sinh, Func::Sinch] {
                let e = dense_func_action(f, &a, Sigma::One, t, &b).unwrap();
                let g = dense_func_action_general(f, &a, Sigma::One, t, &b).unwrap();
                assert!(
                    rel_err_one(&g, &e) < 1e-12,
                    "{f:?} trial {trial}: {}",
                    rel_err_one(&g, &e)
                );
            }
        }
    }

    #[test]
    fn x_sinc_is_sin() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_symmetric(8, 4.0, &mut rng);
        let b = random_block(8, 1, &mut rng);
        let t = 1.3;
        let sinc = dense_func_action_general(Func::Sinc, &a, Sigma::One, t, &b).unwrap();
        let x_sinc = a.scale(t).mul_block(&sinc);
        let sin = dense_func_action_general(Func::Sin, &a, Sigma::One, t, &b).unwrap();
        assert!(rel_err_one(&x_sinc, &sin) < 1e-13);
    }

    #[test]
    fn nilpotent_cosine_is_identity() {
        let a = DenseMatrix::from_row_major(2, vec![0.0, 1.0, 0.0, 0.0]).unwrap();
        let b = DenseBlock::from_columns(&[vec![1.0, 2.0]]).unwrap();
        assert_eq!(
            dense_func_action_general(Func::Cos, &a, Sigma::One, 3.0, &b).unwrap(),
            b
        );
    }

    #[test]
    fn exponential_of_companion_gives_wave_solution() {
        // d/dt [y; y'] = [[0, I], [-A, 0]] [y; y']
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 6;
        let r = random_symmetric(n, 1.0, &mut rng);
        let mut spd = r.mul(&r).lincomb(1.0, &DenseMatrix::identity(n).unwrap(), 1.0);
        spd = spd.scale(2.0);
        let mut big = DenseMatrix::zeros(2 * n).unwrap();
        for i in 0..n {
            big.set(i, n + i, 1.0);
            for j in 0..n {
                big.set(n + i, j, -spd.get(i, j));
            }
        }
        let y = random_block(n, 1, &mut rng);
        let z = random_block(n, 1, &mut rng);
        let e = dense_expm(&big, 1.0).unwrap();
        let stacked = DenseBlock::from_column([y.column(0), z.column(0)].concat());
        let top = e.mul_block(&stacked);
        let c = dense_func_action(Func::Cos, &spd, Sigma::Half, 1.0, &y).unwrap();
        let s = dense_func_action(Func::Sinc, &spd, Sigma::Half, 1.0, &z).unwrap();
        for i in 0..n {
            let want = c.get(i, 0) + s.get(i, 0);
            assert!((top.get(i, 0) - want).abs() < 1e-12, "{i}");
        }
    }

    #[test]
    fn complex_series_matches_real_on_real_data() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_symmetric(5, 3.0, &mut rng);
        let b = random_block(5, 1, &mut rng);
        let ac = DenseMatrix::from_row_major(5, a.data.iter().map(|&x| Complex64::new(x, 0.0)).collect()).unwrap();
        let real = dense_func_action_general(Func::Sinh, &a, Sigma::One, 0.9, &b).unwrap();
        let cplx =
            dense_func_action_general(Func::Sinh, &ac, Sigma::One, Complex64::new(0.9, 0.0), &b.to_complex()).unwrap();
        assert!(rel_err_one(&cplx, &real.to_complex()) < 1e-15);
        // cosh(i x) = cos(x)
        let ci =
            dense_func_action_general(Func::Cosh, &ac, Sigma::One, Complex64::new(0.0, 0.9), &b.to_complex()).unwrap();
        let cr = dense_func_action(Func::Cos, &a, Sigma::One, 0.9, &b).unwrap();
        assert!(rel_err_one(&ci, &cr.to_complex()) < 1e-13);
    }

    #[test]
    fn precise_path_tracks_eigen_path() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for trial in 0..6 {
            let a = random_symmetric(7, 40.0, &mut rng);
            let b = random_block(7, 1, &mut rng);
            let t = [1.0, -2.0][trial % 2];
            for f in [Func::Cos, Func::Sin, Func::Sinc, Func::Sinch] {
                let e = dense_func_action(f, &a, Sigma::One, t, &b).unwrap();
                let p = dense_func_action_precise(f, &a, Sigma::One, t, &b).unwrap();
                assert!(rel_err_one(&p, &e) < 1e-12, "{f:?}: {}", rel_err_one(&p, &e));
            }
        }
    }

    #[test]
    fn double_double_basics() {
        let third = Dd::ONE.div_f64(3.0);
        let back = third.mul(Dd::from(3.0)).add(Dd::ONE.neg());
        assert!(back.hi.abs() < 1e-31);
        let tiny = Dd::from(1.0).add(Dd::from(1e-20));
        assert_eq!(tiny.hi, 1.0);
        assert_eq!(tiny.lo, 1e-20);
    }

    #[test]
    fn size_guards() {
        assert!(DenseMatrix::<f64>::zeros(DENSE_LIMIT + 1).is_err());
        let big = DenseMatrix::<f64>::zeros(GENERAL_LIMIT + 1).unwrap();
        let b = DenseBlock::zeros(GENERAL_LIMIT + 1, 1);
        assert!(dense_func_action_general(Func::Cos, &big, Sigma::One, 1.0, &b).is_err());
    }
}
