//! 1-norm estimates of integer powers of a sparse operator, and the
//! `d_k = ||A^(sigma k)||_1^(1/k)` / `alpha_p` sequence built from them.
//!
//! Powers are never formed: the operator is applied repeatedly to thin
//! blocks. Small operators (`n <= 128`) get the exact norm by applying the
//! power to the identity. Larger ones use the Higham-Tisseur block
//! estimator, which returns a lower bound.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{FunmvError, Result};
use crate::linalg::{matmat, matmat_adjoint, DenseBlock, MatvecCounter, SparseMatrix};
use crate::scalar::Scalar;

/// `A` or its principal square root in `f(t A^sigma)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sigma {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "0.5")]
    Half,
}

impl Sigma {
    pub fn value(self) -> f64 {
        match self {
            Sigma::One => 1.0,
            Sigma::Half => 0.5,
        }
    }

    /// Products with `A` per term of the even Taylor series.
    pub fn products_per_term(self) -> u64 {
        match self {
            Sigma::One => 2,
            Sigma::Half => 1,
        }
    }

    /// Integer exponent `sigma * k` for even `k`.
    pub fn power_for(self, k: usize) -> u32 {
        debug_assert!(k.is_multiple_of(2));
        match self {
            Sigma::One => k as u32,
            Sigma::Half => (k / 2) as u32,
        }
    }
}

/// Estimator knobs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormEstConfig {
    /// Columns in the estimator's iterate.
    pub ell: usize,
    /// Sweeps before giving up on convergence.
    pub max_sweeps: usize,
    /// At or below this dimension the norm is computed exactly.
    pub exact_threshold: usize,
    /// Seed for the random `+-1` starting columns.
    pub seed: u64,
}

impl Default for NormEstConfig {
    fn default() -> Self {
        Self {
            ell: 2,
            max_sweeps: 5,
            exact_threshold: 128,
            seed: 0,
        }
    }
}

/// `A^e` as an implicit operator.
#[derive(Debug, Clone, Copy)]
pub struct PowerOperator<'a, F> {
    a: &'a SparseMatrix<F>,
    e: u32,
}

impl<'a, F: Scalar> PowerOperator<'a, F> {
    pub fn new(a: &'a SparseMatrix<F>, e: u32) -> Self {
        assert!(e >= 1, "power must be positive");
        Self { a, e }
    }

    pub fn exponent(&self) -> u32 {
        self.e
    }

    /// `A^e X`; `None` once an intermediate stops being finite.
    pub fn apply(&self, x: &DenseBlock<F>, counter: &mut MatvecCounter) -> Result<Option<DenseBlock<F>>> {
        let mut y = x.clone();
        for _ in 0..self.e {
            y = matmat(self.a, &y, counter)?;
            if !y.is_finite() {
                return Ok(None);
            }
        }
        Ok(Some(y))
    }

    /// `(A^*)^e X`.
    pub fn apply_adjoint(&self, x: &DenseBlock<F>, counter: &mut MatvecCounter) -> Result<Option<DenseBlock<F>>> {
        let mut y = x.clone();
        for _ in 0..self.e {
            y = matmat_adjoint(self.a, &y, counter)?;
            if !y.is_finite() {
                return Ok(None);
            }
        }
        Ok(Some(y))
    }
}

/// Lower-bound estimate of `||A^e||_1` (exact when `n <= exact_threshold`).
/// Overflow while applying the power yields `+inf`.
pub fn est_one_norm_power<F: Scalar>(
    op: &PowerOperator<'_, F>,
    cfg: &NormEstConfig,
    counter: &mut MatvecCounter,
) -> Result<f64> {
    let n = op.a.n();
    if n == 0 {
        return Ok(0.0);
    }
    if n <= cfg.exact_threshold {
        return Ok(match op.apply(&DenseBlock::identity(n), counter)? {
            Some(y) => y.one_norm(),
            None => f64::INFINITY,
        });
    }
    block_estimate(op, cfg, counter)
}

fn block_estimate<F: Scalar>(
    op: &PowerOperator<'_, F>,
    cfg: &NormEstConfig,
    counter: &mut MatvecCounter,
) -> Result<f64> {
    let n = op.a.n();
    let t = cfg.ell.clamp(1, n);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let mut x = DenseBlock::zeros(n, t);
    x.column_mut(0).fill(F::one());
    for j in 1..t {
        loop {
            for v in x.column_mut(j) {
                *v = random_sign(&mut rng);
            }
            if F::IS_COMPLEX || !(0..j).any(|i| parallel(x.column(j), x.column(i))) {
                break;
            }
        }
    }
    let x0 = x.scale(F::from_f64(1.0 / n as f64));
    x = x0;

    let mut est_old = 0.0f64;
    let mut est;
    let mut ind_hist: Vec<usize> = Vec::new();
    let mut ind: Vec<usize> = (0..t).collect();
    let mut ind_best = 0usize;
    let mut s_old: Option<DenseBlock<F>> = None;
    let mut k = 1usize;

    loop {
        let Some(y) = op.apply(&x, counter)? else {
            return Ok(f64::INFINITY);
        };
        let (best_j, col_max) = argmax((0..t).map(|j| y.column(j).iter().map(|v| v.abs()).sum()));
        est = col_max;
        if k >= 2 && (est > est_old || k == 2) {
            ind_best = ind[best_j];
        }
        if k >= 2 && est <= est_old {
            est = est_old;
            break;
        }
        est_old = est;
        if k > cfg.max_sweeps {
            break;
        }

        let mut s = y.map(F::sign);
        if !F::IS_COMPLEX {
            if let Some(old) = &s_old {
                let all_parallel = (0..t).all(|j| (0..t).any(|i| parallel(s.column(j), old.column(i))));
                if all_parallel {
                    break;
                }
            }
            if t > 1 {
                for j in 0..t {
                    let mut tries = 0;
                    while tries < 64
                        && ((0..j).any(|i| parallel(s.column(j), s.column(i)))
                            || s_old
                                .as_ref()
                                .is_some_and(|old| (0..t).any(|i| parallel(s.column(j), old.column(i)))))
                    {
                        for v in s.column_mut(j) {
                            *v = random_sign(&mut rng);
                        }
                        tries += 1;
                    }
                }
            }
        }

        let Some(z) = op.apply_adjoint(&s, counter)? else {
            return Ok(f64::INFINITY);
        };
        s_old = Some(s);
        let h: Vec<f64> = (0..n)
            .map(|i| (0..t).map(|j| z.get(i, j).abs()).fold(0.0, f64::max))
            .collect();
        let hmax = h.iter().copied().fold(0.0, f64::max);
        if k >= 2 && hmax == h[ind_best] {
            break;
        }

        // stable sort: ties keep the lowest index first
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| h[b].total_cmp(&h[a]));
        order.truncate((t + ind_hist.len()).min(n));
        if t > 1 {
            if order[..t].iter().all(|i| ind_hist.contains(i)) {
                break;
            }
            let (fresh, seen): (Vec<usize>, Vec<usize>) = order.iter().partition(|i| !ind_hist.contains(i));
            order = fresh.into_iter().chain(seen).collect();
        }
        ind = order[..t].to_vec();

        x = DenseBlock::zeros(n, t);
        for (j, &i) in ind.iter().enumerate() {
            x.set(i, j, F::one());
        }
        for &i in &ind {
            if !ind_hist.contains(&i) {
                ind_hist.push(i);
            }
        }
        k += 1;
    }
    Ok(est)
}

fn random_sign<F: Scalar>(rng: &mut ChaCha8Rng) -> F {
    if rng.gen::<bool>() {
        F::one()
    } else {
        -F::one()
    }
}

// Columns of +-1 entries are parallel when equal up to a global sign.
fn parallel<F: Scalar>(v: &[F], w: &[F]) -> bool {
    let dot: f64 = v.iter().zip(w).map(|(&a, &b)| (a * b).re()).sum();
    dot.abs() == v.len() as f64
}

fn argmax(it: impl Iterator<Item = f64>) -> (usize, f64) {
    let mut best = (0usize, f64::NEG_INFINITY);
    for (i, v) in it.enumerate() {
        if v > best.1 {
            best = (i, v);
        }
    }
    best
}

/// The `d_k` and `alpha_p` values for `p = 2..=pmax`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaSequence {
    pub sigma: Sigma,
    /// `k -> d_k` for even `k = 4, 6, ..., 2 pmax + 2`.
    pub d: BTreeMap<usize, f64>,
    /// `p -> alpha_p = max(d_2p, d_2p+2)`.
    pub alphas: BTreeMap<usize, f64>,
    /// Matrix-vector products spent.
    pub cost: u64,
}

impl AlphaSequence {
    pub fn alpha(&self, p: usize) -> f64 {
        self.alphas[&p]
    }

    pub fn pmax(&self) -> usize {
        self.alphas.keys().copied().max().unwrap_or(1)
    }

    /// Same sequence for `c A^sigma`, using `alpha_p(c X) = |c| alpha_p(X)`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            sigma: self.sigma,
            d: self.d.iter().map(|(&k, &v)| (k, c.abs() * v)).collect(),
            alphas: self.alphas.iter().map(|(&p, &v)| (p, c.abs() * v)).collect(),
            cost: self.cost,
        }
    }
}

/// `d_k(A^sigma) = ||A^(sigma k)||_1^(1/k)`; `+inf` on overflow.
pub fn d_k<F: Scalar>(
    a: &SparseMatrix<F>,
    sigma: Sigma,
    k: usize,
    cfg: &NormEstConfig,
    counter: &mut MatvecCounter,
) -> Result<f64> {
    let op = PowerOperator::new(a, sigma.power_for(k));
    let norm = est_one_norm_power(&op, cfg, counter)?;
    Ok(norm.powf(1.0 / k as f64))
}

/// Estimates `alpha_p(A^sigma)` for `p = 2..=pmax`.
pub fn alpha_sequence<F: Scalar>(
    a: &SparseMatrix<F>,
    sigma: Sigma,
    pmax: usize,
    cfg: &NormEstConfig,
    counter: &mut MatvecCounter,
) -> Result<AlphaSequence> {
    if pmax < 2 {
        return Err(FunmvError::InvalidInput(format!("pmax must be at least 2, got {pmax}")));
    }
    let start = counter.get();
    let mut d = BTreeMap::new();
    for p in 2..=pmax + 1 {
        let k = 2 * p;
        let dk = d_k(a, sigma, k, cfg, counter)?;
        if !dk.is_finite() {
            return Err(FunmvError::Overflow(format!(
                "estimating ||A^{}||_1",
                sigma.power_for(k)
            )));
        }
        d.insert(k, dk);
    }
    let alphas = (2..=pmax).map(|p| (p, d[&(2 * p)].max(d[&(2 * p + 2)]))).collect();
    Ok(AlphaSequence {
        sigma,
        d,
        alphas,
        cost: counter.get() - start,
    })
}
