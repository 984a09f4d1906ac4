//! Choice of the Taylor degree `m*` and scaling `s` that minimise the number
//! of products with `A`, subject to the forward-error bound.

use serde::{Deserialize, Serialize};

use crate::error::{FunmvError, Result};
use crate::linalg::{one_norm, MatvecCounter, SparseMatrix};
use crate::normest::{alpha_sequence, d_k, AlphaSequence, NormEstConfig, Sigma};
use crate::scalar::Scalar;
use crate::theta::ThetaTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectConfig {
    pub mmax: usize,
    pub pmax: usize,
    pub normest: NormEstConfig,
}

impl Default for SelectConfig {
    fn default() -> Self {
        Self {
            mmax: 25,
            pmax: 5,
            normest: NormEstConfig::default(),
        }
    }
}

impl SelectConfig {
    fn validate(&self, theta: &ThetaTable) -> Result<()> {
        if self.mmax == 0 || self.pmax < 2 || self.pmax * (self.pmax - 1) > self.mmax + 1 {
            return Err(FunmvError::InvalidInput(format!(
                "need pmax >= 2 and pmax(pmax-1) <= mmax+1, got mmax={} pmax={}",
                self.mmax, self.pmax
            )));
        }
        if theta.mmax() < self.mmax {
            return Err(FunmvError::InvalidInput(format!(
                "theta table stops at m = {} < mmax = {}",
                theta.mmax(),
                self.mmax
            )));
        }
        Ok(())
    }
}

/// Which rule produced the parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SelectionPath {
    /// `||A||_1^sigma` was cheap enough to use directly.
    NormBound,
    /// `d_2` was estimated and used directly (`sigma = 1` only).
    D2Bound,
    /// Full `alpha_p` minimisation.
    FullAlpha,
    /// The operator is zero.
    ZeroMatrix,
    /// Read off a precomputed [`SpmMatrix`].
    Precomputed,
    /// Norm estimation overflowed; `s` taken from `||A||_1^sigma` at `mmax`.
    NormFallback,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamChoice {
    pub m_star: usize,
    pub s: u64,
    /// Products spent on norm estimation.
    pub theta_cost: u64,
    pub path: SelectionPath,
}

fn ceil_ratio(x: f64, theta: f64) -> Result<u64> {
    let r = (x / theta).ceil();
    if !r.is_finite() || r > 2f64.powi(52) {
        return Err(FunmvError::Overflow(format!(
            "scaling parameter for norm {x:e} is not representable"
        )));
    }
    Ok(r as u64)
}

/// `argmin_{1<=m<=mmax} m ceil(x/theta_m)` and the matching `s`.
fn argmin_single(x: f64, theta: &ThetaTable, mmax: usize) -> Result<(usize, u64)> {
    let mut best: Option<(u64, usize)> = None;
    for m in 1..=mmax {
        let cost = m as u64 * ceil_ratio(x, theta.theta(m))?;
        if best.is_none_or(|(c, _)| cost < c) {
            best = Some((cost, m));
        }
    }
    let (_, m) = best.expect("mmax >= 1");
    Ok((m, ceil_ratio(x, theta.theta(m))?.max(1)))
}

/// Minimises `m ceil(alpha_p / theta_m)` over `2 <= p <= pmax` and
/// `p(p-1)-1 <= m <= mmax`; returns `(m*, s)`.
pub fn argmin_alpha(seq: &AlphaSequence, theta: &ThetaTable, mmax: usize, pmax: usize) -> Result<(usize, u64)> {
    let mut best: Option<(u64, usize)> = None;
    for m in 1..=mmax {
        for p in 2..=pmax {
            if p * (p - 1) - 1 > m {
                continue;
            }
            let cost = m as u64 * ceil_ratio(seq.alpha(p), theta.theta(m))?;
            if best.is_none_or(|(c, _)| cost < c) {
                best = Some((cost, m));
            }
        }
    }
    let (cost, m) = best.expect("p = 2, m = 1 is always admissible");
    Ok((m, (cost / m as u64).max(1)))
}

fn bound_factor(cfg: &SelectConfig, n0: usize) -> f64 {
    let ell = cfg.normest.ell as f64;
    let pmax = cfg.pmax as f64;
    2.0 * ell * pmax * (pmax + 3.0) / (n0 as f64 * cfg.mmax as f64)
}

/// Selects `(m*, s)` for the operator `X = t^(1/sigma) A`, which the caller
/// has already scaled. `n0` is the column count of the block that will be
/// propagated.
pub fn select_parameters<F: Scalar>(
    x: &SparseMatrix<F>,
    sigma: Sigma,
    theta: &ThetaTable,
    cfg: &SelectConfig,
    n0: usize,
    counter: &mut MatvecCounter,
) -> Result<ParamChoice> {
    cfg.validate(theta)?;
    let n0 = n0.max(1);
    let norm_sigma = one_norm(x).powf(sigma.value());
    if norm_sigma == 0.0 {
        return Ok(ParamChoice {
            m_star: 0,
            s: 1,
            theta_cost: 0,
            path: SelectionPath::ZeroMatrix,
        });
    }
    if !norm_sigma.is_finite() {
        return Err(FunmvError::Overflow("||A||_1 is not finite".into()));
    }
    let theta_max = theta.theta(cfg.mmax);
    let factor = bound_factor(cfg, n0);

    if norm_sigma <= theta_max * (factor - 1.0) {
        let (m_star, s) = argmin_single(norm_sigma, theta, cfg.mmax)?;
        return Ok(ParamChoice {
            m_star,
            s,
            theta_cost: 0,
            path: SelectionPath::NormBound,
        });
    }

    let start = counter.get();
    let fallback = |spent: u64| -> Result<ParamChoice> {
        Ok(ParamChoice {
            m_star: cfg.mmax,
            s: ceil_ratio(norm_sigma, theta_max)?.max(1),
            theta_cost: spent,
            path: SelectionPath::NormFallback,
        })
    };

    if sigma == Sigma::One {
        let d2 = d_k(x, Sigma::One, 2, &cfg.normest, counter)?;
        let nu = counter.get() - start;
        if !d2.is_finite() {
            return fallback(nu);
        }
        if d2 <= theta_max * (factor - nu as f64 - 1.0) {
            let (m_star, s) = argmin_single(d2, theta, cfg.mmax)?;
            return Ok(ParamChoice {
                m_star,
                s,
                theta_cost: nu,
                path: SelectionPath::D2Bound,
            });
        }
    }

    let seq = match alpha_sequence(x, sigma, cfg.pmax, &cfg.normest, counter) {
        Ok(seq) => seq,
        Err(FunmvError::Overflow(_)) => return fallback(counter.get() - start),
        Err(e) => return Err(e),
    };
    let (m_star, s) = argmin_alpha(&seq, theta, cfg.mmax, cfg.pmax)?;
    Ok(ParamChoice {
        m_star,
        s,
        theta_cost: counter.get() - start,
        path: SelectionPath::FullAlpha,
    })
}

/// Precomputed `S_pm = alpha_p(A^sigma) / theta_m` (zero outside
/// `p(p-1)-1 <= m`), reusable for any scalar multiple of the operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpmMatrix {
    pub sigma: Sigma,
    pub tol: f64,
    pub mmax: usize,
    pub pmax: usize,
    /// Row `p - 2`, column `m - 1`.
    pub entries: Vec<Vec<f64>>,
    pub alphas: AlphaSequence,
    /// Products spent building the matrix.
    pub theta_cost: u64,
    /// Diagonal shift the operator carried when this was built.
    pub shift: [f64; 2],
}

impl SpmMatrix {
    pub fn from_alphas(alphas: AlphaSequence, theta: &ThetaTable, mmax: usize, pmax: usize) -> Self {
        let entries = (2..=pmax)
            .map(|p| {
                (1..=mmax)
                    .map(|m| {
                        if p * (p - 1) - 1 <= m {
                            alphas.alpha(p) / theta.theta(m)
                        } else {
                            0.0
                        }
                    })
                    .collect()
            })
            .collect();
        Self {
            sigma: alphas.sigma,
            tol: theta.tol(),
            mmax,
            pmax,
            entries,
            theta_cost: alphas.cost,
            alphas,
            shift: [0.0, 0.0],
        }
    }

    /// `S_pm` with 1-based `m`.
    pub fn get(&self, p: usize, m: usize) -> f64 {
        self.entries[p - 2][m - 1]
    }
}

/// Builds [`SpmMatrix`] from one alpha sequence of `A`.
pub fn build_spm<F: Scalar>(
    a: &SparseMatrix<F>,
    sigma: Sigma,
    theta: &ThetaTable,
    cfg: &SelectConfig,
    counter: &mut MatvecCounter,
) -> Result<SpmMatrix> {
    cfg.validate(theta)?;
    let seq = alpha_sequence(a, sigma, cfg.pmax, &cfg.normest, counter)?;
    Ok(SpmMatrix::from_alphas(seq, theta, cfg.mmax, cfg.pmax))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpmSelection {
    pub m_star: usize,
    pub s: u64,
    /// `S` held no nonzero entry; `(mmax, 1)` was returned.
    pub degenerate: bool,
}

/// Reads `(m*, s)` for `|t| A^sigma` off the smallest nonzero element of
/// `ceil(|t| S) diag(1, ..., mmax)`.
pub fn select_for_t(spm: &SpmMatrix, t_abs: f64) -> Result<SpmSelection> {
    let mut best: Option<(u64, usize)> = None;
    for m in 1..=spm.mmax {
        for row in &spm.entries {
            let c = (t_abs * row[m - 1]).ceil();
            if c == 0.0 {
                continue;
            }
            if !c.is_finite() || c > 2f64.powi(52) {
                return Err(FunmvError::Overflow("scaling parameter is not representable".into()));
            }
            let cost = m as u64 * c as u64;
            if best.is_none_or(|(b, _)| cost < b) {
                best = Some((cost, m));
            }
        }
    }
    Ok(match best {
        Some((cost, m)) => SpmSelection {
            m_star: m,
            s: (cost / m as u64).max(1),
            degenerate: false,
        },
        None => SpmSelection {
            m_star: spm.mmax,
            s: 1,
            degenerate: true,
        },
    })
}
