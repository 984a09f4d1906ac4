//! Forward-error bound of the truncated cosine series and the largest
//! admissible arguments `theta_m` for a given tolerance.
//!
//! The remainder of the degree-`m` (in `x^2`) Taylor polynomial of `cos`,
//! `cosh`, `sinc` or `sinch` at an argument of "size" `theta` is bounded by
//!
//! ```text
//! rho_m(theta) = sum_{j > m} theta^(2j) / (2j)!
//! ```
//!
//! and `theta_m` is the largest `theta` with `rho_m(theta) <= tol`.

use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{FunmvError, Result};

/// Largest degree for which built-in tables are cached.
pub const MAX_CACHED_DEGREE: usize = 60;

/// Built-in unit roundoffs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    Half,
    Single,
    Double,
}

impl Precision {
    pub const ALL: [Precision; 3] = [Precision::Half, Precision::Single, Precision::Double];

    pub fn tol(self) -> f64 {
        match self {
            Precision::Half => 2f64.powi(-10),
            Precision::Single => 2f64.powi(-24),
            Precision::Double => 2f64.powi(-53),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Precision::Half => "half",
            Precision::Single => "single",
            Precision::Double => "double",
        }
    }

    fn from_tol(tol: f64) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.tol() == tol)
    }
}

/// A tolerance given either by name or as a number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Tolerance {
    Named(Precision),
    Value(f64),
}

impl Tolerance {
    pub fn value(self) -> f64 {
        match self {
            Tolerance::Named(p) => p.tol(),
            Tolerance::Value(v) => v,
        }
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance::Named(Precision::Double)
    }
}

impl From<Precision> for Tolerance {
    fn from(p: Precision) -> Self {
        Tolerance::Named(p)
    }
}

impl FromStr for Tolerance {
    type Err = FunmvError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "half" => Ok(Precision::Half.into()),
            "single" => Ok(Precision::Single.into()),
            "double" => Ok(Precision::Double.into()),
            other => {
                let v: f64 = other
                    .parse()
                    .map_err(|_| FunmvError::InvalidInput(format!("bad tolerance `{s}`")))?;
                if v > 0.0 && v < 1.0 {
                    Ok(Tolerance::Value(v))
                } else {
                    Err(FunmvError::InvalidInput(format!(
                        "tolerance must lie in (0, 1), got {v}"
                    )))
                }
            }
        }
    }
}

/// `rho_m(theta)`, summed directly over the tail so small values keep full
/// relative accuracy. Returns `+inf` once `theta^(2(m+1))` overflows.
pub fn rho(m: usize, theta: f64) -> f64 {
    assert!(theta >= 0.0, "rho is defined for nonnegative arguments");
    if theta == 0.0 {
        return 0.0;
    }
    let first_power = 2.0 * (m as f64 + 1.0);
    if first_power * theta.ln() > f64::MAX.ln() {
        return f64::INFINITY;
    }
    let t2 = theta * theta;
    // theta^(2(m+1)) / (2(m+1))! as a product of O(1) factors
    let mut term = 1.0f64;
    for i in 1..=m + 1 {
        let i = i as f64;
        term *= t2 / ((2.0 * i - 1.0) * (2.0 * i));
    }
    let mut sum = 0.0f64;
    let mut j = m + 1;
    loop {
        sum += term;
        if !sum.is_finite() {
            return f64::INFINITY;
        }
        if term < 1e-30 * (sum + 1e-300) {
            return sum;
        }
        let jf = j as f64;
        term *= t2 / ((2.0 * jf + 1.0) * (2.0 * jf + 2.0));
        j += 1;
    }
}

/// Largest `theta` with `rho_m(theta) <= tol`, to relative width `5e-11`.
pub fn solve_theta(m: usize, tol: f64) -> f64 {
    assert!(tol > 0.0 && tol < 1.0, "tolerance must lie in (0, 1)");
    let mut lo = 0.0f64;
    let mut hi = 2.0 * m as f64 + 2.0;
    while rho(m, hi) <= tol {
        lo = hi;
        hi *= 2.0;
    }
    while hi - lo > 5e-11 * hi {
        let mid = 0.5 * (lo + hi);
        if rho(m, mid) <= tol {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// `theta_1, ..., theta_mmax` for one tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaTable {
    tol: f64,
    theta: Vec<f64>,
}

impl ThetaTable {
    /// Solves the table, reusing the cached built-in values when `tol` is one
    /// of the three built-in roundoffs.
    pub fn new(tol: f64, mmax: usize) -> Self {
        match Precision::from_tol(tol) {
            Some(p) if mmax <= MAX_CACHED_DEGREE => builtin_table(p, mmax),
            _ => Self::solve(tol, mmax),
        }
    }

    pub fn solve(tol: f64, mmax: usize) -> Self {
        Self {
            tol,
            theta: (1..=mmax).map(|m| solve_theta(m, tol)).collect(),
        }
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn mmax(&self) -> usize {
        self.theta.len()
    }

    /// `theta_m`, 1-based.
    pub fn theta(&self, m: usize) -> f64 {
        self.theta[m - 1]
    }

    pub fn values(&self) -> &[f64] {
        &self.theta
    }
}

/// Cached table for a built-in precision; `mmax <= 60`.
pub fn builtin_table(precision: Precision, mmax: usize) -> ThetaTable {
    static CACHE: [OnceLock<ThetaTable>; 3] = [OnceLock::new(), OnceLock::new(), OnceLock::new()];
    assert!(
        mmax <= MAX_CACHED_DEGREE,
        "built-in tables stop at m = {MAX_CACHED_DEGREE}"
    );
    let slot = match precision {
        Precision::Half => &CACHE[0],
        Precision::Single => &CACHE[1],
        Precision::Double => &CACHE[2],
    };
    let full = slot.get_or_init(|| ThetaTable::solve(precision.tol(), MAX_CACHED_DEGREE));
    ThetaTable {
        tol: full.tol,
        theta: full.theta[..mmax].to_vec(),
    }
}
