//! Benchmark cases: a matrix source, a right-hand side, `t`, a tolerance and
//! an option; the harness reports products, wall time and, when a dense or
//! sine-transform reference is affordable, the forward error.

use std::path::PathBuf;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::engine::{funmv, FunmvConfig, FunmvOption, ReportStats};
use crate::error::{FunmvError, Result};
use crate::generators::{self, RhsKind};
use crate::linalg::{DenseBlock, SparseMatrix};
use crate::mtx::{load_matrix, MtxMatrix};
use crate::oracle::{
    dense_func_action, dense_func_action_general, dense_func_action_precise, poisson_func_action, rel_err_one,
    DenseMatrix, Func, GENERAL_LIMIT, PRECISE_LIMIT,
};
use crate::theta::{Precision, Tolerance};

/// Largest order for which the eigendecomposition reference is attempted.
pub const EIGEN_LIMIT: usize = 2000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MatrixSource {
    File {
        path: PathBuf,
    },
    /// Five-point Laplacian on a `k x k` grid.
    Poisson {
        k: usize,
    },
    /// Upper triangular, unit diagonal, `c` above.
    Triw {
        n: usize,
        c: f64,
    },
    DiagRange {
        n: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchCase {
    pub name: String,
    pub source: MatrixSource,
    /// Use `-A` instead of `A`.
    pub negate: bool,
    pub rhs: RhsKind,
    pub t: f64,
    pub tol: Tolerance,
    pub option: FunmvOption,
}

impl BenchCase {
    /// `-poisson(99)`, `b = [cos 1, ..., cos n]`, `t = 500`, option 1.
    pub fn poisson(tol: Precision) -> Self {
        Self {
            name: format!("poisson-{}", tol.name()),
            source: MatrixSource::Poisson { k: 99 },
            negate: true,
            rhs: RhsKind::Cos,
            t: 500.0,
            tol: tol.into(),
            option: FunmvOption::CosSin,
        }
    }

    /// `-triw(2000, 4)`, `b = [cos 1, ..., cos n]`, `t = 10`, option 1.
    pub fn triw(tol: Precision) -> Self {
        Self {
            name: format!("triw-{}", tol.name()),
            source: MatrixSource::Triw { n: 2000, c: 4.0 },
            negate: true,
            rhs: RhsKind::Cos,
            t: 10.0,
            tol: tol.into(),
            option: FunmvOption::CosSin,
        }
    }

    /// `diag(1..100)`, ones, `t = 1`, option 5.
    pub fn diag() -> Self {
        Self {
            name: "diag".into(),
            source: MatrixSource::DiagRange { n: 100 },
            negate: false,
            rhs: RhsKind::Ones,
            t: 1.0,
            tol: Precision::Double.into(),
            option: FunmvOption::CosSincSqrt,
        }
    }

    pub fn matrix(&self) -> Result<SparseMatrix<f64>> {
        let a = match &self.source {
            MatrixSource::File { path } => match load_matrix(path)? {
                MtxMatrix::Real(a) => a,
                MtxMatrix::Complex(_) => return Err(FunmvError::InvalidInput("benchmarks take real matrices".into())),
            },
            MatrixSource::Poisson { k } => generators::poisson(*k),
            MatrixSource::Triw { n, c } => generators::triw(*n, *c),
            MatrixSource::DiagRange { n } => generators::diag_range(*n),
        };
        Ok(if self.negate { a.scaled(-1.0) } else { a })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchResult {
    pub name: String,
    pub n: usize,
    pub matvecs: u64,
    /// Fastest of the repeats, in seconds.
    pub wall_time: f64,
    /// 1-norm relative error of `C`, when a reference was affordable.
    pub error_c: Option<f64>,
    pub error_s: Option<f64>,
    pub stats: ReportStats,
}

fn funcs(option: FunmvOption) -> (Func, Func) {
    match option {
        FunmvOption::CosSin => (Func::Cos, Func::Sin),
        FunmvOption::CoshSinh => (Func::Cosh, Func::Sinh),
        FunmvOption::CosSinc | FunmvOption::CosSincSqrt => (Func::Cos, Func::Sinc),
        FunmvOption::CoshSinch | FunmvOption::CoshSinchSqrt => (Func::Cosh, Func::Sinch),
    }
}

/// Reference `(C, S)` for a case, or `None` when no reference path fits.
pub fn reference(
    case: &BenchCase,
    a: &SparseMatrix<f64>,
    b: &DenseBlock<f64>,
) -> Result<Option<(DenseBlock<f64>, DenseBlock<f64>)>> {
    let (fc, fs) = funcs(case.option);
    let sigma = case.option.sigma();
    let pair = |f: &dyn Fn(Func) -> Result<DenseBlock<f64>>| -> Result<Option<_>> { Ok(Some((f(fc)?, f(fs)?))) };
    match case.source {
        MatrixSource::Poisson { k } => pair(&|f| poisson_func_action(f, k, case.negate, sigma, case.t, b)),
        _ if a.n() <= EIGEN_LIMIT && a.is_symmetric() => {
            let d = DenseMatrix::from_sparse(a)?;
            pair(&|f| dense_func_action(f, &d, sigma, case.t, b))
        }
        _ if a.n() <= PRECISE_LIMIT => {
            let d = DenseMatrix::from_sparse(a)?;
            pair(&|f| dense_func_action_precise(f, &d, sigma, case.t, b))
        }
        _ if a.n() <= GENERAL_LIMIT => {
            let d = DenseMatrix::from_sparse(a)?;
            pair(&|f| dense_func_action_general(f, &d, sigma, case.t, b))
        }
        _ => Ok(None),
    }
}

/// Runs `case` `repeats` times (at least once) and checks the last run
/// against the reference when one is affordable.
pub fn bench(case: &BenchCase, repeats: usize) -> Result<BenchResult> {
    let a = case.matrix()?;
    let b = generators::rhs(case.rhs, a.n());
    let cfg = FunmvConfig::with_tol(case.tol);
    let mut best = Duration::MAX;
    let mut last = None;
    let mut counts = Vec::new();
    for _ in 0..repeats.max(1) {
        let start = Instant::now();
        let r = funmv(case.t, &a, &b, case.option, &cfg, None)?;
        best = best.min(start.elapsed());
        counts.push(r.matvecs);
        last = Some(r);
    }
    let r = last.expect("at least one repeat");
    debug_assert!(counts.iter().all(|&c| c == r.matvecs));
    let (error_c, error_s) = match reference(case, &a, &b)? {
        Some((c, s)) => (Some(rel_err_one(&r.c, &c)), Some(rel_err_one(&r.s, &s))),
        None => (None, None),
    };
    Ok(BenchResult {
        name: case.name.clone(),
        n: a.n(),
        matvecs: r.matvecs,
        wall_time: best.as_secs_f64(),
        error_c,
        error_s,
        stats: r.stats(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diag_case_counts_and_error() {
        let r = bench(&BenchCase::diag(), 2).unwrap();
        assert_eq!(r.matvecs, 51);
        assert!(r.error_c.unwrap() < 1e-14);
        assert!(r.error_s.unwrap() < 1e-14);
    }

    #[test]
    fn small_poisson_uses_sine_transform_reference() {
        let case = BenchCase {
            source: MatrixSource::Poisson { k: 12 },
            t: 3.0,
            ..BenchCase::poisson(Precision::Double)
        };
        let r = bench(&case, 1).unwrap();
        assert!(r.error_c.unwrap() < 1e-13, "{:?}", r.error_c);
        let again = bench(&case, 1).unwrap();
        assert_eq!(again.matvecs, r.matvecs);
    }

    #[test]
    fn reference_availability() {
        let small = BenchCase {
            source: MatrixSource::Triw { n: 40, c: 4.0 },
            t: 0.5,
            ..BenchCase::triw(Precision::Double)
        };
        let r = bench(&small, 1).unwrap();
        assert!(r.error_c.is_some());
        let big = BenchCase {
            source: MatrixSource::Triw {
                n: GENERAL_LIMIT + 1,
                c: 4.0,
            },
            t: 0.01,
            ..BenchCase::triw(Precision::Half)
        };
        let r = bench(&big, 1).unwrap();
        assert!(r.error_c.is_none());
        assert!(r.matvecs > 0);
    }

    #[test]
    fn case_serializes() {
        let case = BenchCase::poisson(Precision::Half);
        let text = serde_json::to_string(&case).unwrap();
        assert!(text.contains("\"kind\":\"poisson\""));
        assert_eq!(serde_json::from_str::<BenchCase>(&text).unwrap(), case);
    }
}
