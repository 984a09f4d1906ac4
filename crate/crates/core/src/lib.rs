//! Actions of `cos`, `cosh`, `sin`, `sinh`, `sinc` and `sinch` of a sparse
//! matrix (or of its square root) on a thin block of vectors, using only
//! sparse matrix-block products.
//!
//! ```
//! use funmv::{funmv, generators, DenseBlock, FunmvConfig, FunmvOption};
//!
//! let a = generators::diag_range(50);
//! let b = DenseBlock::from_column(vec![1.0; 50]);
//! let r = funmv(1.0, &a, &b, FunmvOption::CosSin, &FunmvConfig::default(), None).unwrap();
//! assert!((r.c.get(0, 0) - 1f64.cos()).abs() < 1e-12);
//! assert!((r.s.get(9, 0) - 10f64.sin()).abs() < 1e-12);
//! ```

pub mod bench;
pub mod engine;
pub mod error;
pub mod generators;
pub mod integrator;
pub mod linalg;
pub mod mtx;
pub mod normest;
pub mod oracle;
pub mod params;
pub mod scalar;
pub mod theta;

pub use engine::{
    exp_action, funmv, spm_for_option, FunmvConfig, FunmvOption, FunmvReport, ReportStats, TermNorm, UndoMode,
};
pub use error::{FunmvError, Result};
pub use linalg::{DenseBlock, MatvecCounter, SparseMatrix};
pub use normest::{NormEstConfig, Sigma};
pub use num_complex::Complex64;
pub use params::{SelectConfig, SelectionPath, SpmMatrix};
pub use scalar::Scalar;
pub use theta::{Precision, ThetaTable, Tolerance};
