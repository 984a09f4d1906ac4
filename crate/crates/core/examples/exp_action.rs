//! `e^{tA}B` as `cosh(tA)B + sinh(tA)B`, compared with a dense
//! scaling-and-squaring exponential on an upper triangular matrix.

use funmv::oracle::{dense_expm, rel_err_one, DenseMatrix};
use funmv::{exp_action, generators, FunmvConfig, Precision, Result};

fn main() -> Result<()> {
    let n = 60;
    let a = generators::triw(n, 0.5);
    let b = generators::rhs(generators::RhsKind::Ends, n);
    let dense = DenseMatrix::from_sparse(&a)?;

    println!("    t  precision  rel err");
    for t in [0.1, 1.0, 5.0] {
        let reference = dense_expm(&dense, t)?.mul_block(&b);
        for p in Precision::ALL {
            let x = exp_action(t, &a, &b, &FunmvConfig::with_tol(p))?;
            println!("{t:5}  {:9}  {:.1e}", p.name(), rel_err_one(&x, &reference));
        }
    }
    Ok(())
}
