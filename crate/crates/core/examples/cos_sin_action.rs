//! `cos(tA)B` and `sin(tA)B` for a spring chain, checked against a dense
//! eigendecomposition, then the same with a complex `t`.
//!
//! cargo run --example cos_sin_action -- [n] [t]

use funmv::oracle::{dense_func_action, dense_func_action_general, rel_err_one, DenseMatrix, Func};
use funmv::{funmv, generators, Complex64, DenseBlock, FunmvConfig, FunmvOption, Result, Sigma};

fn main() -> Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(200, |s| s.parse().expect("n"));
    let t: f64 = args.next().map_or(20.0, |s| s.parse().expect("t"));

    let a = generators::spring_chain(n);
    let b = generators::rhs(generators::RhsKind::Cos, n);
    let cfg = FunmvConfig::default();

    let r = funmv(t, &a, &b, FunmvOption::CosSin, &cfg, None)?;
    let dense = DenseMatrix::from_sparse(&a)?;
    let c_ref = dense_func_action(Func::Cos, &dense, Sigma::One, t, &b)?;
    let s_ref = dense_func_action(Func::Sin, &dense, Sigma::One, t, &b)?;
    println!("n = {n}, t = {t}, ||A||_1 = {:.3e}", funmv::linalg::one_norm(&a));
    println!(
        "real:    s = {:4}  m* = {:2}  matvecs = {:6}  err C = {:.1e}  err S = {:.1e}",
        r.scaling,
        r.m_star,
        r.matvecs,
        rel_err_one(&r.c, &c_ref),
        rel_err_one(&r.s, &s_ref)
    );

    let tc = Complex64::new(t, 0.1);
    let ac = a.to_complex();
    let bc = b.to_complex();
    let rc = funmv(tc, &ac, &bc, FunmvOption::CosSin, &cfg, None)?;
    if n <= 512 {
        let dc = DenseMatrix::from_sparse(&ac)?;
        let c_ref = dense_func_action_general(Func::Cos, &dc, Sigma::One, tc, &bc)?;
        println!(
            "complex: s = {:4}  m* = {:2}  matvecs = {:6}  err C = {:.1e}  undo = {:?}",
            rc.scaling,
            rc.m_star,
            rc.matvecs,
            rel_err_one(&rc.c, &c_ref),
            rc.undo
        );
    }

    let zero = funmv(0.0, &a, &b, FunmvOption::CosSin, &cfg, None)?;
    assert_eq!(zero.c, b);
    assert_eq!(zero.s, DenseBlock::zeros(n, 1));
    println!("t = 0:   C = B, S = 0, matvecs = {}", zero.matvecs);
    Ok(())
}
