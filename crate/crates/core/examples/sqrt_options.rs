//! Options that act with `A^(1/2)` without forming it: `diag(1..100)`,
//! `b = ones`, `t = 1`. Option 5 on `A` against option 3 on the explicit
//! square root.

use funmv::{funmv, generators, FunmvConfig, FunmvOption, Result};

fn main() -> Result<()> {
    let n = 100;
    let a = generators::diag_range(n);
    let root = generators::diag_sqrt(n);
    let b = generators::rhs(generators::RhsKind::Ones, n);
    let cfg = FunmvConfig::default();

    let half = funmv(1.0, &a, &b, FunmvOption::CosSincSqrt, &cfg, None)?;
    let full = funmv(1.0, &root, &b, FunmvOption::CosSinc, &cfg, None)?;

    println!("option  operator   s  m*  matvecs  expected");
    for (r, op) in [(&half, "A"), (&full, "sqrt(A)")] {
        println!(
            "{:6}  {:8} {:2}  {:2}  {:7}  {:8}",
            r.option.id(),
            op,
            r.scaling,
            r.m_star,
            r.matvecs,
            r.expected_matvecs()
        );
    }

    let mut worst: f64 = 0.0;
    for i in 0..n {
        let x = ((i + 1) as f64).sqrt();
        worst = worst.max((half.c.get(i, 0) - x.cos()).abs());
        worst = worst.max((half.s.get(i, 0) - x.sin() / x).abs());
        worst = worst.max((half.c.get(i, 0) - full.c.get(i, 0)).abs());
    }
    println!("max entry error vs cos(sqrt k), sinc(sqrt k): {worst:.1e}");
    Ok(())
}
