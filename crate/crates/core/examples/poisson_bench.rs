//! The negated five-point Laplacian benchmark, `t = 500`, option 1, at the
//! three built-in precisions, checked against the sine-transform reference.
//!
//! cargo run --release --example poisson_bench -- [k] [triw]

use funmv::bench::{bench, BenchCase, MatrixSource};
use funmv::{Precision, Result};

fn main() -> Result<()> {
    let mut args = std::env::args().skip(1);
    let k: usize = args.next().map_or(99, |s| s.parse().expect("k"));
    let with_triw = args.next().as_deref() == Some("triw");

    println!("case              n  matvecs     s  m*   time (s)  err C    err S");
    let mut cases: Vec<BenchCase> = Precision::ALL
        .into_iter()
        .rev()
        .map(|p| BenchCase {
            source: MatrixSource::Poisson { k },
            ..BenchCase::poisson(p)
        })
        .collect();
    if with_triw {
        cases.extend(Precision::ALL.into_iter().rev().map(BenchCase::triw));
    }
    cases.push(BenchCase::diag());
    for case in &cases {
        let r = bench(case, 1)?;
        let fmt = |e: Option<f64>| e.map_or("-".to_string(), |e| format!("{e:.1e}"));
        println!(
            "{:14} {:5}  {:7} {:5}  {:2}  {:9.3}  {:7}  {}",
            r.name,
            r.n,
            r.matvecs,
            r.stats.s,
            r.stats.m_star,
            r.wall_time,
            fmt(r.error_c),
            fmt(r.error_s)
        );
    }
    Ok(())
}
