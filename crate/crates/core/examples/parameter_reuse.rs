//! Building `S_pm` once and reusing it for many `t`: the norm estimates are
//! paid once instead of at every call.

use funmv::{funmv, generators, spm_for_option, FunmvConfig, FunmvOption, MatvecCounter, Result};

fn main() -> Result<()> {
    let a = generators::poisson(40).scaled(-1.0);
    let b = generators::rhs(generators::RhsKind::Cos, a.n());
    let option = FunmvOption::CosSin;
    let mut cfg = FunmvConfig::default();
    cfg.select.normest.exact_threshold = 0;

    let mut counter = MatvecCounter::new();
    let spm = spm_for_option(&a, option, &cfg, &mut counter)?;
    println!("S_pm built with {} products (n = {})", counter.get(), a.n());

    println!("     t  fresh  reused  theta  path");
    let (mut fresh_total, mut reused_total) = (0, counter.get());
    for t in [1.0, 5.0, 20.0, 80.0, 320.0] {
        let fresh = funmv(t, &a, &b, option, &cfg, None)?;
        let reused = funmv(t, &a, &b, option, &cfg, Some(&spm))?;
        assert!(funmv::oracle::rel_err_one(&fresh.c, &reused.c) < 1e-12);
        fresh_total += fresh.matvecs;
        reused_total += reused.matvecs;
        println!(
            "{t:6}  {:5}  {:6}  {:5}  {:?} / {:?}",
            fresh.matvecs, reused.matvecs, fresh.theta_cost, fresh.path, reused.path
        );
    }
    println!("total: fresh {fresh_total}, reused {reused_total} (including the table)");
    Ok(())
}
