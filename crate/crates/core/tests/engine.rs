use funmv::bench::{bench, BenchCase, MatrixSource};
use funmv::generators::{self, RhsKind};
use funmv::linalg::one_norm;
use funmv::oracle::{dense_func_action_general, dense_func_action_precise, rel_err_one, DenseMatrix, Func};
use funmv::{
    funmv, spm_for_option, Complex64, DenseBlock, FunmvConfig, FunmvOption, MatvecCounter, Precision, SelectionPath,
    SparseMatrix, UndoMode,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn funcs(option: FunmvOption) -> (Func, Func) {
    match option {
        FunmvOption::CosSin => (Func::Cos, Func::Sin),
        FunmvOption::CoshSinh => (Func::Cosh, Func::Sinh),
        FunmvOption::CosSinc | FunmvOption::CosSincSqrt => (Func::Cos, Func::Sinc),
        FunmvOption::CoshSinch | FunmvOption::CoshSinchSqrt => (Func::Cosh, Func::Sinch),
    }
}

fn complex_matrix(rng: &mut ChaCha8Rng, n: usize, norm: f64) -> SparseMatrix<Complex64> {
    let d: Vec<Complex64> = (0..n * n)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let a = SparseMatrix::from_dense(n, &d);
    a.scaled(Complex64::new(norm / one_norm(&a), 0.0))
}

#[test]
fn complex_data_matches_series_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let cfg = FunmvConfig::with_tol(Precision::Single);
    for trial in 0..24 {
        let n = rng.gen_range(2..=8);
        let norm = rng.gen_range(0.5..6.0);
        let a = complex_matrix(&mut rng, n, norm);
        let b = DenseBlock::from_col_major(
            n,
            2,
            (0..2 * n)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect(),
        )
        .unwrap();
        let t = Complex64::new(rng.gen_range(-2.0..2.0), if trial % 3 == 0 { 0.0 } else { 0.5 });
        let dense = DenseMatrix::from_sparse(&a).unwrap();
        for option in FunmvOption::ALL {
            let (fc, fs) = funcs(option);
            let r = funmv(t, &a, &b, option, &cfg, None).unwrap();
            let c = dense_func_action_general(fc, &dense, option.sigma(), t, &b).unwrap();
            let s = dense_func_action_general(fs, &dense, option.sigma(), t, &b).unwrap();
            let err = rel_err_one(&r.c, &c).max(rel_err_one(&r.s, &s));
            assert!(
                err < 100.0 * cfg.tol.value(),
                "trial {trial} option {}: {err:e}",
                option.id()
            );
            assert_eq!(r.matvecs, r.expected_matvecs());
        }
    }
}

#[test]
fn complex_shift_chooses_inside_undo() {
    let n = 6;
    let a = generators::spring_chain(n).to_complex();
    let shift = SparseMatrix::from_diagonal(&vec![Complex64::new(-2.0, 2.0); n]);
    let d: Vec<Complex64> = a.to_dense().iter().zip(shift.to_dense()).map(|(x, y)| x + y).collect();
    let a = SparseMatrix::from_dense(n, &d);
    let b = generators::rhs(RhsKind::Cos, n).to_complex();
    let cfg = FunmvConfig::default();
    let trig = funmv(Complex64::new(1.0, 0.0), &a, &b, FunmvOption::CosSin, &cfg, None).unwrap();
    assert_eq!(trig.mu, Complex64::new(0.0, 2.0));
    assert_eq!(trig.undo, UndoMode::Inside);
    let hyp = funmv(Complex64::new(1.0, 0.0), &a, &b, FunmvOption::CoshSinh, &cfg, None).unwrap();
    assert_eq!(hyp.undo, UndoMode::Outside);
    let dense = DenseMatrix::from_sparse(&a).unwrap();
    let c = dense_func_action_general(Func::Cos, &dense, funmv::Sigma::One, Complex64::new(1.0, 0.0), &b).unwrap();
    assert!(rel_err_one(&trig.c, &c) < 1e-12);
}

#[test]
fn reused_table_matches_fresh_selection_for_many_t() {
    let a = generators::poisson(20).scaled(-1.0);
    let b = generators::rhs(RhsKind::Cos, a.n());
    let mut cfg = FunmvConfig::default();
    cfg.select.normest.exact_threshold = 0;
    for option in FunmvOption::ALL {
        let spm = spm_for_option(&a, option, &cfg, &mut MatvecCounter::new()).unwrap();
        for t in [-30.0, -1.0, 0.25, 3.0, 50.0] {
            let fresh = funmv(t, &a, &b, option, &cfg, None).unwrap();
            let reused = funmv(t, &a, &b, option, &cfg, Some(&spm)).unwrap();
            assert_eq!(reused.path, SelectionPath::Precomputed);
            assert_eq!(reused.theta_cost, 0);
            assert!(reused.scaling >= fresh.scaling || fresh.path != SelectionPath::FullAlpha);
            let scale = fresh.c.one_norm().max(fresh.s.one_norm());
            assert!(
                reused.c.sub(&fresh.c).one_norm() <= 1e-12 * scale,
                "option {} t {t}",
                option.id()
            );
        }
    }
}

#[test]
fn truncated_triw_matches_series_oracle() {
    for p in Precision::ALL {
        let case = BenchCase {
            source: MatrixSource::Triw { n: 120, c: 4.0 },
            t: 1.0,
            ..BenchCase::triw(p)
        };
        let first = bench(&case, 1).unwrap();
        let again = bench(&case, 1).unwrap();
        assert_eq!(first.matvecs, again.matvecs);
        let err = first.error_c.unwrap().max(first.error_s.unwrap());
        assert!(err < 1e3 * p.tol(), "{}: {err:e}", p.name());
    }
}

#[test]
fn negative_definite_block_of_three_columns() {
    let a = generators::poisson(6).scaled(-1.0);
    let n = a.n();
    let b = DenseBlock::from_columns(&[
        generators::rhs(RhsKind::Cos, n).column(0).to_vec(),
        generators::rhs(RhsKind::Ones, n).column(0).to_vec(),
        generators::rhs(RhsKind::Ends, n).column(0).to_vec(),
    ])
    .unwrap();
    let dense = DenseMatrix::from_sparse(&a).unwrap();
    for option in FunmvOption::ALL {
        let (fc, fs) = funcs(option);
        let r = funmv(2.0, &a, &b, option, &FunmvConfig::default(), None).unwrap();
        let c = dense_func_action_precise(fc, &dense, option.sigma(), 2.0, &b).unwrap();
        let s = dense_func_action_precise(fs, &dense, option.sigma(), 2.0, &b).unwrap();
        assert!(rel_err_one(&r.c, &c) < 1e-12, "option {}", option.id());
        assert!(rel_err_one(&r.s, &s) < 1e-12, "option {}", option.id());
        assert_eq!(r.stats().n0, 3);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn symmetric_random_against_precise_oracle(
        seed in any::<u64>(),
        n in 2usize..10,
        norm in 0.1f64..20.0,
        t in prop::sample::select(vec![-2.0, 0.5, 1.0, 3.0]),
        opt in 1u8..=6,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v = rng.gen_range(-1.0..1.0);
                d[i * n + j] = v;
                d[j * n + i] = v;
            }
        }
        let a0 = SparseMatrix::from_dense(n, &d);
        let a = a0.scaled(norm / one_norm(&a0));
        let b = DenseBlock::from_column((0..n).map(|_| rng.gen_range(-1.0..1.0)).collect());
        let option = FunmvOption::from_id(opt).unwrap();
        let (fc, fs) = funcs(option);
        let dense = DenseMatrix::from_sparse(&a).unwrap();
        let cfg = FunmvConfig::with_tol(Precision::Single);
        let r = funmv(t, &a, &b, option, &cfg, None).unwrap();
        let c = dense_func_action_precise(fc, &dense, option.sigma(), t, &b).unwrap();
        let s = dense_func_action_precise(fs, &dense, option.sigma(), t, &b).unwrap();
        prop_assert!(rel_err_one(&r.c, &c) < 1e3 * cfg.tol.value());
        prop_assert!(rel_err_one(&r.s, &s) < 1e3 * cfg.tol.value());
        prop_assert_eq!(r.matvecs, r.expected_matvecs());
    }
}

#[test]
#[ignore = "full-size triangular benchmark takes minutes; run with --ignored --release"]
fn triw_benchmark_counts() {
    for (p, count) in [
        (Precision::Double, 27005.0),
        (Precision::Single, 13011.0),
        (Precision::Half, 7381.0),
    ] {
        let r = bench(&BenchCase::triw(p), 1).unwrap();
        let dev = (r.matvecs as f64 - count).abs() / count;
        assert!(dev <= 0.2, "{}: {} vs {count}", p.name(), r.matvecs);
        assert!(r.error_c.is_none());
    }
}

#[test]
#[ignore = "full-size triangular wave problem; run with --ignored --release"]
fn triw_square_root_counts() {
    let a = generators::triw(2000, 4.0).scaled(-1.0);
    let b = DenseBlock::from_columns(&[
        generators::rhs(RhsKind::Cos, 2000).column(0).to_vec(),
        generators::rhs(RhsKind::Sin, 2000).column(0).to_vec(),
    ])
    .unwrap();
    for (p, count) in [
        (Precision::Double, 1694.0),
        (Precision::Single, 930.0),
        (Precision::Half, 650.0),
    ] {
        let r = funmv(10.0, &a, &b, FunmvOption::CosSincSqrt, &FunmvConfig::with_tol(p), None).unwrap();
        let dev = (r.matvecs as f64 - count).abs() / count;
        assert!(dev <= 0.2, "{}: {} vs {count}", p.name(), r.matvecs);
    }
}
