//! The block 1-norm estimator on matrix powers and the `alpha_p` sequence
//! that drives the choice of `(m*, s)`, for a nonnormal matrix where the
//! power norms fall well below `||A||_1`.

use funmv::linalg::one_norm;
use funmv::normest::{alpha_sequence, est_one_norm_power, PowerOperator};
use funmv::params::select_parameters;
use funmv::{generators, MatvecCounter, NormEstConfig, Result, SelectConfig, Sigma, ThetaTable};

fn main() -> Result<()> {
    let a = generators::triw(300, 4.0).scaled(-0.01);
    let exact = NormEstConfig::default();
    let estimated = NormEstConfig {
        exact_threshold: 0,
        ..exact
    };

    println!(" k  ||A^k||_1^(1/k) exact  estimate  products");
    for k in [1, 2, 4, 6] {
        let op = PowerOperator::new(&a, k);
        let mut c0 = MatvecCounter::new();
        let mut c1 = MatvecCounter::new();
        let x = est_one_norm_power(&op, &exact, &mut c0)?;
        let y = est_one_norm_power(&op, &estimated, &mut c1)?;
        println!(
            "{k:2}  {:21.4e}  {:8.4e}  {:8}",
            x.powf(1.0 / k as f64),
            y.powf(1.0 / k as f64),
            c1.get()
        );
    }

    let mut counter = MatvecCounter::new();
    let seq = alpha_sequence(&a, Sigma::One, 5, &estimated, &mut counter)?;
    println!("||A||_1 = {:.4e}", one_norm(&a));
    for p in 2..=5 {
        println!("alpha_{p} = {:.4e}", seq.alpha(p));
    }

    let theta = ThetaTable::new(2f64.powi(-53), 25);
    let cfg = SelectConfig {
        normest: estimated,
        ..SelectConfig::default()
    };
    for t in [1.0, 10.0, 100.0] {
        let mut counter = MatvecCounter::new();
        let choice = select_parameters(&a.scaled(t), Sigma::One, &theta, &cfg, 1, &mut counter)?;
        println!(
            "t = {t:5}: m* = {:2}, s = {:4}, estimator products = {:4}, {:?}",
            choice.m_star, choice.s, choice.theta_cost, choice.path
        );
    }
    Ok(())
}
