//! The trigonometric integrator on `y'' = -A y + g(y)` for a spring chain.
//! Without forcing every filter reproduces the exact flow; with the cubic
//! forcing `g(y) = -eps y^3` the filters differ in how well they keep the
//! energy `y'y'/2 + y'Ay/2 + eps sum(y^4)/4`.
//!
//! cargo run --example wave_integrator -- [n] [steps]

use funmv::integrator::{run, FilterSpec, IntegratorState};
use funmv::{generators, FunmvConfig, Result, SparseMatrix};

fn drift(a: &SparseMatrix<f64>, states: &[IntegratorState], eps: f64) -> Result<f64> {
    let energy = |s: &IntegratorState| -> Result<f64> {
        Ok(s.energy(a)? + 0.25 * eps * s.y.iter().map(|v| v.powi(4)).sum::<f64>())
    };
    let e0 = energy(&states[0])?;
    let mut worst: f64 = 0.0;
    for s in states {
        worst = worst.max((energy(s)? - e0).abs() / e0);
    }
    Ok(worst)
}

fn main() -> Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(50, |s| s.parse().expect("n"));
    let steps: usize = args.next().map_or(100, |s| s.parse().expect("steps"));

    let a = generators::spring_chain(n).scaled(((n + 1) * (n + 1)) as f64);
    let h = 0.05;
    let y0: Vec<f64> = (0..n)
        .map(|i| (std::f64::consts::PI * (i + 1) as f64 / (n + 1) as f64).sin())
        .collect();
    let yp0 = vec![0.0; n];
    let cfg = FunmvConfig::default();
    let eps = 50.0;
    let g = move |y: &[f64]| y.iter().map(|v| -eps * v * v * v).collect::<Vec<f64>>();

    println!("h ||A||^(1/2) = {:.1}", h * funmv::linalg::one_norm(&a).sqrt());
    println!("filter           linear drift  forced drift  matvecs  of which S_pm");
    for name in ["none", "hairer-lubich", "grimm-hochbruck"] {
        let filter = FilterSpec::from_name(name)?;
        let linear = run(&a, y0.clone(), yp0.clone(), None, filter, h, steps, &cfg, true)?;
        let forced = run(&a, y0.clone(), yp0.clone(), Some(&g), filter, h, steps, &cfg, true)?;
        println!(
            "{name:16} {:12.1e}  {:12.1e}  {:7}  {:13}",
            drift(&a, &linear.states, 0.0)?,
            drift(&a, &forced.states, eps)?,
            forced.matvecs,
            forced.spm_matvecs
        );
    }
    Ok(())
}
