//! Scaling thresholds `theta_m` for the built-in precisions and for a custom
//! tolerance, with `rho_m(theta_m) = tol` checked at each degree.

use funmv::theta::{rho, Tolerance};
use funmv::{Precision, ThetaTable};

fn main() {
    let degrees = [2, 4, 6, 8, 10, 12, 15, 18, 21, 25, 30, 40];
    let custom: Tolerance = "1e-8".parse().expect("tolerance");
    let mut tables: Vec<(String, ThetaTable)> = Precision::ALL
        .into_iter()
        .map(|p| (p.name().to_string(), ThetaTable::new(p.tol(), 40)))
        .collect();
    tables.push(("1e-8".into(), ThetaTable::new(custom.value(), 40)));

    print!("  m");
    for (name, _) in &tables {
        print!("  {name:>9}");
    }
    println!();
    for m in degrees {
        print!("{m:3}");
        for (_, table) in &tables {
            print!("  {:9.2e}", table.theta(m));
        }
        println!();
    }

    let worst = tables
        .iter()
        .flat_map(|(_, t)| degrees.map(|m| (rho(m, t.theta(m)) / t.tol() - 1.0).abs()))
        .fold(0.0, f64::max);
    println!("max |rho_m(theta_m) / tol - 1| = {worst:.1e}");
}
