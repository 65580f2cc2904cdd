//! Closed-form thresholds: below θ_A the solution is rank one, above θ_B it
//! lives on the dominating block, and above a row threshold the dominated row
//! vanishes.

use laros::solver::{solve, SolverConfig};
use laros::structure::{row_zero_threshold, theta_a, theta_b, BlockSelector, Threshold};
use laros::DenseMatrix;

fn main() -> laros::Result<()> {
    let a = DenseMatrix::from_rows(&[
        [4.0, 3.5, 0.4, 0.2],
        [3.8, 4.2, 0.3, 0.5],
        [0.1, 0.6, 1.0, 0.9],
        [0.15, 0.1, 0.05, 0.02],
    ])?;
    let ta = theta_a(&a)?;
    println!("θ_A = {ta:.4}");

    let block = BlockSelector::leading(2, 2);
    let tb = theta_b(&a, &block)?;
    println!("θ_B(rows 0-1, cols 0-1) = {tb}");
    if let Threshold::Value(tb) = tb {
        let sol = solve(&a, &SolverConfig::new(1.2 * tb))?;
        println!("  at 1.2·θ_B: rows {:?} cols {:?}", sol.support_rows, sol.support_cols);
    }
    let sol = solve(&a, &SolverConfig::new(0.5 * ta))?;
    println!("  at θ_A/2: σ2/σ1 = {:.1e}", sol.sigma_ratio);

    if let Threshold::Value(t) = row_zero_threshold(&a, 0, 3)? {
        let sol = solve(&a, &SolverConfig::new(1.1 * t))?;
        println!("row 0 dominates row 3 above θ = {t:.4}; at 1.1× rows {:?}", sol.support_rows);
    }
    println!("row 2 vs row 0: {}", row_zero_threshold(&a, 2, 0)?);
    Ok(())
}
