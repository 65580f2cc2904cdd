//! Solve the two-block 6×6 demonstration matrix and print the recovered block.

use laros::generators::example_6x6;
use laros::solver::{solve, SolverConfig};

fn main() -> laros::Result<()> {
    let a = example_6x6();
    for theta in [0.0, 0.25, 0.5, 1.0] {
        let sol = solve(&a, &SolverConfig::new(theta))?;
        println!(
            "θ = {theta:<4} rows {:?} cols {:?} σ = {:.4} rank one: {} iterations: {}",
            sol.support_rows, sol.support_cols, sol.sigma, sol.rank_one, sol.iterations
        );
    }
    let sol = solve(&a, &SolverConfig::new(0.5))?;
    println!("\nX at θ = 0.5:");
    for i in 0..6 {
        let row: Vec<String> = sol.x.row(i).iter().map(|x| format!("{x:7.4}")).collect();
        println!("  {}", row.join(" "));
    }
    Ok(())
}
