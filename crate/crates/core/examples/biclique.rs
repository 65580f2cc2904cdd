//! Plant a 15×15 biclique in a random 60×60 bipartite graph and try to find
//! it at several values of θ.

use laros::generators::plant_biclique;
use laros::solver::{solve, SolverConfig};

fn main() -> laros::Result<()> {
    let base = 1.0 / 15.0;
    for factor in [1.0, 2.0, 4.0, 6.0] {
        let theta = factor * base;
        let mut hits = 0;
        let mut sizes = Vec::new();
        for seed in 0..5 {
            let inst = plant_biclique(60, 60, 15, 15, 0.5, seed)?;
            let sol = solve(&inst.a, &SolverConfig::new(theta))?;
            hits += (sol.support_rows == inst.truth.rows() && sol.support_cols == inst.truth.cols()) as usize;
            sizes.push((sol.support_rows.len(), sol.support_cols.len()));
        }
        println!("θ = {factor}/15: {hits}/5 exact, supports {sizes:?}");
    }
    Ok(())
}
