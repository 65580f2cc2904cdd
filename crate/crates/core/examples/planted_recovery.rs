//! Plant a noisy rank-one block in a 120×120 matrix and recover it.

use std::time::Instant;

use laros::generators::{plant_rank_one, NoiseFamily, PlantedModel};
use laros::solver::{solve, SolverConfig};
use laros::structure::validate_planted_regime;

fn main() -> laros::Result<()> {
    let model = PlantedModel::new(120, 120, 40, 40, 1.0)
        .with_perturbation(0.02, 0.02)
        .with_noise(NoiseFamily::Uniform, 0.1);
    let theta = 1.0 / model.sqrt_mn();
    let regime = validate_planted_regime(&model, 0.05, theta);
    println!(
        "θ = {theta:.4}, window [{:.4}, {:.4}], violated: {:?}",
        regime.theta_lo, regime.theta_hi, regime.violated
    );
    let mut hits = 0;
    for seed in 0..5 {
        let inst = plant_rank_one(&model, seed)?;
        let start = Instant::now();
        let sol = solve(&inst.a, &SolverConfig::new(theta))?;
        let exact = sol.support_rows == inst.truth.rows() && sol.support_cols == inst.truth.cols();
        hits += exact as usize;
        println!(
            "seed {seed}: support {}×{} exact {exact} ({} iterations, {:.2?})",
            sol.support_rows.len(),
            sol.support_cols.len(),
            sol.iterations,
            start.elapsed()
        );
    }
    println!("{hits}/5 exact");
    Ok(())
}
