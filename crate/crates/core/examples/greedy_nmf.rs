//! Greedy nonnegative factorization of two noisy rank-one blocks.

use laros::generators::sample_noise;
use laros::generators::NoiseFamily;
use laros::nmf::{greedy_extract, ThetaSchedule};
use laros::solver::SolverConfig;
use laros::DenseMatrix;

fn main() -> laros::Result<()> {
    let u1: Vec<f64> = (0..20).map(|i| 1.0 + 0.02 * i as f64).collect();
    let u2: Vec<f64> = (0..20).map(|i| 1.4 - 0.03 * i as f64).collect();
    let noise = sample_noise(NoiseFamily::Uniform, 1.0, 0.005, 40, 40, 1)?;
    let a = DenseMatrix::from_fn(40, 40, |i, j| {
        let block = match (i < 20, j < 20) {
            (true, true) => u1[i] * u1[j],
            (false, false) => u2[i - 20] * u2[j - 20],
            _ => 0.0,
        };
        block + noise.get(i, j)
    })?;
    let theta = 1.0 / 20.0;
    let res = greedy_extract(&a, 3, &ThetaSchedule::Fixed(theta), &SolverConfig::new(theta))?;
    for (k, round) in res.rounds.iter().enumerate() {
        println!(
            "feature {k}: {} rows × {} cols, σ = {:.3}, residual {:.4}",
            round.support.rows().len(),
            round.support.cols().len(),
            round.sigma,
            res.residual_norms[k + 1]
        );
    }
    println!("relative residual {:.4}, short: {}", res.relative_residual(), res.short_count);
    Ok(())
}
