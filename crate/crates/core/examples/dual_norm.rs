//! The dual θ-norm as θ moves from the spectral norm toward the largest entry.

use laros::matrix::norm;
use laros::solver::dual_theta_norm;
use laros::{DenseMatrix, NormKind};

fn main() -> laros::Result<()> {
    let a = DenseMatrix::from_rows(&[[3.0, 1.0, 0.5], [1.0, 2.0, 0.2], [0.4, 0.3, 2.5]])?;
    println!("‖A‖ = {:.4}, ‖A‖_∞ = {}", norm(&a, NormKind::Spectral), norm(&a, NormKind::Linf));
    for theta in [0.0, 0.1, 0.5, 1.0, 2.0, 5.0, 20.0] {
        let d = dual_theta_norm(&a, theta)?;
        println!("θ = {theta:<5} ‖A‖_θ* = {d:.6}  (1+θ)‖A‖_θ* = {:.6}", (1.0 + theta) * d);
    }
    Ok(())
}
