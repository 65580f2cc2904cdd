//! Greedy nonnegative factorization: solve the relaxation on the current
//! residual, refit the selected submatrix by its dominant singular pair,
//! subtract, clamp at zero and repeat.

use serde::{Deserialize, Serialize};

use crate::error::{LarosError, Result};
use crate::matrix::{svd, DenseMatrix};
use crate::solver::{solve, SolverConfig};
use crate::structure::BlockSelector;

/// A residual with `‖R‖_F <= RESIDUAL_FLOOR · ‖A‖_F` counts as zero; exact
/// rank-one refits leave roundoff of about this size.
pub const RESIDUAL_FLOOR: f64 = 1e-12;

/// `θ` for each extraction round.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThetaSchedule {
    Fixed(f64),
    /// One value per round; the last value repeats if there are more rounds.
    PerRound(Vec<f64>),
}

impl ThetaSchedule {
    pub fn theta(&self, round: usize) -> f64 {
        match self {
            ThetaSchedule::Fixed(t) => *t,
            ThetaSchedule::PerRound(ts) => ts[round.min(ts.len() - 1)],
        }
    }

    fn validate(&self) -> Result<()> {
        let values: &[f64] = match self {
            ThetaSchedule::Fixed(t) => std::slice::from_ref(t),
            ThetaSchedule::PerRound(ts) => ts,
        };
        if values.is_empty() {
            return Err(LarosError::param("theta", "schedule is empty"));
        }
        if let Some(t) = values.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
            return Err(LarosError::param("theta", format!("must be finite and >= 0, got {t}")));
        }
        Ok(())
    }
}

impl From<f64> for ThetaSchedule {
    fn from(t: f64) -> Self {
        ThetaSchedule::Fixed(t)
    }
}

/// One extracted feature.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NmfRound {
    pub theta: f64,
    pub sigma: f64,
    pub support: BlockSelector,
    pub solver_iterations: usize,
}

/// `A ≈ W Hᵀ` with zero-padded nonnegative columns.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NmfResult {
    /// `m × k`, `k` the number of features found.
    pub w: DenseMatrix,
    /// `n × k`.
    pub h: DenseMatrix,
    /// Frobenius norm of the residual before the first and after each round.
    pub residual_norms: Vec<f64>,
    pub supports: Vec<BlockSelector>,
    pub rounds: Vec<NmfRound>,
    /// Set when the residual vanished before `p` features were found.
    pub short_count: bool,
    pub residual: DenseMatrix,
}

impl NmfResult {
    pub fn features(&self) -> usize {
        self.supports.len()
    }

    pub fn relative_residual(&self) -> f64 {
        self.residual_norms.last().copied().unwrap_or(0.0) / self.residual_norms[0]
    }
}

/// `max(R − σ ū v̄ᵀ, 0)` where `ū`, `v̄` are `u`, `v` (indexed like the block's
/// rows and columns) padded with zeros.
pub fn residual_update(
    r: &DenseMatrix,
    sigma: f64,
    u: &[f64],
    v: &[f64],
    block: &BlockSelector,
) -> Result<DenseMatrix> {
    let (m, n) = r.shape();
    block.check_bounds(m, n)?;
    if u.len() != block.rows().len() || v.len() != block.cols().len() {
        return Err(LarosError::DimensionMismatch {
            expected: format!("{:?}", block.size()),
            found: format!("({}, {})", u.len(), v.len()),
        });
    }
    let mut out = r.as_nalgebra().clone();
    for (a, &i) in block.rows().iter().enumerate() {
        for (b, &j) in block.cols().iter().enumerate() {
            out[(i, j)] = (out[(i, j)] - sigma * u[a] * v[b]).max(0.0);
        }
    }
    DenseMatrix::from_nalgebra(out)
}

/// Runs up to `p` extraction rounds on a nonnegative `a`.
///
/// `config` supplies the solver settings; its `theta` is replaced by the
/// schedule's value for each round. A solver failure to converge aborts with
/// [`LarosError::NotConverged`].
pub fn greedy_extract(
    a: &DenseMatrix,
    p: usize,
    schedule: &ThetaSchedule,
    config: &SolverConfig,
) -> Result<NmfResult> {
    if p == 0 {
        return Err(LarosError::param("p", "need at least one feature"));
    }
    if !a.is_nonnegative() {
        return Err(LarosError::InvalidInput("matrix has negative entries".into()));
    }
    if a.is_zero() {
        return Err(LarosError::Degenerate("cannot factor the zero matrix".into()));
    }
    schedule.validate()?;
    let (m, n) = a.shape();
    let mut residual = a.clone();
    let mut residual_norms = vec![a.frobenius_norm()];
    let mut w_cols: Vec<Vec<f64>> = Vec::new();
    let mut h_cols: Vec<Vec<f64>> = Vec::new();
    let mut supports = Vec::new();
    let mut rounds = Vec::new();
    let mut short_count = false;

    let floor = RESIDUAL_FLOOR * residual_norms[0];
    for round in 0..p {
        if residual.frobenius_norm() <= floor {
            short_count = true;
            break;
        }
        let theta = schedule.theta(round);
        let mut cfg = config.clone();
        cfg.theta = theta;
        let sol = solve(&residual, &cfg)?;
        if !sol.converged {
            return Err(LarosError::NotConverged {
                round,
                iterations: sol.iterations,
                gap: sol.dual_gap,
            });
        }
        let block = BlockSelector::new(sol.support_rows.clone(), sol.support_cols.clone())?;
        let sub = residual.select(block.rows(), block.cols())?;
        if sub.frobenius_norm() <= floor {
            short_count = true;
            break;
        }
        // the dominant pair of a nonnegative matrix can be taken nonnegative
        let f = svd(&sub)?;
        let sigma = f.sigma(0);
        let u: Vec<f64> = f.left_vector(0).into_iter().map(|x| x.max(0.0)).collect();
        let v: Vec<f64> = f.right_vector(0).into_iter().map(|x| x.max(0.0)).collect();
        residual = residual_update(&residual, sigma, &u, &v, &block)?;
        residual_norms.push(residual.frobenius_norm());

        let scale = sigma.sqrt();
        let mut wc = vec![0.0; m];
        let mut hc = vec![0.0; n];
        for (k, &i) in block.rows().iter().enumerate() {
            wc[i] = scale * u[k];
        }
        for (k, &j) in block.cols().iter().enumerate() {
            hc[j] = scale * v[k];
        }
        w_cols.push(wc);
        h_cols.push(hc);
        rounds.push(NmfRound {
            theta,
            sigma,
            support: block.clone(),
            solver_iterations: sol.iterations,
        });
        supports.push(block);
    }

    let k = supports.len();
    let (w, h) = if k == 0 {
        (DenseMatrix::zeros(m, 1), DenseMatrix::zeros(n, 1))
    } else {
        (
            DenseMatrix::from_fn(m, k, |i, c| w_cols[c][i])?,
            DenseMatrix::from_fn(n, k, |j, c| h_cols[c][j])?,
        )
    };
    Ok(NmfResult {
        w,
        h,
        residual_norms,
        supports,
        rounds,
        short_count,
        residual,
    })
}
