//! Solver for
//!
//! ```text
//! minimize ‖X‖_* + θ‖X‖_1   subject to <A, X> >= 1
//! ```
//!
//! by consensus ADMM over three copies of `X`: one handled by singular value
//! thresholding, one by soft thresholding and one by projection onto the
//! constraint half-space.
//!
//! The scaled multipliers of the first two copies are, exactly at every
//! iteration, elements of `∂‖X1‖_*` and `θ∂‖X2‖_1`, and the multiplier of the
//! half-space copy is always a nonnegative multiple `μA`. Dividing the first
//! two by `μ` therefore gives a decomposition `Y + Z = A` whose value
//! `max{‖Y‖, θ⁻¹‖Z‖_∞}` bounds the dual θ-norm from above, and the gap between
//! that bound and the primal objective is what stops the iteration.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{LarosError, Result};
use crate::matrix::{
    l1_raw, linf_raw, project_halfspace_raw, singular_values_raw, soft_threshold_raw, svd,
    svt_raw, theta_norm, DenseMatrix, NormKind,
};

/// Parameters of a solve. `theta` has no default.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub theta: f64,
    /// Splitting penalty ρ, applied to the problem after `A` is scaled to unit
    /// Frobenius norm.
    pub penalty: f64,
    pub max_iters: usize,
    pub tol_primal: f64,
    pub tol_dual: f64,
    pub tol_gap: f64,
    /// Rows/columns whose largest entry is at most `support_tol · ‖X‖_∞` are
    /// treated as zero.
    pub support_tol: f64,
}

impl SolverConfig {
    pub fn new(theta: f64) -> Self {
        SolverConfig {
            theta,
            penalty: 1.0,
            max_iters: 50_000,
            tol_primal: 1e-8,
            tol_dual: 1e-8,
            tol_gap: 1e-8,
            support_tol: 1e-6,
        }
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tol_primal = tol;
        self.tol_dual = tol;
        self.tol_gap = tol;
        self
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    pub fn with_penalty(mut self, penalty: f64) -> Self {
        self.penalty = penalty;
        self
    }

    pub fn with_support_tol(mut self, support_tol: f64) -> Self {
        self.support_tol = support_tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.theta.is_finite() && self.theta >= 0.0) {
            return Err(LarosError::param("theta", format!("must be finite and >= 0, got {}", self.theta)));
        }
        if !(self.penalty.is_finite() && self.penalty > 0.0) {
            return Err(LarosError::param("penalty", format!("must be positive, got {}", self.penalty)));
        }
        if self.max_iters == 0 {
            return Err(LarosError::param("max_iters", "must be at least 1"));
        }
        for (name, v) in [
            ("tol_primal", self.tol_primal),
            ("tol_dual", self.tol_dual),
            ("tol_gap", self.tol_gap),
            ("support_tol", self.support_tol),
        ] {
            if !(v > 0.0 && v < 1.0) {
                return Err(LarosError::param(name, format!("must lie in (0, 1), got {v}")));
            }
        }
        Ok(())
    }
}

/// Leading singular triple of a matrix together with its row/column support.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankOneStructure {
    pub sigma: f64,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    /// 0-based rows `i` with `max_j |x_ij| > support_tol · ‖X‖_∞`.
    pub support_rows: Vec<usize>,
    pub support_cols: Vec<usize>,
    /// `σ_2 / σ_1` of the matrix (0 when the matrix is zero).
    pub sigma_ratio: f64,
    /// `σ_2 / σ_1 <= 1e-6`.
    pub rank_one: bool,
}

/// Dual-side diagnostics for uniqueness: an optimal `X` is unique when the
/// spectral norm is differentiable at `Y` (simple top singular value) or the
/// ℓ∞ norm is differentiable at `Z` (single maximal entry).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniquenessDiagnostics {
    /// `(σ_1(Y) − σ_2(Y)) / σ_1(Y)`.
    pub y_relative_gap: f64,
    /// Number of entries of `Z` within a relative 1e-6 of `‖Z‖_∞`.
    pub z_argmax_multiplicity: usize,
    pub certified_unique: bool,
}

/// Multiplier information kept from the splitting, enough to rebuild a dual
/// certificate.
#[derive(Clone, Debug)]
pub struct SplittingState {
    pub theta: f64,
    pub converged: bool,
    pub iterations: usize,
    /// Spectral part of the decomposition `Y + Z = A`.
    pub y: DenseMatrix,
    /// ℓ∞ part of the decomposition.
    pub z: DenseMatrix,
    /// `‖X̂‖_*` and `‖X̂‖_1` of the reported solution rescaled to unit θ-norm.
    pub alpha: f64,
    pub beta: f64,
}

/// Result of [`solve`].
#[derive(Clone, Debug)]
pub struct LarosSolution {
    /// Optimizer scaled so that `<A, X> = 1`.
    pub x: DenseMatrix,
    pub sigma: f64,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub support_rows: Vec<usize>,
    pub support_cols: Vec<usize>,
    /// `‖X‖_θ`.
    pub objective: f64,
    /// Upper bound on `‖A‖_θ*` from the recovered decomposition.
    pub dual_norm: f64,
    /// Relative gap between `objective` and `1 / dual_norm`.
    pub dual_gap: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub iterations: usize,
    pub converged: bool,
    pub rank_one: bool,
    pub sigma_ratio: f64,
    pub uniqueness: UniquenessDiagnostics,
    pub non_unique: bool,
    pub state: SplittingState,
}

impl LarosSolution {
    /// The optimizer of the unit-ball form `max <A, X> s.t. ‖X‖_θ <= 1`,
    /// i.e. `X · ‖A‖_θ*`.
    pub fn scaled_x(&self) -> DenseMatrix {
        self.x.scale(self.dual_norm)
    }

    /// Certificate rebuilt from the final multipliers.
    pub fn certificate(&self, a: &DenseMatrix) -> Result<DualCertificate> {
        recover_dual(a, self.state.theta, &self.state)
    }

    pub fn structure(&self) -> RankOneStructure {
        RankOneStructure {
            sigma: self.sigma,
            u: self.u.clone(),
            v: self.v.clone(),
            support_rows: self.support_rows.clone(),
            support_cols: self.support_cols.clone(),
            sigma_ratio: self.sigma_ratio,
            rank_one: self.rank_one,
        }
    }
}

/// A decomposition `Y + Z = A` with the scalars of the optimality system.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualCertificate {
    pub y: DenseMatrix,
    pub z: DenseMatrix,
    pub alpha: f64,
    pub beta: f64,
    /// `max{‖Y‖, θ⁻¹‖Z‖_∞}`, which equals `‖A‖_θ*` at optimality.
    pub dual_norm: f64,
    pub lambda_star: f64,
}

/// Residuals of the four optimality conditions for the unit-ball problem plus
/// its normalization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimalityReport {
    /// `|‖Y‖ − θ⁻¹‖Z‖_∞|` (zero by convention when θ = 0, where only `Z = 0`
    /// is admissible and its deviation is reported in `decomposition`).
    pub balance: f64,
    /// `|<X, Y> − ‖X‖_* ‖Y‖|`.
    pub spectral_alignment: f64,
    /// `|<X, Z> − ‖X‖_1 ‖Z‖_∞|`.
    pub linf_alignment: f64,
    /// `|α + θβ − 1|`.
    pub weights: f64,
    /// `|‖X‖_θ − 1|`.
    pub normalization: f64,
    /// `|α − ‖X‖_*|`.
    pub alpha_consistency: f64,
    /// `|β − ‖X‖_1|`.
    pub beta_consistency: f64,
    /// `‖Y + Z − A‖_F / ‖A‖_F`, plus `‖Z‖_∞` when θ = 0.
    pub decomposition: f64,
}

impl OptimalityReport {
    pub fn max_residual(&self) -> f64 {
        [
            self.balance,
            self.spectral_alignment,
            self.linf_alignment,
            self.weights,
            self.normalization,
            self.alpha_consistency,
            self.beta_consistency,
            self.decomposition,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    pub fn certifies(&self, tol: f64) -> bool {
        self.max_residual() <= tol
    }
}

/// Lazily evaluated view of one splitting iterate, passed to observers.
pub struct IterationView<'a> {
    pub iteration: usize,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub gap: f64,
    /// Fixed-point residual `ρ(3‖Δz‖² + Σ‖Δu_i‖²)`, nonincreasing for ADMM.
    pub merit: f64,
    scale: f64,
    theta: f64,
    a_bar: &'a DMatrix<f64>,
    x_halfspace: &'a DMatrix<f64>,
    g_nuclear: &'a DMatrix<f64>,
    mu: f64,
}

impl IterationView<'_> {
    /// The half-space copy in the units of `A`; always satisfies `<A, X> >= 1`.
    pub fn feasible_point(&self) -> DenseMatrix {
        DenseMatrix::wrap(self.x_halfspace / self.scale)
    }

    /// The decomposition `(Y, Z)` of `A` read off the multipliers, if the
    /// constraint multiplier is already positive.
    pub fn decomposition(&self) -> Option<(DenseMatrix, DenseMatrix)> {
        decomposition_from(self.a_bar, self.g_nuclear, self.mu, self.scale, self.theta)
    }
}

fn decomposition_from(
    a_bar: &DMatrix<f64>,
    g_nuclear: &DMatrix<f64>,
    mu: f64,
    scale: f64,
    theta: f64,
) -> Option<(DenseMatrix, DenseMatrix)> {
    if theta == 0.0 {
        let a = a_bar * scale;
        let z = DMatrix::zeros(a.nrows(), a.ncols());
        return Some((DenseMatrix::wrap(a), DenseMatrix::wrap(z)));
    }
    if !(mu > 0.0) {
        return None;
    }
    let y = g_nuclear * (scale / mu);
    let z = a_bar * scale - &y;
    Some((DenseMatrix::wrap(y), DenseMatrix::wrap(z)))
}

/// Solves the relaxation for a nonzero `A`.
pub fn solve(a: &DenseMatrix, config: &SolverConfig) -> Result<LarosSolution> {
    solve_with_observer(a, config, |_| {})
}

/// [`solve`], calling `observer` after every iteration.
pub fn solve_with_observer(
    a: &DenseMatrix,
    config: &SolverConfig,
    mut observer: impl FnMut(&IterationView<'_>),
) -> Result<LarosSolution> {
    config.validate()?;
    let scale = a.frobenius_norm();
    if scale == 0.0 {
        return Err(LarosError::Degenerate("A is the zero matrix".into()));
    }
    let theta = config.theta;
    let rho = config.penalty;
    let a_bar: DMatrix<f64> = a.as_nalgebra() / scale;
    let a_bar_norm2 = a_bar.norm_squared();
    let (m, n) = a_bar.shape();
    // With θ = 0 the decomposition is pinned to Y = A, Z = 0.
    let spectral_a_bar = if theta == 0.0 {
        singular_values_raw(&a_bar)[0]
    } else {
        f64::NAN
    };

    let mut z = DMatrix::zeros(m, n);
    let mut u = [DMatrix::zeros(m, n), DMatrix::zeros(m, n), DMatrix::zeros(m, n)];
    let mut x1 = DMatrix::zeros(m, n);
    let mut x2 = DMatrix::zeros(m, n);
    let mut x3 = DMatrix::zeros(m, n);
    let mut g1 = DMatrix::zeros(m, n);
    let mut mu = 0.0;

    let mut primal_res = f64::INFINITY;
    let mut dual_res = f64::INFINITY;
    let mut gap = f64::INFINITY;
    let mut iterations = 0;
    let mut converged = false;

    for k in 1..=config.max_iters {
        iterations = k;
        let v1 = &z - &u[0];
        let v2 = &z - &u[1];
        let v3 = &z - &u[2];
        let (nx1, nuclear1) = svt_raw(&v1, 1.0 / rho)?;
        let nx2 = if theta > 0.0 {
            soft_threshold_raw(&v2, theta / rho)
        } else {
            v2.clone()
        };
        let (nx3, c) = project_halfspace_raw(&v3, &a_bar, a_bar_norm2, 1.0);
        x1 = nx1;
        x2 = nx2;
        x3 = nx3;
        // −ρ(x1 − v1) ∈ ∂‖x1‖_* and −ρ(x3 − v3) = −ρcĀ.
        g1 = (&v1 - &x1) * rho;
        mu = rho * c;

        let z_old = std::mem::replace(&mut z, (&x1 + &u[0] + &x2 + &u[1] + &x3 + &u[2]) / 3.0);
        let mut du2 = 0.0;
        let mut r2 = 0.0;
        for (ui, xi) in u.iter_mut().zip([&x1, &x2, &x3]) {
            let d = xi - &z;
            r2 += d.norm_squared();
            du2 += d.norm_squared();
            *ui += d;
        }
        let dz = (&z - &z_old).norm();
        let merit = rho * (3.0 * dz * dz + du2);
        let z_norm = z.norm().max(f64::MIN_POSITIVE);
        let u_norm = (u[0].norm_squared() + u[1].norm_squared() + u[2].norm_squared()).sqrt();
        primal_res = r2.sqrt() / (3f64.sqrt() * z_norm);
        dual_res = 3f64.sqrt() * dz / u_norm.max(f64::MIN_POSITIVE);

        gap = duality_gap(&a_bar, theta, &x1, nuclear1, &g1, mu, spectral_a_bar);

        observer(&IterationView {
            iteration: k,
            primal_residual: primal_res,
            dual_residual: dual_res,
            gap,
            merit,
            scale,
            theta,
            a_bar: &a_bar,
            x_halfspace: &x3,
            g_nuclear: &g1,
            mu,
        });

        if primal_res <= config.tol_primal && dual_res <= config.tol_dual && gap <= config.tol_gap {
            converged = true;
            break;
        }
    }

    // Report the copy whose structure is exact: sparsity from the ℓ1 copy,
    // low rank from the nuclear copy when there is no ℓ1 term.
    let candidate = if theta > 0.0 { &x2 } else { &x1 };
    let mut pick = candidate.clone();
    let mut level = pick.dot(&a_bar);
    if !(level > 0.0) {
        pick = x3.clone();
        level = pick.dot(&a_bar);
    }
    if !(level > 0.0) {
        return Err(LarosError::NotConverged {
            round: 0,
            iterations,
            gap,
        });
    }
    // <A, X> = 1 in the units of A.
    let x = DenseMatrix::from_nalgebra(pick / (level * scale))?;
    let objective = theta_norm(&x, theta)?;

    let (y, zmat) = decomposition_from(&a_bar, &g1, mu, scale, theta).unwrap_or_else(|| {
        (
            DenseMatrix::wrap(a_bar.clone() * scale),
            DenseMatrix::zeros(m, n),
        )
    });
    let dual_norm = decomposition_value(&y, &zmat, theta);
    let lower = 1.0 / dual_norm;
    let dual_gap = ((objective - lower) / objective).max(0.0);

    let x_unit = x.scale(1.0 / objective);
    let alpha = crate::matrix::norm(&x_unit, NormKind::Nuclear);
    let beta = crate::matrix::norm(&x_unit, NormKind::L1);

    let structure = extract_rank_one(&x, config.support_tol)?;
    let uniqueness = uniqueness_diagnostics(&y, &zmat)?;

    Ok(LarosSolution {
        sigma: structure.sigma,
        u: structure.u,
        v: structure.v,
        support_rows: structure.support_rows,
        support_cols: structure.support_cols,
        rank_one: structure.rank_one,
        sigma_ratio: structure.sigma_ratio,
        non_unique: !uniqueness.certified_unique,
        uniqueness,
        objective,
        dual_norm,
        dual_gap,
        primal_residual: primal_res,
        dual_residual: dual_res,
        iterations,
        converged,
        state: SplittingState {
            theta,
            converged,
            iterations,
            y,
            z: zmat,
            alpha,
            beta,
        },
        x,
    })
}

/// Relative gap between the θ-norm of the nuclear copy rescaled onto the
/// constraint boundary and the reciprocal of the decomposition value, both
/// in the normalized units `Ā = A / ‖A‖_F`.
fn duality_gap(
    a_bar: &DMatrix<f64>,
    theta: f64,
    x1: &DMatrix<f64>,
    nuclear1: f64,
    g1: &DMatrix<f64>,
    mu: f64,
    spectral_a_bar: f64,
) -> f64 {
    let level = x1.dot(a_bar);
    if !(level > 0.0) {
        return f64::INFINITY;
    }
    let upper = (nuclear1 + theta * l1_raw(x1)) / level;
    let dual_value = if theta == 0.0 {
        spectral_a_bar
    } else {
        if !(mu > 0.0) {
            return f64::INFINITY;
        }
        // ‖g1‖ is 1 whenever x1 ≠ 0, which `level > 0` guarantees.
        let y_norm = 1.0 / mu;
        let z_inf = linf_raw(&(a_bar - g1 / mu));
        y_norm.max(z_inf / theta)
    };
    ((upper - 1.0 / dual_value) / upper).max(0.0)
}

fn decomposition_value(y: &DenseMatrix, z: &DenseMatrix, theta: f64) -> f64 {
    let y_norm = crate::matrix::norm(y, NormKind::Spectral);
    if theta == 0.0 {
        y_norm
    } else {
        y_norm.max(crate::matrix::norm(z, NormKind::Linf) / theta)
    }
}

fn uniqueness_diagnostics(y: &DenseMatrix, z: &DenseMatrix) -> Result<UniquenessDiagnostics> {
    let sv = crate::matrix::singular_values(y);
    let s1 = sv.first().copied().unwrap_or(0.0);
    let s2 = sv.get(1).copied().unwrap_or(0.0);
    let y_relative_gap = if s1 > 0.0 { (s1 - s2) / s1 } else { 0.0 };
    let z_inf = crate::matrix::norm(z, NormKind::Linf);
    let z_argmax_multiplicity = if z_inf > 0.0 {
        z.as_slice()
            .iter()
            .filter(|v| v.abs() >= z_inf * (1.0 - 1e-6))
            .count()
    } else {
        z.rows() * z.cols()
    };
    Ok(UniquenessDiagnostics {
        y_relative_gap,
        z_argmax_multiplicity,
        certified_unique: y_relative_gap > 1e-6 || z_argmax_multiplicity == 1,
    })
}

/// `‖A‖_θ*`, computed as the reciprocal optimal value of the relaxation.
pub fn dual_theta_norm(a: &DenseMatrix, theta: f64) -> Result<f64> {
    if a.is_zero() {
        return Err(LarosError::InvalidInput("dual norm of the zero matrix".into()));
    }
    let sol = solve(a, &SolverConfig::new(theta))?;
    if !sol.converged {
        return Err(LarosError::NotConverged {
            round: 0,
            iterations: sol.iterations,
            gap: sol.dual_gap,
        });
    }
    Ok(sol.dual_norm)
}

/// Leading singular triple and row/column support of `x`.
pub fn extract_rank_one(x: &DenseMatrix, support_tol: f64) -> Result<RankOneStructure> {
    let (m, n) = x.shape();
    if x.is_zero() {
        return Ok(RankOneStructure {
            sigma: 0.0,
            u: vec![0.0; m],
            v: vec![0.0; n],
            support_rows: vec![],
            support_cols: vec![],
            sigma_ratio: 0.0,
            rank_one: false,
        });
    }
    let f = svd(x)?;
    let cutoff = support_tol * crate::matrix::norm(x, NormKind::Linf);
    let support_rows = (0..m)
        .filter(|&i| (0..n).any(|j| x.get(i, j).abs() > cutoff))
        .collect();
    let support_cols = (0..n)
        .filter(|&j| (0..m).any(|i| x.get(i, j).abs() > cutoff))
        .collect();
    let sigma_ratio = f.sigma(1) / f.sigma(0);
    Ok(RankOneStructure {
        sigma: f.sigma(0),
        u: f.left_vector(0),
        v: f.right_vector(0),
        support_rows,
        support_cols,
        sigma_ratio,
        rank_one: sigma_ratio <= 1e-6,
    })
}

/// Residuals of the optimality system for `x` (unit-ball scaling) and `cert`.
pub fn check_optimality(
    a: &DenseMatrix,
    theta: f64,
    x: &DenseMatrix,
    cert: &DualCertificate,
) -> OptimalityReport {
    let y_norm = crate::matrix::norm(&cert.y, NormKind::Spectral);
    let z_inf = crate::matrix::norm(&cert.z, NormKind::Linf);
    let x_nuc = crate::matrix::norm(x, NormKind::Nuclear);
    let x_l1 = crate::matrix::norm(x, NormKind::L1);
    let balance = if theta > 0.0 {
        (y_norm - z_inf / theta).abs()
    } else {
        0.0
    };
    let sum = &cert.y + &cert.z;
    let mut decomposition = (&sum - a).frobenius_norm() / a.frobenius_norm().max(f64::MIN_POSITIVE);
    if theta == 0.0 {
        decomposition += z_inf;
    }
    OptimalityReport {
        balance,
        spectral_alignment: (x.inner(&cert.y) - x_nuc * y_norm).abs(),
        linf_alignment: (x.inner(&cert.z) - x_l1 * z_inf).abs(),
        weights: (cert.alpha + theta * cert.beta - 1.0).abs(),
        normalization: (x_nuc + theta * x_l1 - 1.0).abs(),
        alpha_consistency: (cert.alpha - x_nuc).abs(),
        beta_consistency: (cert.beta - x_l1).abs(),
        decomposition,
    }
}

/// Builds the certificate from the multipliers of a converged solve.
pub fn recover_dual(a: &DenseMatrix, theta: f64, state: &SplittingState) -> Result<DualCertificate> {
    if !state.converged {
        return Err(LarosError::CertificateUnavailable(format!(
            "solver stopped after {} iterations without converging",
            state.iterations
        )));
    }
    if state.y.shape() != a.shape() {
        return Err(LarosError::DimensionMismatch {
            expected: format!("{:?}", a.shape()),
            found: format!("{:?}", state.y.shape()),
        });
    }
    if theta != state.theta {
        return Err(LarosError::Precondition(format!(
            "state was produced for theta {} but {} was requested",
            state.theta, theta
        )));
    }
    let dual_norm = decomposition_value(&state.y, &state.z, theta);
    Ok(DualCertificate {
        y: state.y.clone(),
        z: state.z.clone(),
        alpha: state.alpha,
        beta: state.beta,
        dual_norm,
        lambda_star: 1.0 / dual_norm,
    })
}
