//! Closed-form thresholds and structural checks for the relaxation: the
//! rank-one threshold `θ_A`, the block-sparsity threshold `θ_B`, row
//! domination, the per-row optimality ratios of rank-one solutions, the
//! subgaussian spectral tail bound, the parameter window of the planted model
//! and the blockwise dual certificate for planted instances.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{LarosError, Result};
use crate::generators::PlantedModel;
use crate::matrix::{norm, singular_values, DenseMatrix, NormKind};
use crate::solver::LarosSolution;

/// Row and column index sets `I`, `J` (0-based, sorted, distinct, nonempty).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BlockSelector {
    rows: Vec<usize>,
    cols: Vec<usize>,
}

impl BlockSelector {
    pub fn new(mut rows: Vec<usize>, mut cols: Vec<usize>) -> Result<Self> {
        for (name, set) in [("rows", &mut rows), ("cols", &mut cols)] {
            if set.is_empty() {
                return Err(LarosError::InvalidInput(format!("block {name} must be nonempty")));
            }
            set.sort_unstable();
            if set.windows(2).any(|w| w[0] == w[1]) {
                return Err(LarosError::InvalidInput(format!("block {name} contain duplicates")));
            }
        }
        Ok(BlockSelector { rows, cols })
    }

    /// `{0..M} × {0..N}`. Both sizes must be positive.
    pub fn leading(block_rows: usize, block_cols: usize) -> Self {
        assert!(block_rows > 0 && block_cols > 0, "empty leading block");
        BlockSelector {
            rows: (0..block_rows).collect(),
            cols: (0..block_cols).collect(),
        }
    }

    /// A single entry.
    pub fn singleton(i: usize, j: usize) -> Self {
        BlockSelector {
            rows: vec![i],
            cols: vec![j],
        }
    }

    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    pub fn cols(&self) -> &[usize] {
        &self.cols
    }

    /// `(M, N)`.
    pub fn size(&self) -> (usize, usize) {
        (self.rows.len(), self.cols.len())
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.rows.binary_search(&i).is_ok() && self.cols.binary_search(&j).is_ok()
    }

    pub fn check_bounds(&self, m: usize, n: usize) -> Result<()> {
        let last_row = *self.rows.last().expect("nonempty");
        let last_col = *self.cols.last().expect("nonempty");
        if last_row >= m || last_col >= n {
            return Err(LarosError::InvalidInput(format!(
                "block index ({last_row}, {last_col}) out of range for a {m}x{n} matrix"
            )));
        }
        Ok(())
    }

    pub fn covers(&self, m: usize, n: usize) -> bool {
        self.rows.len() == m && self.cols.len() == n
    }
}

/// A threshold whose hypothesis may fail.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum Threshold {
    Value(f64),
    NotApplicable,
}

impl Threshold {
    pub fn value(self) -> Option<f64> {
        match self {
            Threshold::Value(v) => Some(v),
            Threshold::NotApplicable => None,
        }
    }
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Threshold::Value(v) => write!(f, "{v}"),
            Threshold::NotApplicable => f.write_str("not applicable"),
        }
    }
}

fn require_nonnegative(a: &DenseMatrix) -> Result<()> {
    if !a.is_nonnegative() {
        return Err(LarosError::InvalidInput("matrix has negative entries".into()));
    }
    Ok(())
}

/// `(σ1 − σ2) / ((3σ1 − σ2) √(mn))`; below it the solution is unique and
/// rank one. Zero when `σ1 = σ2`.
pub fn theta_a(a: &DenseMatrix) -> Result<f64> {
    if a.is_zero() {
        return Err(LarosError::InvalidInput("theta_A of the zero matrix".into()));
    }
    let s = singular_values(a);
    let s1 = s[0];
    let s2 = s.get(1).copied().unwrap_or(0.0);
    let (m, n) = a.shape();
    Ok((s1 - s2) / (3.0 * s1 - s2) / ((m * n) as f64).sqrt())
}

/// Mean of `A` over the block and maximum outside it.
pub fn block_contrast(a: &DenseMatrix, block: &BlockSelector) -> Result<(f64, f64)> {
    let (m, n) = a.shape();
    block.check_bounds(m, n)?;
    if block.covers(m, n) {
        return Err(LarosError::InvalidInput("block covers the whole matrix".into()));
    }
    let (bm, bn) = block.size();
    let mut sum = 0.0;
    let mut outside = f64::NEG_INFINITY;
    for i in 0..m {
        for j in 0..n {
            if block.contains(i, j) {
                sum += a.get(i, j);
            } else {
                outside = outside.max(a.get(i, j));
            }
        }
    }
    Ok((sum / (bm * bn) as f64, outside))
}

/// Above this `θ` every solution vanishes outside the block, provided the
/// block mean `ā` exceeds the outside maximum `a_max`:
/// `θ_B = (ā√(MN) + a_max) / ((ā − a_max) √(MN))`.
pub fn theta_b(a: &DenseMatrix, block: &BlockSelector) -> Result<Threshold> {
    require_nonnegative(a)?;
    let (mean, outside) = block_contrast(a, block)?;
    if mean <= outside {
        return Ok(Threshold::NotApplicable);
    }
    let (bm, bn) = block.size();
    let r = ((bm * bn) as f64).sqrt();
    Ok(Threshold::Value((mean * r + outside) / ((mean - outside) * r)))
}

/// Row `j` of every nonnegative rank-one solution is zero once `θ` exceeds
/// `1/(α − 1)`, where `α = min_k a_ik / max_k a_jk`. Rows are 0-based.
pub fn row_zero_threshold(a: &DenseMatrix, i: usize, j: usize) -> Result<Threshold> {
    require_nonnegative(a)?;
    let m = a.rows();
    if i >= m || j >= m {
        return Err(LarosError::InvalidInput(format!("row index out of range for {m} rows")));
    }
    if i == j {
        return Err(LarosError::InvalidInput("rows must differ".into()));
    }
    let lo = a.row(i).into_iter().fold(f64::INFINITY, f64::min);
    let hi = a.row(j).into_iter().fold(0.0, f64::max);
    if hi == 0.0 {
        return Ok(Threshold::Value(0.0));
    }
    let alpha = lo / hi;
    if alpha <= 1.0 {
        return Ok(Threshold::NotApplicable);
    }
    Ok(Threshold::Value(1.0 / (alpha - 1.0)))
}

/// Column version of [`row_zero_threshold`].
pub fn col_zero_threshold(a: &DenseMatrix, i: usize, j: usize) -> Result<Threshold> {
    row_zero_threshold(&a.transpose(), i, j)
}

/// Per-row and per-column residuals of the local optimality ratios of a
/// nonnegative rank-one solution `σuvᵀ`.
///
/// In-support rows must satisfy `a_iᵀv = (θ‖v‖_1 + u_i)‖A‖_θ*` and zero rows
/// `a_jᵀv <= θ‖v‖_1 ‖A‖_θ*`; columns symmetrically.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RowRatioReport {
    /// `(row, |a_iᵀv/(θ‖v‖_1 + u_i) − ‖A‖_θ*|)` over the row support.
    pub support_rows: Vec<(usize, f64)>,
    /// `(row, max(0, a_jᵀv/(θ‖v‖_1) − ‖A‖_θ*))` over the other rows.
    pub zero_rows: Vec<(usize, f64)>,
    pub support_cols: Vec<(usize, f64)>,
    pub zero_cols: Vec<(usize, f64)>,
    pub dual_norm: f64,
    /// Copied from the solution; equalities may fail legitimately when set.
    pub non_unique: bool,
}

impl RowRatioReport {
    pub fn max_residual(&self) -> f64 {
        self.support_rows
            .iter()
            .chain(&self.zero_rows)
            .chain(&self.support_cols)
            .chain(&self.zero_cols)
            .map(|&(_, r)| r)
            .fold(0.0, f64::max)
    }

    /// Largest residual relative to `‖A‖_θ*`.
    pub fn max_relative_residual(&self) -> f64 {
        self.max_residual() / self.dual_norm
    }
}

/// Entrywise absolute value of `u` if it is nonnegative up to `tol·‖u‖_∞`.
fn nonnegative_part(u: &[f64], tol: f64) -> Option<Vec<f64>> {
    let top = u.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    if u.iter().any(|&x| x < -tol * top) {
        return None;
    }
    Some(u.iter().map(|x| x.abs()).collect())
}

fn ratio_residuals(
    a: &DenseMatrix,
    u: &[f64],
    v: &[f64],
    support: &[usize],
    theta: f64,
    dual: f64,
) -> (Vec<(usize, f64)>, Vec<(usize, f64)>) {
    let v_l1: f64 = v.iter().sum();
    let mut inside = Vec::new();
    let mut outside = Vec::new();
    for (i, &ui) in u.iter().enumerate() {
        let av: f64 = a.row(i).iter().zip(v).map(|(x, y)| x * y).sum();
        if support.contains(&i) {
            inside.push((i, (av / (theta * v_l1 + ui) - dual).abs()));
        } else {
            outside.push((i, (av / (theta * v_l1) - dual).max(0.0)));
        }
    }
    (inside, outside)
}

/// Checks the local row and column optimality ratios of a rank-one solution.
pub fn row_ratio_check(a: &DenseMatrix, sol: &LarosSolution, theta: f64) -> Result<RowRatioReport> {
    if !(theta > 0.0 && theta.is_finite()) {
        return Err(LarosError::Precondition(format!("theta must be positive, got {theta}")));
    }
    if sol.x.shape() != a.shape() {
        return Err(LarosError::DimensionMismatch {
            expected: format!("{:?}", a.shape()),
            found: format!("{:?}", sol.x.shape()),
        });
    }
    if !sol.rank_one {
        return Err(LarosError::Precondition(format!(
            "solution is not rank one (sigma2/sigma1 = {:e})",
            sol.sigma_ratio
        )));
    }
    let signed = || LarosError::Precondition("solution factors are not nonnegative".into());
    let u = nonnegative_part(&sol.u, 1e-6).ok_or_else(signed)?;
    let v = nonnegative_part(&sol.v, 1e-6).ok_or_else(signed)?;
    let dual = sol.dual_norm;
    let (support_rows, zero_rows) = ratio_residuals(a, &u, &v, &sol.support_rows, theta, dual);
    let (support_cols, zero_cols) = ratio_residuals(&a.transpose(), &v, &u, &sol.support_cols, theta, dual);
    Ok(RowRatioReport {
        support_rows,
        zero_rows,
        support_cols,
        zero_cols,
        dual_norm: dual,
        non_unique: sol.non_unique,
    })
}

/// `σ|u||v|ᵀ`.
pub fn nonnegative_flip(sigma: f64, u: &[f64], v: &[f64]) -> Result<DenseMatrix> {
    let au: Vec<f64> = u.iter().map(|x| sigma * x.abs()).collect();
    let av: Vec<f64> = v.iter().map(|x| x.abs()).collect();
    DenseMatrix::outer(&au, &av)
}

/// `P(‖B‖ >= u)` bound for an `m × n` matrix of independent `b`-subgaussian
/// entries: `exp(−(8u²/(81b²) − ln7·(m + n)))`, clamped to 1.
pub fn subgaussian_tail_bound(u: f64, b: f64, m: usize, n: usize) -> Result<f64> {
    if !(u > 0.0 && u.is_finite()) {
        return Err(LarosError::param("u", format!("must be positive, got {u}")));
    }
    if !(b > 0.0 && b.is_finite()) {
        return Err(LarosError::param("b", format!("must be positive, got {b}")));
    }
    let exponent = 8.0 * u * u / (81.0 * b * b) - 7f64.ln() * (m + n) as f64;
    Ok((-exponent).exp().min(1.0))
}

/// A named hypothesis of the planted-recovery guarantee.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegimeCondition {
    /// `c5 > c1 + c2 + c1c2`.
    C5DominatesPerturbation,
    /// `c5 <= 1/3`.
    C5AtMostOneThird,
    /// `c3 + c5 < 1`.
    NoiseBudget,
    /// `θ <= min(1/(c3 + c5), (1 + c3 − 3c5)/(2c5)) / √(MN)`.
    ThetaUpper,
    /// `θ >= 2c3 / ((1 − c3 − c5)√(MN))`.
    ThetaLower,
    /// `MN >= k1 (M + N)^{4/3}` with `k1 > (81 b² ln7)^{4/3}`.
    SizeK1,
    /// `MN >= k2 (m + n)` with `k2 > 36·81 b² ln7 / (8c5²)`.
    SizeK2,
}

impl RegimeCondition {
    pub fn is_size_condition(self) -> bool {
        matches!(self, RegimeCondition::SizeK1 | RegimeCondition::SizeK2)
    }
}

impl fmt::Display for RegimeCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RegimeCondition::C5DominatesPerturbation => "c5 > c1 + c2 + c1*c2",
            RegimeCondition::C5AtMostOneThird => "c5 <= 1/3",
            RegimeCondition::NoiseBudget => "c3 + c5 < 1",
            RegimeCondition::ThetaUpper => "theta <= theta_hi",
            RegimeCondition::ThetaLower => "theta >= theta_lo",
            RegimeCondition::SizeK1 => "MN >= k1 (M+N)^(4/3)",
            RegimeCondition::SizeK2 => "MN >= k2 (m+n)",
        })
    }
}

/// Outcome of [`validate_planted_regime`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegimeReport {
    pub valid: bool,
    pub violated: Vec<RegimeCondition>,
    pub theta_lo: f64,
    pub theta_hi: f64,
    /// Infimum admissible for `k1`.
    pub k1_bound: f64,
    /// Infimum admissible for `k2`.
    pub k2_bound: f64,
    /// The constant and `θ` conditions hold and the window is nonempty.
    pub theta_window_ok: bool,
    /// Both size conditions hold.
    pub size_ok: bool,
}

/// Checks the constants, `θ` window and size conditions of the planted model.
pub fn validate_planted_regime(model: &PlantedModel, c5: f64, theta: f64) -> RegimeReport {
    let (c1, c2, c3, b) = (model.c1, model.c2, model.c3, model.b);
    let mn = (model.block_rows * model.block_cols) as f64;
    let root = mn.sqrt();
    let theta_hi = (1.0 / (c3 + c5)).min((1.0 + c3 - 3.0 * c5) / (2.0 * c5)) / root;
    let theta_lo = 2.0 * c3 / ((1.0 - c3 - c5) * root);
    let ln7 = 7f64.ln();
    let k1_bound = (ln7 * 81.0 * b * b).powf(4.0 / 3.0);
    let k2_bound = ln7 * 36.0 * 81.0 * b * b / (8.0 * c5 * c5);
    let big = (model.block_rows + model.block_cols) as f64;
    let small = (model.m + model.n) as f64;

    let checks = [
        (RegimeCondition::C5DominatesPerturbation, c5 > c1 + c2 + c1 * c2),
        (RegimeCondition::C5AtMostOneThird, c5 <= 1.0 / 3.0),
        (RegimeCondition::NoiseBudget, c3 + c5 < 1.0),
        (RegimeCondition::ThetaUpper, theta <= theta_hi),
        (RegimeCondition::ThetaLower, theta >= theta_lo),
        // k1, k2 only need to exceed their bounds, so the size tests are strict
        (RegimeCondition::SizeK1, mn > k1_bound * big.powf(4.0 / 3.0)),
        (RegimeCondition::SizeK2, mn > k2_bound * small),
    ];
    let violated: Vec<RegimeCondition> = checks.iter().filter(|(_, ok)| !ok).map(|&(c, _)| c).collect();
    let window_nonempty = theta_lo <= theta_hi;
    let theta_window_ok = window_nonempty && violated.iter().all(|c| c.is_size_condition());
    let size_ok = !violated.iter().any(|c| c.is_size_condition());
    RegimeReport {
        valid: violated.is_empty() && window_nonempty,
        violated,
        theta_lo,
        theta_hi,
        k1_bound,
        k2_bound,
        theta_window_ok,
        size_ok,
    }
}

/// Blockwise dual certificate for a planted instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlantedCertificateReport {
    pub lambda_star: f64,
    pub v: DenseMatrix,
    pub w: DenseMatrix,
    pub v_linf: f64,
    /// `[‖W11‖, ‖W12‖, ‖W21‖, ‖W22‖]`.
    pub w_block_norms: [f64; 4],
    pub w_norm: f64,
    /// `‖Wᵀu‖_2`.
    pub wt_u: f64,
    /// `‖Wv‖_2`.
    pub w_v: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Absolute tolerance on the orthogonality and bound checks of the planted
/// certificate.
pub const PLANTED_CERTIFICATE_TOL: f64 = 1e-6;

/// Builds `V` and `W` with `λ*A = λ*(uvᵀ + W) + θV` block by block, taking
/// `λ* = 1/‖A‖_θ*` from the solution.
///
/// `V11 = e eᵀ`, `V22 = (λ*σ0c3/θ) e eᵀ`, each column of `V12` is the constant
/// making the matching column of `W12` orthogonal to `u1`, each row of `V21`
/// the constant making the row of `W21` orthogonal to `v1`, and `W` takes the
/// remainder.
pub fn build_planted_certificate(
    a: &DenseMatrix,
    model: &PlantedModel,
    sol: &LarosSolution,
    theta: f64,
) -> Result<PlantedCertificateReport> {
    model.validate()?;
    let (m, n) = (model.m, model.n);
    if a.shape() != (m, n) || sol.x.shape() != (m, n) {
        return Err(LarosError::DimensionMismatch {
            expected: format!("({m}, {n})"),
            found: format!("{:?} and {:?}", a.shape(), sol.x.shape()),
        });
    }
    if !(theta > 0.0 && theta.is_finite()) {
        return Err(LarosError::Precondition(format!("theta must be positive, got {theta}")));
    }
    let (bm, bn) = (model.block_rows, model.block_cols);
    let truth_rows: Vec<usize> = (0..bm).collect();
    let truth_cols: Vec<usize> = (0..bn).collect();
    if sol.support_rows != truth_rows || sol.support_cols != truth_cols {
        return Err(LarosError::Precondition(format!(
            "solution support {:?} x {:?} differs from the planted block",
            sol.support_rows, sol.support_cols
        )));
    }
    let signed = || LarosError::Precondition("solution factors are not nonnegative".into());
    let u = nonnegative_part(&sol.u, 1e-6).ok_or_else(signed)?;
    let v = nonnegative_part(&sol.v, 1e-6).ok_or_else(signed)?;
    let u1 = &u[..bm];
    let v1 = &v[..bn];
    let u1_l1: f64 = u1.iter().sum();
    let v1_l1: f64 = v1.iter().sum();
    let lambda = 1.0 / sol.dual_norm;
    let v22 = lambda * model.sigma0 * model.c3 / theta;

    let col_coef: Vec<f64> = (bn..n)
        .map(|j| lambda * (0..bm).map(|i| a.get(i, j) * u1[i]).sum::<f64>() / (theta * u1_l1))
        .collect();
    let row_coef: Vec<f64> = (bm..m)
        .map(|i| lambda * (0..bn).map(|j| a.get(i, j) * v1[j]).sum::<f64>() / (theta * v1_l1))
        .collect();
    let vm = DenseMatrix::from_fn(m, n, |i, j| match (i < bm, j < bn) {
        (true, true) => 1.0,
        (true, false) => col_coef[j - bn],
        (false, true) => row_coef[i - bm],
        (false, false) => v22,
    })?;
    let wm = DenseMatrix::from_fn(m, n, |i, j| {
        let rank_one = if i < bm && j < bn { u1[i] * v1[j] } else { 0.0 };
        lambda * a.get(i, j) - theta * vm.get(i, j) - rank_one
    })?;

    let rows_top: Vec<usize> = (0..bm).collect();
    let rows_bot: Vec<usize> = (bm..m).collect();
    let cols_left: Vec<usize> = (0..bn).collect();
    let cols_right: Vec<usize> = (bn..n).collect();
    let block_norm = |r: &[usize], c: &[usize]| -> Result<f64> { Ok(norm(&wm.select(r, c)?, NormKind::Spectral)) };
    let w_block_norms = [
        block_norm(&rows_top, &cols_left)?,
        block_norm(&rows_top, &cols_right)?,
        block_norm(&rows_bot, &cols_left)?,
        block_norm(&rows_bot, &cols_right)?,
    ];
    let wn = wm.as_nalgebra();
    let uu = nalgebra::DVector::from_column_slice(&u.iter().enumerate().map(|(i, &x)| if i < bm { x } else { 0.0 }).collect::<Vec<_>>());
    let vv = nalgebra::DVector::from_column_slice(&v.iter().enumerate().map(|(j, &x)| if j < bn { x } else { 0.0 }).collect::<Vec<_>>());
    let wt_u = (wn.transpose() * uu).norm();
    let w_v = (wn * vv).norm();
    let v_linf = norm(&vm, NormKind::Linf);
    let tol = PLANTED_CERTIFICATE_TOL;
    let pass = v_linf <= 1.0 + tol && w_block_norms.iter().all(|&x| x <= 0.5 + tol) && wt_u <= tol && w_v <= tol;
    Ok(PlantedCertificateReport {
        lambda_star: lambda,
        w_norm: norm(&wm, NormKind::Spectral),
        v: vm,
        w: wm,
        v_linf,
        w_block_norms,
        wt_u,
        w_v,
        tolerance: tol,
        pass,
    })
}
