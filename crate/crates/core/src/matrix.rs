//! Dense real matrices and the kernels the relaxation is built from: the
//! SVD with a fixed sign convention, the four entrywise/spectral norms, the
//! θ-norm, the proximal maps of the nuclear and ℓ1 norms, the half-space
//! projection for the constraint `<A, X> >= level`, and deterministic
//! elements of the spectral and ℓ∞ subdifferentials.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use nalgebra::DMatrix;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{LarosError, Result};

/// Real `rows × cols` matrix with finite entries.
#[derive(Clone, PartialEq)]
pub struct DenseMatrix {
    inner: DMatrix<f64>,
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DenseMatrix {}x{} [", self.rows(), self.cols())?;
        for i in 0..self.rows() {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cols() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.inner[(i, j)])?;
            }
        }
        write!(f, "]")
    }
}

impl DenseMatrix {
    /// Builds a matrix from entries listed row by row.
    pub fn from_row_major(rows: usize, cols: usize, entries: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(LarosError::InvalidInput(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if entries.len() != rows * cols {
            return Err(LarosError::DimensionMismatch {
                expected: format!("{} entries", rows * cols),
                found: format!("{} entries", entries.len()),
            });
        }
        Self::from_nalgebra(DMatrix::from_row_slice(rows, cols, &entries))
    }

    /// Builds a matrix from a slice of equally long rows.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        let mut entries = Vec::with_capacity(m * n);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != n {
                return Err(LarosError::DimensionMismatch {
                    expected: format!("{n} columns"),
                    found: format!("{} columns in row {i}", r.len()),
                });
            }
            entries.extend_from_slice(r);
        }
        Self::from_row_major(m, n, entries)
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(LarosError::InvalidInput(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        Self::from_nalgebra(DMatrix::from_fn(rows, cols, |i, j| f(i, j)))
    }

    /// Wraps an `nalgebra` matrix, rejecting empty shapes and non-finite entries.
    pub fn from_nalgebra(inner: DMatrix<f64>) -> Result<Self> {
        if inner.nrows() == 0 || inner.ncols() == 0 {
            return Err(LarosError::InvalidInput("matrix dimensions must be positive".into()));
        }
        if let Some((k, v)) = inner.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            let (j, i) = (k / inner.nrows(), k % inner.nrows());
            return Err(LarosError::InvalidInput(format!(
                "non-finite entry {v} at ({i}, {j})"
            )));
        }
        Ok(DenseMatrix { inner })
    }

    /// Wraps without validation; callers guarantee finiteness.
    pub(crate) fn wrap(inner: DMatrix<f64>) -> Self {
        debug_assert!(inner.iter().all(|v| v.is_finite()));
        DenseMatrix { inner }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        DenseMatrix::wrap(DMatrix::zeros(rows, cols))
    }

    /// Square diagonal matrix.
    pub fn diag(values: &[f64]) -> Result<Self> {
        let n = values.len();
        Self::from_fn(n, n, |i, j| if i == j { values[i] } else { 0.0 })
    }

    /// The unit matrix `E_ij` (0-based position).
    pub fn unit(rows: usize, cols: usize, i: usize, j: usize) -> Self {
        let mut m = DMatrix::zeros(rows, cols);
        m[(i, j)] = 1.0;
        DenseMatrix::wrap(m)
    }

    /// `u v^T`.
    pub fn outer(u: &[f64], v: &[f64]) -> Result<Self> {
        Self::from_fn(u.len(), v.len(), |i, j| u[i] * v[j])
    }

    pub fn rows(&self) -> usize {
        self.inner.nrows()
    }

    pub fn cols(&self) -> usize {
        self.inner.ncols()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.inner.shape()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.inner[(i, j)]
    }

    pub fn as_nalgebra(&self) -> &DMatrix<f64> {
        &self.inner
    }

    pub fn into_nalgebra(self) -> DMatrix<f64> {
        self.inner
    }

    pub fn to_row_major(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for i in 0..self.rows() {
            out.extend(self.inner.row(i).iter().copied());
        }
        out
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        self.inner.row(i).iter().copied().collect()
    }

    pub fn col(&self, j: usize) -> Vec<f64> {
        self.inner.column(j).iter().copied().collect()
    }

    /// Frobenius inner product `<self, other>`.
    pub fn inner(&self, other: &DenseMatrix) -> f64 {
        assert_eq!(self.shape(), other.shape(), "inner product shape mismatch");
        self.inner.dot(&other.inner)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.inner.norm()
    }

    pub fn transpose(&self) -> DenseMatrix {
        DenseMatrix::wrap(self.inner.transpose())
    }

    pub fn scale(&self, c: f64) -> DenseMatrix {
        DenseMatrix::wrap(&self.inner * c)
    }

    pub fn map(&self, f: impl FnMut(f64) -> f64) -> Result<DenseMatrix> {
        DenseMatrix::from_nalgebra(self.inner.map(f))
    }

    pub fn is_zero(&self) -> bool {
        self.inner.iter().all(|&v| v == 0.0)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.inner.iter().all(|&v| v >= 0.0)
    }

    pub fn min_entry(&self) -> f64 {
        self.inner.min()
    }

    pub fn max_entry(&self) -> f64 {
        self.inner.max()
    }

    /// Submatrix on the given (0-based) row and column index lists.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Result<DenseMatrix> {
        DenseMatrix::from_fn(rows.len(), cols.len(), |a, b| self.inner[(rows[a], cols[b])])
    }

    /// Column-major view of the entries, as stored.
    pub fn as_slice(&self) -> &[f64] {
        self.inner.as_slice()
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixRecord {
    rows: usize,
    cols: usize,
    /// Row-major entries.
    data: Vec<f64>,
}

impl Serialize for DenseMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixRecord {
            rows: self.rows(),
            cols: self.cols(),
            data: self.to_row_major(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DenseMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let r = MatrixRecord::deserialize(deserializer)?;
        DenseMatrix::from_row_major(r.rows, r.cols, r.data).map_err(serde::de::Error::custom)
    }
}

impl Add for &DenseMatrix {
    type Output = DenseMatrix;
    fn add(self, rhs: &DenseMatrix) -> DenseMatrix {
        DenseMatrix::wrap(&self.inner + &rhs.inner)
    }
}

impl Sub for &DenseMatrix {
    type Output = DenseMatrix;
    fn sub(self, rhs: &DenseMatrix) -> DenseMatrix {
        DenseMatrix::wrap(&self.inner - &rhs.inner)
    }
}

impl Neg for &DenseMatrix {
    type Output = DenseMatrix;
    fn neg(self) -> DenseMatrix {
        DenseMatrix::wrap(-&self.inner)
    }
}

/// Singular triples in nonincreasing order of singular value.
///
/// Each left singular vector has its first largest-magnitude component
/// nonnegative; the matching right vector is flipped with it.
#[derive(Clone, Debug)]
pub struct SvdFactors {
    pub singular_values: Vec<f64>,
    /// `m × k` with orthonormal columns, `k = min(m, n)`.
    pub left: DMatrix<f64>,
    /// `n × k` with orthonormal columns.
    pub right: DMatrix<f64>,
}

impl SvdFactors {
    pub fn rank_bound(&self) -> usize {
        self.singular_values.len()
    }

    pub fn sigma(&self, k: usize) -> f64 {
        self.singular_values.get(k).copied().unwrap_or(0.0)
    }

    pub fn left_vector(&self, k: usize) -> Vec<f64> {
        self.left.column(k).iter().copied().collect()
    }

    pub fn right_vector(&self, k: usize) -> Vec<f64> {
        self.right.column(k).iter().copied().collect()
    }

    /// `U Σ V^T`.
    pub fn reconstruct(&self) -> DenseMatrix {
        let mut scaled = self.left.clone();
        for (k, s) in self.singular_values.iter().enumerate() {
            scaled.column_mut(k).scale_mut(*s);
        }
        DenseMatrix::wrap(scaled * self.right.transpose())
    }
}

fn to_faer(a: &DMatrix<f64>) -> faer::Mat<f64> {
    faer::Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)])
}

/// Full (thin) singular value decomposition with `min(m, n)` triples.
pub fn svd(a: &DenseMatrix) -> Result<SvdFactors> {
    if a.inner.iter().any(|v| !v.is_finite()) {
        return Err(LarosError::InvalidInput("SVD of a non-finite matrix".into()));
    }
    svd_raw(&a.inner)
}

pub(crate) fn svd_raw(a: &DMatrix<f64>) -> Result<SvdFactors> {
    let (m, n) = a.shape();
    let dec = to_faer(a)
        .thin_svd()
        .map_err(|e| LarosError::InvalidInput(format!("SVD failed: {e:?}")))?;
    let k = m.min(n);
    let mut left = DMatrix::from_fn(m, k, |i, c| dec.U()[(i, c)]);
    let mut right = DMatrix::from_fn(n, k, |j, c| dec.V()[(j, c)]);
    let mut sv: Vec<f64> = (0..k).map(|c| dec.S()[c]).collect();

    let mut order: Vec<usize> = (0..sv.len()).collect();
    order.sort_by(|&i, &j| sv[j].total_cmp(&sv[i]));
    if order.iter().enumerate().any(|(k, &o)| k != o) {
        left = left.select_columns(order.iter());
        right = right.select_columns(order.iter());
        sv = order.iter().map(|&o| sv[o]).collect();
    }

    for k in 0..sv.len() {
        let col = left.column(k);
        let mut best = 0;
        for i in 1..col.len() {
            if col[i].abs() > col[best].abs() {
                best = i;
            }
        }
        if col[best] < 0.0 {
            left.column_mut(k).neg_mut();
            right.column_mut(k).neg_mut();
        }
    }
    Ok(SvdFactors {
        singular_values: sv,
        left,
        right,
    })
}

/// Singular values only, nonincreasing.
pub fn singular_values(a: &DenseMatrix) -> Vec<f64> {
    singular_values_raw(&a.inner)
}

pub(crate) fn singular_values_raw(a: &DMatrix<f64>) -> Vec<f64> {
    let mut sv = to_faer(a)
        .singular_values()
        .unwrap_or_else(|_| vec![f64::NAN; a.nrows().min(a.ncols())]);
    sv.sort_by(|x, y| y.total_cmp(x));
    sv
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormKind {
    /// Sum of singular values.
    Nuclear,
    /// Largest singular value.
    Spectral,
    /// Sum of absolute entries.
    L1,
    /// Largest absolute entry.
    Linf,
}

pub fn norm(a: &DenseMatrix, kind: NormKind) -> f64 {
    match kind {
        NormKind::Nuclear => singular_values(a).iter().sum(),
        NormKind::Spectral => singular_values(a).first().copied().unwrap_or(0.0),
        NormKind::L1 => l1_raw(&a.inner),
        NormKind::Linf => linf_raw(&a.inner),
    }
}

pub(crate) fn l1_raw(a: &DMatrix<f64>) -> f64 {
    a.iter().map(|v| v.abs()).sum()
}

pub(crate) fn linf_raw(a: &DMatrix<f64>) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

fn check_nonneg(name: &'static str, value: f64) -> Result<()> {
    if value.is_nan() || value < 0.0 {
        return Err(LarosError::param(name, format!("must be nonnegative, got {value}")));
    }
    Ok(())
}

/// `‖A‖_* + θ‖A‖_1`.
pub fn theta_norm(a: &DenseMatrix, theta: f64) -> Result<f64> {
    check_nonneg("theta", theta)?;
    Ok(norm(a, NormKind::Nuclear) + theta * norm(a, NormKind::L1))
}

/// Singular value thresholding `U max(Σ − τ, 0) V^T`, the proximal map of
/// `τ‖·‖_*`.
pub fn svt(a: &DenseMatrix, tau: f64) -> Result<DenseMatrix> {
    check_nonneg("tau", tau)?;
    Ok(DenseMatrix::wrap(svt_raw(&a.inner, tau)?.0))
}

/// Returns the thresholded matrix and its nuclear norm.
pub(crate) fn svt_raw(a: &DMatrix<f64>, tau: f64) -> Result<(DMatrix<f64>, f64)> {
    let f = svd_raw(a)?;
    let keep = f.singular_values.iter().take_while(|&&s| s > tau).count();
    let (m, n) = a.shape();
    if keep == 0 {
        return Ok((DMatrix::zeros(m, n), 0.0));
    }
    let mut lu = f.left.columns(0, keep).into_owned();
    let mut nuclear = 0.0;
    for k in 0..keep {
        let s = f.singular_values[k] - tau;
        nuclear += s;
        lu.column_mut(k).scale_mut(s);
    }
    Ok((lu * f.right.columns(0, keep).transpose(), nuclear))
}

/// Entrywise shrinkage `sgn(a) max(|a| − τ, 0)`, the proximal map of `τ‖·‖_1`.
pub fn soft_threshold(a: &DenseMatrix, tau: f64) -> Result<DenseMatrix> {
    check_nonneg("tau", tau)?;
    Ok(DenseMatrix::wrap(soft_threshold_raw(&a.inner, tau)))
}

pub(crate) fn shrink(x: f64, tau: f64) -> f64 {
    if x > tau {
        x - tau
    } else if x < -tau {
        x + tau
    } else {
        0.0
    }
}

pub(crate) fn soft_threshold_raw(a: &DMatrix<f64>, tau: f64) -> DMatrix<f64> {
    a.map(|x| shrink(x, tau))
}

/// Euclidean projection of `x` onto `{Y : <a, Y> >= level}`.
pub fn project_halfspace(x: &DenseMatrix, a: &DenseMatrix, level: f64) -> Result<DenseMatrix> {
    if x.shape() != a.shape() {
        return Err(LarosError::DimensionMismatch {
            expected: format!("{:?}", a.shape()),
            found: format!("{:?}", x.shape()),
        });
    }
    let a2 = a.inner.norm_squared();
    if a2 == 0.0 {
        return Err(LarosError::Degenerate("half-space normal is the zero matrix".into()));
    }
    Ok(DenseMatrix::wrap(project_halfspace_raw(&x.inner, &a.inner, a2, level).0))
}

/// Returns the projection and the nonnegative multiple of `a` that was added.
pub(crate) fn project_halfspace_raw(
    x: &DMatrix<f64>,
    a: &DMatrix<f64>,
    a_norm2: f64,
    level: f64,
) -> (DMatrix<f64>, f64) {
    let slack = level - x.dot(a);
    if slack <= 0.0 {
        (x.clone(), 0.0)
    } else {
        let c = slack / a_norm2;
        (x + a * c, c)
    }
}

/// `u_1 v_1^T`, an element of the subdifferential of the spectral norm at `a`.
pub fn spectral_subgrad(a: &DenseMatrix) -> Result<DenseMatrix> {
    if a.is_zero() {
        return Err(LarosError::InvalidInput("spectral subgradient of the zero matrix".into()));
    }
    let f = svd(a)?;
    DenseMatrix::outer(&f.left_vector(0), &f.right_vector(0))
}

/// `sgn(a_ij) E_ij` at the lexicographically first (row-major) maximiser of
/// `|a_kl|`, with its 0-based position.
pub fn linf_subgrad(a: &DenseMatrix) -> Result<(DenseMatrix, usize, usize)> {
    if a.is_zero() {
        return Err(LarosError::InvalidInput("ℓ∞ subgradient of the zero matrix".into()));
    }
    let (mut bi, mut bj, mut best) = (0, 0, -1.0);
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            let v = a.get(i, j).abs();
            if v > best {
                best = v;
                bi = i;
                bj = j;
            }
        }
    }
    let mut e = DenseMatrix::unit(a.rows(), a.cols(), bi, bj);
    if a.get(bi, bj) < 0.0 {
        e = -&e;
    }
    Ok((e, bi, bj))
}
