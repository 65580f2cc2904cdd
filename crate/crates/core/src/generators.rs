//! Seeded synthetic inputs: the planted rank-one model with nonnegative
//! i.i.d. noise, planted bicliques in random bipartite graphs, and the small
//! two-block demonstration matrix.
//!
//! Every generator is a pure function of its parameters and a 64-bit seed.
//! The seed keys a ChaCha8 generator and each block of the output draws from
//! its own stream, so changing the size of one block does not reshuffle the
//! others.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{LarosError, Result};
use crate::matrix::DenseMatrix;
use crate::structure::BlockSelector;

const STREAM_NOISE: u64 = 0;
const STREAM_P: u64 = 1;
const STREAM_Q: u64 = 2;
const STREAM_R11: u64 = 3;
const STREAM_R12: u64 = 4;
const STREAM_R21: u64 = 5;
const STREAM_R22: u64 = 6;
const STREAM_EDGES: u64 = 7;

/// Smallest entry allowed in the perturbed planted factors `e + p`.
pub const FACTOR_FLOOR: f64 = 1e-3;

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Distribution of the nonnegative noise entries, each with mean `c3·σ0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseFamily {
    /// Uniform on `[0, 2c3σ0]`.
    Uniform,
    /// `0` or `2c3σ0` with probability ½ each.
    Bernoulli,
    None,
}

impl NoiseFamily {
    /// Subgaussian constant of `r/σ0 − c3`.
    ///
    /// Uniform on `[−c3, c3]` has `P(|x| >= t) = 1 − t/c3 <= exp(−t²/(2c3²))`,
    /// so `b = c3`. The symmetric two-point case uses the moment-generating
    /// constant `c3 / sqrt(2 ln 2)`, which gives `1/sqrt(8 ln 2)` for the
    /// half-density biclique.
    pub fn subgaussian_b(self, c3: f64) -> f64 {
        match self {
            NoiseFamily::Uniform => c3,
            NoiseFamily::Bernoulli => c3 / (2.0 * std::f64::consts::LN_2).sqrt(),
            NoiseFamily::None => 0.0,
        }
    }
}

impl fmt::Display for NoiseFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NoiseFamily::Uniform => "uniform",
            NoiseFamily::Bernoulli => "bernoulli",
            NoiseFamily::None => "none",
        })
    }
}

impl FromStr for NoiseFamily {
    type Err = LarosError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "uniform" => Ok(NoiseFamily::Uniform),
            "bernoulli" => Ok(NoiseFamily::Bernoulli),
            "none" => Ok(NoiseFamily::None),
            other => Err(LarosError::param("noise_family", format!("unknown family `{other}`"))),
        }
    }
}

/// Parameters of `A = [σ0 u0 v0^T, 0; 0, 0] + R` with `u0 = e_M + p`,
/// `v0 = e_N + q`, `‖p‖ <= c1 √M`, `‖q‖ <= c2 √N` and `R` i.i.d. nonnegative
/// with mean `c3 σ0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlantedModel {
    pub m: usize,
    pub n: usize,
    /// Planted block height `M`.
    pub block_rows: usize,
    /// Planted block width `N`.
    pub block_cols: usize,
    pub sigma0: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    /// Subgaussian constant of the centred, scaled noise.
    pub b: f64,
    pub noise_family: NoiseFamily,
    /// Whether the noise also covers the planted block (`R11 ≠ 0`).
    pub noise_on_block: bool,
}

impl PlantedModel {
    /// Noise-free, unperturbed model; adjust with the `with_*` methods.
    pub fn new(m: usize, n: usize, block_rows: usize, block_cols: usize, sigma0: f64) -> Self {
        PlantedModel {
            m,
            n,
            block_rows,
            block_cols,
            sigma0,
            c1: 0.0,
            c2: 0.0,
            c3: 0.0,
            b: 0.0,
            noise_family: NoiseFamily::None,
            noise_on_block: true,
        }
    }

    pub fn with_perturbation(mut self, c1: f64, c2: f64) -> Self {
        self.c1 = c1;
        self.c2 = c2;
        self
    }

    /// Sets the noise family and level, and `b` to the family's constant.
    pub fn with_noise(mut self, family: NoiseFamily, c3: f64) -> Self {
        self.noise_family = family;
        self.c3 = c3;
        self.b = family.subgaussian_b(c3);
        self
    }

    pub fn with_noise_on_block(mut self, on: bool) -> Self {
        self.noise_on_block = on;
        self
    }

    pub fn sqrt_mn(&self) -> f64 {
        ((self.block_rows * self.block_cols) as f64).sqrt()
    }

    pub fn truth(&self) -> BlockSelector {
        BlockSelector::leading(self.block_rows, self.block_cols)
    }

    pub fn validate(&self) -> Result<()> {
        if self.block_rows == 0 || self.block_cols == 0 {
            return Err(LarosError::param("block", "planted block must be nonempty"));
        }
        if self.block_rows >= self.m {
            return Err(LarosError::param("M", format!("need M < m, got M={} m={}", self.block_rows, self.m)));
        }
        if self.block_cols >= self.n {
            return Err(LarosError::param("N", format!("need N < n, got N={} n={}", self.block_cols, self.n)));
        }
        if !(self.sigma0.is_finite() && self.sigma0 > 0.0) {
            return Err(LarosError::param("sigma0", format!("must be positive, got {}", self.sigma0)));
        }
        for (name, v) in [("c1", self.c1), ("c2", self.c2), ("c3", self.c3), ("b", self.b)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(LarosError::param(name, format!("must be finite and >= 0, got {v}")));
            }
        }
        Ok(())
    }
}

/// A generated matrix with its ground-truth block.
#[derive(Clone, Debug)]
pub struct PlantedInstance {
    pub a: DenseMatrix,
    pub truth: BlockSelector,
    pub kind: InstanceKind,
    pub seed: u64,
}

#[derive(Clone, Debug)]
pub enum InstanceKind {
    RankOne {
        model: PlantedModel,
        /// `e_M + p`.
        u0: Vec<f64>,
        /// `e_N + q`.
        v0: Vec<f64>,
    },
    Biclique {
        edge_probability: f64,
    },
}

fn fill_noise(rng: &mut ChaCha8Rng, family: NoiseFamily, top: f64, rows: usize, cols: usize, out: &mut impl FnMut(usize, usize, f64)) {
    // row-major, so a block's draws depend only on its own shape
    for i in 0..rows {
        for j in 0..cols {
            let x = match family {
                NoiseFamily::None => 0.0,
                _ if top == 0.0 => 0.0,
                NoiseFamily::Uniform => rng.random_range(0.0..=top),
                NoiseFamily::Bernoulli => {
                    if rng.random_bool(0.5) {
                        top
                    } else {
                        0.0
                    }
                }
            };
            out(i, j, x);
        }
    }
}

/// i.i.d. nonnegative noise with mean `c3·σ0`.
pub fn sample_noise(
    family: NoiseFamily,
    sigma0: f64,
    c3: f64,
    rows: usize,
    cols: usize,
    seed: u64,
) -> Result<DenseMatrix> {
    if !(c3.is_finite() && c3 >= 0.0) {
        return Err(LarosError::param("c3", format!("must be finite and >= 0, got {c3}")));
    }
    if !(sigma0.is_finite() && sigma0 > 0.0) {
        return Err(LarosError::param("sigma0", format!("must be positive, got {sigma0}")));
    }
    let mut rng = stream(seed, STREAM_NOISE);
    let mut entries = vec![0.0; rows * cols];
    fill_noise(&mut rng, family, 2.0 * c3 * sigma0, rows, cols, &mut |i, j, x| {
        entries[i * cols + j] = x
    });
    DenseMatrix::from_row_major(rows, cols, entries)
}

/// `e + p` with `p` uniform in direction, radius `cap·ω` with `ω ~ U[0, 1]`,
/// and entries of `p` clipped from below at `−min(c, 1 − FACTOR_FLOOR)`.
fn perturbed_ones(rng: &mut ChaCha8Rng, len: usize, c: f64) -> Vec<f64> {
    if c == 0.0 {
        return vec![1.0; len];
    }
    let dir: Vec<f64> = (0..len).map(|_| rng.sample(StandardNormal)).collect();
    let norm = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
    let radius = c * (len as f64).sqrt() * rng.random_range(0.0..=1.0);
    let floor = -c.min(1.0 - FACTOR_FLOOR);
    dir.iter()
        .map(|d| {
            let p = if norm > 0.0 { d / norm * radius } else { 0.0 };
            // clipping only shrinks |p_i|, so the norm cap still holds
            1.0 + p.max(floor)
        })
        .collect()
}

/// Draws one instance of the planted rank-one model.
pub fn plant_rank_one(model: &PlantedModel, seed: u64) -> Result<PlantedInstance> {
    model.validate()?;
    let (m, n) = (model.m, model.n);
    let (bm, bn) = (model.block_rows, model.block_cols);
    let u0 = perturbed_ones(&mut stream(seed, STREAM_P), bm, model.c1);
    let v0 = perturbed_ones(&mut stream(seed, STREAM_Q), bn, model.c2);

    let mut a = nalgebra::DMatrix::zeros(m, n);
    for i in 0..bm {
        for j in 0..bn {
            a[(i, j)] = model.sigma0 * u0[i] * v0[j];
        }
    }
    let top = 2.0 * model.c3 * model.sigma0;
    let family = model.noise_family;
    let blocks = [
        (STREAM_R11, 0, 0, bm, bn, model.noise_on_block),
        (STREAM_R12, 0, bn, bm, n - bn, true),
        (STREAM_R21, bm, 0, m - bm, bn, true),
        (STREAM_R22, bm, bn, m - bm, n - bn, true),
    ];
    for (id, r0, c0, rows, cols, active) in blocks {
        if !active {
            continue;
        }
        let mut rng = stream(seed, id);
        fill_noise(&mut rng, family, top, rows, cols, &mut |i, j, x| a[(r0 + i, c0 + j)] += x);
    }
    Ok(PlantedInstance {
        a: DenseMatrix::from_nalgebra(a)?,
        truth: model.truth(),
        kind: InstanceKind::RankOne {
            model: model.clone(),
            u0,
            v0,
        },
        seed,
    })
}

/// Adjacency matrix of a random bipartite graph with a planted `M × N`
/// biclique on the leading rows and columns; every other edge is present
/// independently with probability `p_edge`.
pub fn plant_biclique(
    m: usize,
    n: usize,
    block_rows: usize,
    block_cols: usize,
    p_edge: f64,
    seed: u64,
) -> Result<PlantedInstance> {
    if !(0.0..=1.0).contains(&p_edge) {
        return Err(LarosError::param("p_edge", format!("must lie in [0, 1], got {p_edge}")));
    }
    if block_rows == 0 || block_cols == 0 || block_rows > m || block_cols > n {
        return Err(LarosError::param(
            "block",
            format!("need 1 <= M <= m and 1 <= N <= n, got M={block_rows} N={block_cols} m={m} n={n}"),
        ));
    }
    let mut rng = stream(seed, STREAM_EDGES);
    let a = DenseMatrix::from_fn(m, n, |i, j| {
        if i < block_rows && j < block_cols {
            1.0
        } else if rng.random_bool(p_edge) {
            1.0
        } else {
            0.0
        }
    })?;
    Ok(PlantedInstance {
        a,
        truth: BlockSelector::leading(block_rows, block_cols),
        kind: InstanceKind::Biclique {
            edge_probability: p_edge,
        },
        seed,
    })
}

/// Two approximately rank-one 3×3 blocks on the diagonal with a little
/// cross-talk in the upper-right corner.
pub fn example_6x6() -> DenseMatrix {
    DenseMatrix::from_rows(&[
        [0.8, 0.9, 1.1, 0.1, 0.2, 0.2],
        [0.8, 1.1, 0.8, 0.0, 0.0, 0.0],
        [1.0, 1.0, 0.8, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.8, 0.9, 1.0],
        [0.0, 0.0, 0.0, 0.9, 1.0, 0.8],
        [0.0, 0.0, 0.0, 1.0, 1.1, 0.8],
    ])
    .expect("fixture is finite")
}
