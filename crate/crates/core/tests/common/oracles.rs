//! Reference computations that share no code with the library: closed-form
//! 2×2 singular values and coarse-to-fine grid searches over 2×2 matrices.

/// Row-major 2×2 matrix.
pub type M2 = [f64; 4];

fn frob2(a: &M2) -> f64 {
    a.iter().map(|x| x * x).sum()
}

fn det(a: &M2) -> f64 {
    a[0] * a[3] - a[1] * a[2]
}

/// Largest singular value from `σ1² = (F² + sqrt(F⁴ − 4 det²)) / 2`.
pub fn spectral(a: &M2) -> f64 {
    let f2 = frob2(a);
    let d = det(a);
    ((f2 + (f2 * f2 - 4.0 * d * d).max(0.0).sqrt()) / 2.0).sqrt()
}

/// `σ1 + σ2 = sqrt(F² + 2|det|)`.
pub fn nuclear(a: &M2) -> f64 {
    (frob2(a) + 2.0 * det(a).abs()).sqrt()
}

pub fn linf(a: &M2) -> f64 {
    a.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

pub fn l1(a: &M2) -> f64 {
    a.iter().map(|x| x.abs()).sum()
}

/// Minimizes `f` over the box `center ± half` by repeated grid refinement:
/// `points` per axis, window halved around the best point each level.
pub fn grid_minimize(f: impl Fn(&M2) -> f64, center: M2, half: f64, points: usize, levels: usize) -> (M2, f64) {
    let mut c = center;
    let mut h = half;
    let mut best = (c, f(&c));
    for _ in 0..levels {
        let step = 2.0 * h / (points - 1) as f64;
        let axis = |k: usize, i: usize| c[k] - h + step * i as f64;
        for i0 in 0..points {
            for i1 in 0..points {
                for i2 in 0..points {
                    for i3 in 0..points {
                        let p = [axis(0, i0), axis(1, i1), axis(2, i2), axis(3, i3)];
                        let v = f(&p);
                        if v < best.1 {
                            best = (p, v);
                        }
                    }
                }
            }
        }
        c = best.0;
        h *= 0.5;
    }
    polish(&f, best, h)
}

/// Pattern search along pseudo-random unit directions; the step halves after
/// a full sweep without improvement. Escapes the kinks where coordinate grids
/// stall.
fn polish(f: &impl Fn(&M2) -> f64, start: (M2, f64), step: f64) -> (M2, f64) {
    let (mut x, mut fx) = start;
    let mut h = step.max(1e-3);
    // xorshift, so the oracle needs nothing beyond core
    let mut state: u64 = 0x9e37_79b9_7f4a_7c15;
    let mut uniform = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
    };
    while h > 1e-13 {
        let mut improved = false;
        for _ in 0..200 {
            let d: M2 = std::array::from_fn(|_| uniform());
            let len = frob2(&d).sqrt();
            for sign in [1.0, -1.0] {
                let y: M2 = std::array::from_fn(|k| x[k] + sign * h * d[k] / len);
                let fy = f(&y);
                if fy < fx {
                    (x, fx) = (y, fy);
                    improved = true;
                }
            }
        }
        if !improved {
            h *= 0.5;
        }
    }
    (x, fx)
}

/// `min over Y + Z = A of max{‖Y‖, ‖Z‖_∞/θ}`. With `g(t)` the smallest
/// `‖A − Z‖` over the box `‖Z‖_∞ <= θt`, the value is the fixed point
/// `g(t) = t`, found by bisection since `g` is nonincreasing.
pub fn dual_theta_norm(a: &M2, theta: f64) -> f64 {
    let g = |t: f64| {
        let r = theta * t;
        let clamp = |w: &M2| -> M2 { std::array::from_fn(|k| w[k].clamp(-r, r)) };
        let f = |w: &M2| {
            let z = clamp(w);
            spectral(&[a[0] - z[0], a[1] - z[1], a[2] - z[2], a[3] - z[3]])
        };
        grid_minimize(f, [0.0; 4], r.max(1e-12), 9, 30).1
    };
    let (mut lo, mut hi) = (0.0, spectral(a));
    for _ in 0..50 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > mid {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// `argmin τ‖X‖_* + ½‖X − A‖_F²` from the eigenvectors of `AᵀA`: each
/// right singular pair contributes `max(σ − τ, 0)/σ · A v vᵀ`.
pub fn svt(a: &M2, tau: f64) -> M2 {
    let (p, q, r) = (a[0] * a[0] + a[2] * a[2], a[0] * a[1] + a[2] * a[3], a[1] * a[1] + a[3] * a[3]);
    let phi = 0.5 * (2.0 * q).atan2(p - r);
    let mut out = [0.0; 4];
    for v in [[phi.cos(), phi.sin()], [-phi.sin(), phi.cos()]] {
        let av = [a[0] * v[0] + a[1] * v[1], a[2] * v[0] + a[3] * v[1]];
        let sigma = (av[0] * av[0] + av[1] * av[1]).sqrt();
        if sigma > tau {
            let w = (sigma - tau) / sigma;
            out[0] += w * av[0] * v[0];
            out[1] += w * av[0] * v[1];
            out[2] += w * av[1] * v[0];
            out[3] += w * av[1] * v[1];
        }
    }
    out
}

/// `τ‖X‖_* + ½‖X − A‖_F²`.
pub fn svt_objective(a: &M2, tau: f64, x: &M2) -> f64 {
    tau * nuclear(x) + 0.5 * dist(x, a).powi(2)
}

/// Grid search for the same minimizer.
pub fn svt_grid(a: &M2, tau: f64) -> M2 {
    grid_minimize(|x| svt_objective(a, tau, x), *a, linf(a).max(1e-3) * 1.5, 9, 45).0
}

/// Frobenius distance between two 2×2 matrices.
pub fn dist(a: &M2, b: &M2) -> f64 {
    let d = [a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]];
    frob2(&d).sqrt()
}

/// `θ`-norm `‖X‖_* + θ‖X‖_1`.
pub fn theta_norm(x: &M2, theta: f64) -> f64 {
    nuclear(x) + theta * l1(x)
}

/// Lower bound on the dual norm: `max <A, X>/‖X‖_θ` over a grid of `X`
/// normalized to unit Frobenius norm, refined around the best point.
pub fn dual_theta_norm_lower(a: &M2, theta: f64) -> f64 {
    let ratio = |x: &M2| {
        let t = theta_norm(x, theta);
        if t == 0.0 {
            return 0.0;
        }
        -(x[0] * a[0] + x[1] * a[1] + x[2] * a[2] + x[3] * a[3]) / t
    };
    -grid_minimize(ratio, *a, linf(a).max(1e-3) * 1.5, 11, 40).1
}

/// Leading singular triple of a row-major `m × n` matrix by power iteration
/// on `AᵀA`, run until the direction stops moving.
pub fn leading_pair(a: &[f64], m: usize, n: usize) -> (f64, Vec<f64>, Vec<f64>) {
    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    let mut u = vec![0.0; m];
    let mut sigma = 0.0;
    for _ in 0..100_000 {
        for i in 0..m {
            u[i] = (0..n).map(|j| a[i * n + j] * v[j]).sum();
        }
        let mut w: Vec<f64> = (0..n).map(|j| (0..m).map(|i| a[i * n + j] * u[i]).sum()).collect();
        let len = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        w.iter_mut().for_each(|x| *x /= len);
        let moved = w.iter().zip(&v).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        v = w;
        if moved < 1e-15 {
            break;
        }
    }
    for i in 0..m {
        u[i] = (0..n).map(|j| a[i * n + j] * v[j]).sum();
    }
    sigma = u.iter().map(|x| x * x).sum::<f64>().sqrt().max(sigma);
    u.iter_mut().for_each(|x| *x /= sigma);
    (sigma, u, v)
}
