//! Property suites for every module, runnable from both the property test
//! target and the acceptance suite.

use laros::cli::{execute, Cli};
use laros::generators::{plant_biclique, plant_rank_one, sample_noise, InstanceKind, NoiseFamily, PlantedModel};
use laros::io::{format_matrix, parse_matrix, MatrixFormat};
use laros::matrix::{
    linf_subgrad, norm, project_halfspace, soft_threshold, spectral_subgrad, svd, svt, theta_norm,
};
use laros::nmf::{greedy_extract, residual_update, ThetaSchedule};
use laros::solver::{check_optimality, solve, solve_with_observer, SolverConfig};
use laros::structure::{
    nonnegative_flip, row_zero_threshold, theta_a, theta_b, BlockSelector, Threshold,
};
use laros::{DenseMatrix, NormKind};
use clap::Parser;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

use super::oracles;

pub const CASES: u32 = 200;

pub struct Property {
    pub module: &'static str,
    pub name: &'static str,
    pub run: fn(u32) -> Result<(), String>,
}

fn check<S: Strategy>(
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    let config = Config {
        cases,
        failure_persistence: None,
        max_global_rejects: 100 * cases,
        ..Config::default()
    };
    let rng = TestRng::deterministic_rng(RngAlgorithm::ChaCha);
    let mut runner = TestRunner::new_with_rng(config, rng);
    runner.run(&strategy, test).map_err(|e| e.to_string())
}

fn matrix(lo: f64, hi: f64, max_dim: usize) -> impl Strategy<Value = DenseMatrix> {
    (1..=max_dim, 1..=max_dim).prop_flat_map(move |(m, n)| {
        prop::collection::vec(lo..hi, m * n).prop_map(move |d| DenseMatrix::from_row_major(m, n, d).unwrap())
    })
}

fn shaped(m: usize, n: usize, lo: f64, hi: f64) -> impl Strategy<Value = DenseMatrix> {
    prop::collection::vec(lo..hi, m * n).prop_map(move |d| DenseMatrix::from_row_major(m, n, d).unwrap())
}

fn m2(a: &DenseMatrix) -> oracles::M2 {
    [a.get(0, 0), a.get(0, 1), a.get(1, 0), a.get(1, 1)]
}

fn tight() -> SolverConfig {
    SolverConfig::new(0.0).with_tolerance(1e-9)
}

fn with_theta(theta: f64) -> SolverConfig {
    let mut c = tight();
    c.theta = theta;
    c
}

// ---- matrix-core ----

fn svt_matches_grid(cases: u32) -> Result<(), String> {
    check(cases, (shaped(2, 2, -2.0, 2.0), 0.0..2.5f64), |(a, tau)| {
        let got = svt(&a, tau).unwrap();
        let a2 = m2(&a);
        let want = oracles::svt(&a2, tau);
        prop_assert!(oracles::dist(&m2(&got), &want) <= 1e-10, "got {:?} want {:?}", got, want);
        let grid = oracles::svt_grid(&a2, tau);
        prop_assert!(oracles::svt_objective(&a2, tau, &m2(&got)) <= oracles::svt_objective(&a2, tau, &grid) + 1e-12);
        Ok(())
    })
}

fn soft_threshold_entrywise(cases: u32) -> Result<(), String> {
    check(cases, (matrix(-5.0, 5.0, 6), 0.0..3.0f64), |(a, tau)| {
        let s = soft_threshold(&a, tau).unwrap();
        for (x, y) in a.as_slice().iter().zip(s.as_slice()) {
            let want = if x.abs() <= tau { 0.0 } else { x.signum() * (x.abs() - tau) };
            prop_assert_eq!(*y, want);
        }
        Ok(())
    })
}

fn projection_idempotent_nonexpansive(cases: u32) -> Result<(), String> {
    let strat = (1usize..=5, 1usize..=5).prop_flat_map(|(m, n)| {
        (shaped(m, n, -3.0, 3.0), shaped(m, n, -3.0, 3.0), shaped(m, n, -3.0, 3.0), -2.0..2.0f64)
    });
    check(cases, strat, |(x, y, a, level)| {
        prop_assume!(a.frobenius_norm() > 1e-3);
        let px = project_halfspace(&x, &a, level).unwrap();
        let py = project_halfspace(&y, &a, level).unwrap();
        prop_assert!(px.inner(&a) >= level - 1e-12 * a.frobenius_norm());
        let ppx = project_halfspace(&px, &a, level).unwrap();
        prop_assert!((&ppx - &px).frobenius_norm() <= 1e-12 * (1.0 + px.frobenius_norm()));
        prop_assert!((&px - &py).frobenius_norm() <= (&x - &y).frobenius_norm() * (1.0 + 1e-12) + 1e-12);
        Ok(())
    })
}

fn subgradient_identities(cases: u32) -> Result<(), String> {
    check(cases, matrix(-4.0, 4.0, 6), |a| {
        prop_assume!(!a.is_zero());
        let g = spectral_subgrad(&a).unwrap();
        let s1 = norm(&a, NormKind::Spectral);
        prop_assert!((a.inner(&g) - s1).abs() <= 1e-10 * s1.max(1.0));
        prop_assert!((norm(&g, NormKind::Spectral) - 1.0).abs() <= 1e-10);
        let (e, i, j) = linf_subgrad(&a).unwrap();
        let top = norm(&a, NormKind::Linf);
        prop_assert!((a.inner(&e) - top).abs() <= 1e-10 * top);
        prop_assert_eq!(a.get(i, j).abs(), top);
        // first argmax in row-major order
        let first = a.to_row_major().iter().position(|x| x.abs() == top).unwrap();
        prop_assert_eq!((i, j), (first / a.cols(), first % a.cols()));
        Ok(())
    })
}

fn theta_norm_is_a_norm(cases: u32) -> Result<(), String> {
    let strat = (1usize..=5, 1usize..=5).prop_flat_map(|(m, n)| {
        (shaped(m, n, -3.0, 3.0), shaped(m, n, -3.0, 3.0), -4.0..4.0f64, 0.0..3.0f64)
    });
    check(cases, strat, |(x, y, c, theta)| {
        let nx = theta_norm(&x, theta).unwrap();
        let ny = theta_norm(&y, theta).unwrap();
        let nxy = theta_norm(&(&x + &y), theta).unwrap();
        prop_assert!(nxy <= nx + ny + 1e-10 * (nx + ny + 1.0));
        let ncx = theta_norm(&x.scale(c), theta).unwrap();
        prop_assert!((ncx - c.abs() * nx).abs() <= 1e-10 * (1.0 + c.abs() * nx));
        Ok(())
    })
}

fn svd_contract(cases: u32) -> Result<(), String> {
    check(cases, matrix(-3.0, 3.0, 7), |a| {
        let f = svd(&a).unwrap();
        let s1 = f.sigma(0);
        prop_assert!(f.singular_values.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!((&f.reconstruct() - &a).frobenius_norm() <= 1e-10 * s1.max(1e-300) + 1e-300);
        let k = f.rank_bound();
        let ut = f.left.transpose() * &f.left;
        let vt = f.right.transpose() * &f.right;
        prop_assert!((ut - nalgebra::DMatrix::<f64>::identity(k, k)).abs().max() <= 1e-10);
        prop_assert!((vt - nalgebra::DMatrix::<f64>::identity(k, k)).abs().max() <= 1e-10);
        for c in 0..k {
            let u = f.left_vector(c);
            let top = u.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            let first = u.iter().find(|x| x.abs() == top).unwrap();
            prop_assert!(*first >= 0.0);
        }
        Ok(())
    })
}

// ---- laros-solver ----

fn weak_duality_every_iterate(cases: u32) -> Result<(), String> {
    check(cases, (matrix(-2.0, 3.0, 5), 0.0..2.0f64), |(a, theta)| {
        prop_assume!(a.frobenius_norm() > 1e-2);
        let mut worst: f64 = f64::NEG_INFINITY;
        let cfg = with_theta(theta).with_max_iters(400);
        solve_with_observer(&a, &cfg, |view| {
            let x = view.feasible_point();
            if let Some((y, z)) = view.decomposition() {
                let tn = theta_norm(&x, theta).unwrap();
                let lhs = x.inner(&a) / tn;
                let yn = norm(&y, NormKind::Spectral);
                let rhs = if theta > 0.0 { yn.max(norm(&z, NormKind::Linf) / theta) } else { yn };
                worst = worst.max((lhs - rhs) / rhs);
            }
        })
        .unwrap();
        prop_assert!(worst <= 1e-10, "violation {}", worst);
        Ok(())
    })
}

fn scaled_solution_unit_norm(cases: u32) -> Result<(), String> {
    check(cases, (matrix(-2.0, 3.0, 5), 0.0..2.0f64), |(a, theta)| {
        prop_assume!(a.frobenius_norm() > 1e-2);
        let sol = solve(&a, &with_theta(theta)).unwrap();
        prop_assert!(sol.converged);
        let tn = theta_norm(&sol.scaled_x(), theta).unwrap();
        prop_assert!((tn - 1.0).abs() <= 1e-8, "theta-norm {}", tn);
        prop_assert!((sol.x.inner(&a) - 1.0).abs() <= 1e-12);
        Ok(())
    })
}

fn theta_zero_leading_pair(cases: u32) -> Result<(), String> {
    check(cases, matrix(0.0, 3.0, 6), |a| {
        let f = svd(&a).unwrap();
        prop_assume!(f.sigma(0) > 1e-2 && f.sigma(0) - f.sigma(1) >= 0.1 * f.sigma(0));
        let sol = solve(&a, &tight()).unwrap();
        let want = DenseMatrix::outer(&f.left_vector(0), &f.right_vector(0)).unwrap().scale(1.0 / f.sigma(0));
        let err = (&sol.x - &want).frobenius_norm();
        prop_assert!(err <= 1e-6 * want.frobenius_norm(), "err {}", err);
        Ok(())
    })
}

fn large_theta_singleton(cases: u32) -> Result<(), String> {
    let strat = (1usize..=4, 1usize..=4, 0usize..16, 1.2..3.0f64, 1.05..2.0f64)
        .prop_flat_map(|(m, n, pos, lift, factor)| (shaped(m, n, 0.0, 1.0), Just((pos % (m * n), lift, factor))));
    check(cases, strat, |(base, (pos, lift, factor))| {
        let (m, n) = base.shape();
        prop_assume!(m * n > 1);
        let (pi, pj) = (pos / n, pos % n);
        let top = base.max_entry().max(0.1) * lift;
        let a = DenseMatrix::from_fn(m, n, |i, j| if (i, j) == (pi, pj) { top } else { base.get(i, j) }).unwrap();
        let Threshold::Value(tb) = theta_b(&a, &BlockSelector::singleton(pi, pj)).unwrap() else {
            return Err(TestCaseError::fail("singleton threshold not applicable"));
        };
        let sol = solve(&a, &with_theta(tb * factor)).unwrap();
        prop_assert!(sol.converged);
        prop_assert_eq!(&sol.support_rows, &vec![pi]);
        prop_assert_eq!(&sol.support_cols, &vec![pj]);
        Ok(())
    })
}

fn nonnegative_above_theta_one(cases: u32) -> Result<(), String> {
    check(cases, (matrix(0.0, 2.0, 6), 1.01..3.0f64), |(a, theta)| {
        prop_assume!(a.max_entry() > 1e-2);
        let sol = solve(&a, &with_theta(theta)).unwrap();
        prop_assert!(sol.converged);
        prop_assert!(sol.x.min_entry() >= -1e-9, "min {}", sol.x.min_entry());
        Ok(())
    })
}

fn rank_one_below_theta_a(cases: u32) -> Result<(), String> {
    check(cases, (matrix(0.0, 2.0, 6), 0.05..0.95f64), |(a, frac)| {
        let s = laros::matrix::singular_values(&a);
        prop_assume!(s[0] > 1e-2 && s.get(1).map_or(true, |s2| s[0] - s2 >= 0.05 * s[0]));
        let theta = frac * theta_a(&a).unwrap();
        let sol = solve(&a, &with_theta(theta)).unwrap();
        prop_assert!(sol.converged);
        prop_assert!(sol.sigma_ratio <= 1e-6, "ratio {}", sol.sigma_ratio);
        Ok(())
    })
}

fn merit_nonincreasing(cases: u32) -> Result<(), String> {
    check(cases, (matrix(-2.0, 3.0, 5), 0.0..2.0f64, 0.3..3.0f64), |(a, theta, rho)| {
        prop_assume!(a.frobenius_norm() > 1e-2);
        let mut merits = Vec::new();
        let cfg = with_theta(theta).with_penalty(rho).with_max_iters(3000);
        solve_with_observer(&a, &cfg, |view| merits.push(view.merit)).unwrap();
        // increases below roundoff of the starting merit are not counted
        let floor = 1e-12 * merits[0];
        for (k, w) in merits.windows(2).enumerate() {
            prop_assert!(w[1] <= w[0] * (1.0 + 1e-12) + floor, "merit rose at {}: {} -> {}", k + 1, w[0], w[1]);
        }
        Ok(())
    })
}

fn certificate_residuals(cases: u32) -> Result<(), String> {
    check(cases, (matrix(0.0, 3.0, 6), 0.0..2.0f64), |(a, theta)| {
        prop_assume!(a.max_entry() > 1e-2);
        let sol = solve(&a, &with_theta(theta)).unwrap();
        prop_assert!(sol.converged);
        let cert = sol.certificate(&a).unwrap();
        let report = check_optimality(&a, theta, &sol.scaled_x(), &cert);
        prop_assert!(report.max_residual() <= 1e-6, "{:?}", report);
        prop_assert!((cert.alpha + theta * cert.beta - 1.0).abs() <= 1e-9);
        Ok(())
    })
}

// ---- structure-analysis ----

fn sparsity_above_theta_b(cases: u32) -> Result<(), String> {
    let strat = (2usize..=5, 2usize..=5).prop_flat_map(|(m, n)| {
        (1..m, 1..n, shaped(m, n, 0.0, 1.0), 1.05..2.0f64, 1.05..2.0f64)
    });
    check(cases, strat, |(bm, bn, noise, lift, factor)| {
        let (m, n) = noise.shape();
        // block entries in [lift, lift + 1), outside entries in [0, 1)
        let a = DenseMatrix::from_fn(m, n, |i, j| if i < bm && j < bn { lift + noise.get(i, j) } else { noise.get(i, j) })
            .unwrap();
        let block = BlockSelector::leading(bm, bn);
        let Threshold::Value(tb) = theta_b(&a, &block).unwrap() else {
            return Err(TestCaseError::fail("block threshold not applicable"));
        };
        let sol = solve(&a, &with_theta(tb * factor)).unwrap();
        prop_assert!(sol.converged);
        for i in 0..m {
            for j in 0..n {
                if !block.contains(i, j) {
                    prop_assert!(sol.x.get(i, j).abs() <= 1e-8, "x[{},{}] = {}", i, j, sol.x.get(i, j));
                }
            }
        }
        Ok(())
    })
}

fn dominated_row_is_zero(cases: u32) -> Result<(), String> {
    let strat = (3usize..=5, 2usize..=5).prop_flat_map(|(m, n)| {
        (shaped(m, n, 0.5, 1.0), 1.5..4.0f64, 0.05..0.5f64, 0.1..2.0f64)
    });
    check(cases, strat, |(base, boost, shrink, extra)| {
        let (m, n) = base.shape();
        // row 0 dominates row 1 entrywise by at least boost·0.5 / shrink
        let a = DenseMatrix::from_fn(m, n, |i, j| match i {
            0 => boost * base.get(i, j),
            1 => shrink * base.get(i, j),
            _ => base.get(i, j),
        })
        .unwrap();
        let Threshold::Value(t) = row_zero_threshold(&a, 0, 1).unwrap() else {
            return Err(TestCaseError::fail("row threshold not applicable"));
        };
        let sol = solve(&a, &with_theta(t + extra)).unwrap();
        prop_assert!(sol.converged);
        prop_assume!(sol.rank_one && sol.x.min_entry() >= -1e-12);
        let row: f64 = (0..n).fold(0.0, |acc, j| acc.max(sol.x.get(1, j).abs()));
        prop_assert!(row <= 1e-8, "row 1 max {}", row);
        Ok(())
    })
}

fn flip_closure(cases: u32) -> Result<(), String> {
    let strat = (1usize..=5, 1usize..=5).prop_flat_map(|(m, n)| {
        (
            shaped(m, n, 0.0, 2.0),
            prop::collection::vec(-1.0..1.0f64, m),
            prop::collection::vec(-1.0..1.0f64, n),
            0.1..3.0f64,
            0.0..3.0f64,
        )
    });
    check(cases, strat, |(a, u, v, sigma, theta)| {
        let x = DenseMatrix::outer(&u.iter().map(|t| sigma * t).collect::<Vec<_>>(), &v).unwrap();
        let flipped = nonnegative_flip(sigma, &u, &v).unwrap();
        let tx = theta_norm(&x, theta).unwrap();
        let tf = theta_norm(&flipped, theta).unwrap();
        prop_assert!((tx - tf).abs() <= 1e-10 * (1.0 + tx));
        prop_assert!(flipped.inner(&a) >= x.inner(&a) - 1e-12 * (1.0 + tx));
        Ok(())
    })
}

// ---- generators ----

fn generator_determinism(cases: u32) -> Result<(), String> {
    let strat = (2usize..12, 2usize..12, any::<u64>(), 0.0..0.5f64, 0.0..1.0f64);
    check(cases, strat, |(m, n, seed, c3, p)| {
        let model = PlantedModel::new(m, n, m / 2, n / 2, 1.0)
            .with_perturbation(0.2, 0.1)
            .with_noise(NoiseFamily::Uniform, c3);
        prop_assert_eq!(plant_rank_one(&model, seed).unwrap().a, plant_rank_one(&model, seed).unwrap().a);
        prop_assert_eq!(
            plant_biclique(m, n, m / 2, n / 2, p, seed).unwrap().a,
            plant_biclique(m, n, m / 2, n / 2, p, seed).unwrap().a
        );
        prop_assert_eq!(
            sample_noise(NoiseFamily::Bernoulli, 1.0, c3, m, n, seed).unwrap(),
            sample_noise(NoiseFamily::Bernoulli, 1.0, c3, m, n, seed).unwrap()
        );
        Ok(())
    })
}

fn noiseless_block_rank_one(cases: u32) -> Result<(), String> {
    let strat = (2usize..10, 2usize..10, any::<u64>(), 0.0..0.9f64, 0.0..0.9f64, 0.1..5.0f64);
    check(cases, strat, |(m, n, seed, c1, c2, sigma0)| {
        let model = PlantedModel::new(m + 1, n + 1, m, n, sigma0).with_perturbation(c1, c2);
        let inst = plant_rank_one(&model, seed).unwrap();
        let InstanceKind::RankOne { u0, v0, .. } = &inst.kind else { unreachable!() };
        let block = inst.a.select(inst.truth.rows(), inst.truth.cols()).unwrap();
        let f = svd(&block).unwrap();
        let nu = u0.iter().map(|x| x * x).sum::<f64>().sqrt();
        let nv = v0.iter().map(|x| x * x).sum::<f64>().sqrt();
        prop_assert!((f.sigma(0) - sigma0 * nu * nv).abs() <= 1e-10 * f.sigma(0));
        prop_assert!(f.sigma(1) <= 1e-10 * f.sigma(0));
        Ok(())
    })
}

fn planted_factors_nonnegative(cases: u32) -> Result<(), String> {
    let strat = (1usize..30, 1usize..30, any::<u64>(), 0.0..3.0f64, 0.0..3.0f64);
    check(cases, strat, |(bm, bn, seed, c1, c2)| {
        let model = PlantedModel::new(bm + 1, bn + 1, bm, bn, 1.0).with_perturbation(c1, c2);
        let inst = plant_rank_one(&model, seed).unwrap();
        let InstanceKind::RankOne { u0, v0, .. } = &inst.kind else { unreachable!() };
        prop_assert!(u0.iter().chain(v0).all(|&x| x > 0.0));
        let p = u0.iter().map(|x| (x - 1.0).powi(2)).sum::<f64>().sqrt();
        let q = v0.iter().map(|x| (x - 1.0).powi(2)).sum::<f64>().sqrt();
        prop_assert!(p <= c1 * (bm as f64).sqrt() * (1.0 + 1e-12));
        prop_assert!(q <= c2 * (bn as f64).sqrt() * (1.0 + 1e-12));
        Ok(())
    })
}

// ---- greedy-nmf ----

fn nmf_case() -> impl Strategy<Value = (DenseMatrix, f64)> {
    (matrix(0.0, 2.0, 6), 0.05..1.5f64)
}

fn nmf_factors_nonnegative(cases: u32) -> Result<(), String> {
    check(cases, nmf_case(), |(a, theta)| {
        prop_assume!(a.max_entry() > 1e-2);
        let res = greedy_extract(&a, 3, &ThetaSchedule::Fixed(theta), &tight()).unwrap();
        prop_assert!(res.w.is_nonnegative() && res.h.is_nonnegative());
        prop_assert!(res.residual.is_nonnegative());
        Ok(())
    })
}

fn nmf_residuals_decrease(cases: u32) -> Result<(), String> {
    check(cases, nmf_case(), |(a, theta)| {
        prop_assume!(a.max_entry() > 1e-2);
        let res = greedy_extract(&a, 3, &ThetaSchedule::Fixed(theta), &tight()).unwrap();
        prop_assert_eq!(res.residual_norms.len(), res.features() + 1);
        for w in res.residual_norms.windows(2) {
            prop_assert!(w[1] < w[0], "{:?}", res.residual_norms);
        }
        Ok(())
    })
}

fn nmf_support_matches_solver(cases: u32) -> Result<(), String> {
    check(cases, nmf_case(), |(a, theta)| {
        prop_assume!(a.max_entry() > 1e-2);
        let res = greedy_extract(&a, 3, &ThetaSchedule::Fixed(theta), &tight()).unwrap();
        let mut r = a.clone();
        for (round, block) in res.supports.iter().enumerate() {
            let sol = solve(&r, &with_theta(theta)).unwrap();
            prop_assert_eq!(&sol.support_rows, &block.rows().to_vec());
            prop_assert_eq!(&sol.support_cols, &block.cols().to_vec());
            let f = svd(&r.select(block.rows(), block.cols()).unwrap()).unwrap();
            let u: Vec<f64> = f.left_vector(0).iter().map(|x| x.max(0.0)).collect();
            let v: Vec<f64> = f.right_vector(0).iter().map(|x| x.max(0.0)).collect();
            let wc = res.w.col(round);
            for (k, &i) in block.rows().iter().enumerate() {
                prop_assert!((wc[i] - f.sigma(0).sqrt() * u[k]).abs() <= 1e-12 * (1.0 + wc[i].abs()));
            }
            r = residual_update(&r, f.sigma(0), &u, &v, block).unwrap();
        }
        Ok(())
    })
}

// ---- cli ----

fn array_round_trip(cases: u32) -> Result<(), String> {
    let entry = prop_oneof![
        -1e3..1e3f64,
        any::<f64>().prop_filter("finite", |x| x.is_finite()),
        Just(0.0),
        Just(-0.0),
        Just(f64::MIN_POSITIVE),
    ];
    let strat = (1usize..6, 1usize..6)
        .prop_flat_map(move |(m, n)| (Just((m, n)), prop::collection::vec(entry.clone(), m * n)));
    check(cases, strat, |((m, n), data)| {
        let a = DenseMatrix::from_row_major(m, n, data).unwrap();
        let back = parse_matrix(&format_matrix(&a, MatrixFormat::MatrixmarketArray), None).unwrap();
        let same = a.as_slice().iter().zip(back.as_slice()).all(|(x, y)| x.to_bits() == y.to_bits());
        prop_assert!(same, "{:?} vs {:?}", a, back);
        Ok(())
    })
}

fn identical_runs_identical_files(cases: u32) -> Result<(), String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let strat = (3usize..10, 3usize..10, any::<u64>(), 0.0..0.3f64);
    check(cases, strat, |(m, n, seed, c3)| {
        let mut outputs = Vec::new();
        for k in 0..2 {
            let mtx = dir.path().join(format!("a{k}.mtx"));
            let args = vec![
                "laros".to_string(),
                "plant".into(),
                "--m".into(),
                m.to_string(),
                "--n".into(),
                n.to_string(),
                "--M".into(),
                (m / 2).to_string(),
                "--N".into(),
                (n / 2).to_string(),
                "--c3".into(),
                c3.to_string(),
                "--seed".into(),
                seed.to_string(),
                "--matrix".into(),
                mtx.display().to_string(),
            ];
            let cli = Cli::try_parse_from(&args).unwrap();
            let out = execute(&cli).unwrap();
            let mut record = out.record;
            record["matrix"] = serde_json::Value::Null;
            let text = std::fs::read_to_string(&mtx).unwrap();
            let a = parse_matrix(&text, None).unwrap();
            let sol_args = ["laros", "solve", "--input", &mtx.display().to_string(), "--theta", "0.3"];
            let sol = execute(&Cli::try_parse_from(sol_args).unwrap()).unwrap().record;
            outputs.push((serde_json::to_string(&record).unwrap(), text, serde_json::to_string(&sol).unwrap(), a));
        }
        prop_assert_eq!(&outputs[0].0, &outputs[1].0);
        prop_assert_eq!(&outputs[0].1, &outputs[1].1);
        prop_assert_eq!(&outputs[0].2, &outputs[1].2);
        Ok(())
    })
}

pub fn all() -> Vec<Property> {
    macro_rules! p {
        ($module:literal, $f:ident) => {
            Property {
                module: $module,
                name: stringify!($f),
                run: $f,
            }
        };
    }
    vec![
        p!("matrix-core", svt_matches_grid),
        p!("matrix-core", soft_threshold_entrywise),
        p!("matrix-core", projection_idempotent_nonexpansive),
        p!("matrix-core", subgradient_identities),
        p!("matrix-core", theta_norm_is_a_norm),
        p!("matrix-core", svd_contract),
        p!("laros-solver", weak_duality_every_iterate),
        p!("laros-solver", scaled_solution_unit_norm),
        p!("laros-solver", theta_zero_leading_pair),
        p!("laros-solver", large_theta_singleton),
        p!("laros-solver", nonnegative_above_theta_one),
        p!("laros-solver", rank_one_below_theta_a),
        p!("laros-solver", merit_nonincreasing),
        p!("laros-solver", certificate_residuals),
        p!("structure-analysis", sparsity_above_theta_b),
        p!("structure-analysis", dominated_row_is_zero),
        p!("structure-analysis", flip_closure),
        p!("generators", generator_determinism),
        p!("generators", noiseless_block_rank_one),
        p!("generators", planted_factors_nonnegative),
        p!("greedy-nmf", nmf_factors_nonnegative),
        p!("greedy-nmf", nmf_residuals_decrease),
        p!("greedy-nmf", nmf_support_matches_solver),
        p!("cli", array_round_trip),
        p!("cli", identical_runs_identical_files),
    ]
}
