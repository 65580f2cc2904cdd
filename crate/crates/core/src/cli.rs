//! Command-line front end.
//!
//! Every subcommand writes one pretty-printed JSON record, to `--output` or
//! standard output. Indices in records are 1-based. When `--output` is given a
//! run manifest (command, inputs, parameters, version, wall-clock time) is
//! written beside it as `<output>.manifest.json`; keeping the timing out of
//! the record makes reruns byte-identical.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{LarosError, Result};
use crate::generators::{plant_biclique, plant_rank_one, InstanceKind, NoiseFamily, PlantedModel};
use crate::io::{read_matrix, write_matrix, MatrixFormat};
use crate::matrix::DenseMatrix;
use crate::nmf::{greedy_extract, ThetaSchedule};
use crate::solver::{check_optimality, solve, DualCertificate, SolverConfig, UniquenessDiagnostics};
use crate::structure::{
    col_zero_threshold, row_zero_threshold, theta_a, theta_b, validate_planted_regime, BlockSelector, RegimeReport,
    Threshold,
};

#[derive(Debug, Parser)]
#[command(name = "laros", version, about = "Find large near-rank-one blocks with a convex relaxation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write the result record here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the relaxation for a matrix file.
    Solve(SolveArgs),
    /// Closed-form thresholds of a nonnegative matrix.
    Thresholds(ThresholdArgs),
    /// Generate a planted rank-one instance.
    Plant(PlantArgs),
    /// Check a solution record against the optimality system.
    Certify(CertifyArgs),
    /// Greedy nonnegative factorization.
    Nmf(NmfArgs),
    /// Plant a biclique, solve, and compare the support with the truth.
    Biclique(BicliqueArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Matrix file.
    #[arg(long)]
    pub input: PathBuf,
    /// matrixmarket-array, matrixmarket-coordinate or csv; detected when omitted.
    #[arg(long)]
    pub format: Option<MatrixFormat>,
}

#[derive(Debug, Args)]
pub struct SolverArgs {
    /// Primal, dual and gap tolerance.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, default_value_t = 50_000)]
    pub max_iters: usize,
    /// Splitting penalty.
    #[arg(long, default_value_t = 1.0)]
    pub penalty: f64,
    /// Support cutoff relative to the largest entry of X.
    #[arg(long, default_value_t = 1e-6)]
    pub support_tol: f64,
}

impl SolverArgs {
    fn config(&self, theta: f64) -> SolverConfig {
        SolverConfig::new(theta)
            .with_tolerance(self.tol)
            .with_max_iters(self.max_iters)
            .with_penalty(self.penalty)
            .with_support_tol(self.support_tol)
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long)]
    pub theta: f64,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Args)]
pub struct ThresholdArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Block rows for theta_B, comma separated, 1-based.
    #[arg(long, value_delimiter = ',', requires = "block_cols")]
    pub block_rows: Vec<usize>,
    #[arg(long, value_delimiter = ',', requires = "block_rows")]
    pub block_cols: Vec<usize>,
}

#[derive(Debug, Args)]
pub struct PlantArgs {
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub n: usize,
    /// Planted block height.
    #[arg(long = "M")]
    pub big_m: usize,
    /// Planted block width.
    #[arg(long = "N")]
    pub big_n: usize,
    #[arg(long, default_value_t = 1.0)]
    pub sigma0: f64,
    #[arg(long, default_value_t = 0.0)]
    pub c1: f64,
    #[arg(long, default_value_t = 0.0)]
    pub c2: f64,
    #[arg(long, default_value_t = 0.0)]
    pub c3: f64,
    /// uniform, bernoulli or none.
    #[arg(long, default_value = "uniform")]
    pub noise: NoiseFamily,
    /// Leave the planted block noise-free.
    #[arg(long)]
    pub no_block_noise: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Where to write the generated matrix.
    #[arg(long)]
    pub matrix: PathBuf,
    #[arg(long, default_value = "matrixmarket-array")]
    pub format: MatrixFormat,
    /// With --theta, report the parameter window for this c5.
    #[arg(long, requires = "theta")]
    pub c5: Option<f64>,
    #[arg(long, requires = "c5")]
    pub theta: Option<f64>,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// A record written by `solve`.
    #[arg(long)]
    pub solution: PathBuf,
    /// Largest residual accepted as a certificate.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct NmfArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Number of features.
    #[arg(long)]
    pub p: usize,
    /// One value, or one per round (comma separated).
    #[arg(long, value_delimiter = ',', required = true)]
    pub theta: Vec<f64>,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Args)]
pub struct BicliqueArgs {
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long = "M")]
    pub big_m: usize,
    #[arg(long = "N")]
    pub big_n: usize,
    /// Edge probability outside the biclique.
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Defaults to 1/sqrt(MN).
    #[arg(long)]
    pub theta: Option<f64>,
    /// Consecutive seeds starting at --seed.
    #[arg(long, default_value_t = 1)]
    pub trials: u64,
    #[command(flatten)]
    pub solver: SolverArgs,
}

/// Reproducibility record written next to each result file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub inputs: Vec<String>,
    pub parameters: Value,
    pub version: String,
    pub duration_seconds: f64,
}

/// A finished command: the JSON record and its manifest.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub record: Value,
    pub manifest: RunManifest,
}

fn one_based(ix: &[usize]) -> Vec<usize> {
    ix.iter().map(|i| i + 1).collect()
}

fn zero_based(ix: &[usize], name: &str) -> Result<Vec<usize>> {
    ix.iter()
        .map(|&i| {
            i.checked_sub(1)
                .ok_or_else(|| LarosError::InvalidInput(format!("{name} indices are 1-based, got 0")))
        })
        .collect()
}

fn path_str(p: &Path) -> String {
    p.display().to_string()
}

fn read_input(args: &InputArgs) -> Result<DenseMatrix> {
    read_matrix(&args.input, args.format)
}

#[derive(Serialize, Deserialize)]
struct SolveRecord {
    command: String,
    theta: f64,
    sigma: f64,
    u: Vec<f64>,
    v: Vec<f64>,
    support_rows: Vec<usize>,
    support_cols: Vec<usize>,
    objective: f64,
    dual_norm: f64,
    dual_gap: f64,
    primal_residual: f64,
    dual_residual: f64,
    iterations: usize,
    converged: bool,
    rank_one: bool,
    sigma_ratio: f64,
    non_unique: bool,
    uniqueness: UniquenessDiagnostics,
    x: DenseMatrix,
    certificate: Option<DualCertificate>,
}

fn run_solve(args: &SolveArgs) -> Result<(Value, Vec<String>, Value)> {
    let a = read_input(&args.input)?;
    let sol = solve(&a, &args.solver.config(args.theta))?;
    let certificate = if sol.converged { Some(sol.certificate(&a)?) } else { None };
    let record = SolveRecord {
        command: "solve".into(),
        theta: args.theta,
        sigma: sol.sigma,
        support_rows: one_based(&sol.support_rows),
        support_cols: one_based(&sol.support_cols),
        objective: sol.objective,
        dual_norm: sol.dual_norm,
        dual_gap: sol.dual_gap,
        primal_residual: sol.primal_residual,
        dual_residual: sol.dual_residual,
        iterations: sol.iterations,
        converged: sol.converged,
        rank_one: sol.rank_one,
        sigma_ratio: sol.sigma_ratio,
        non_unique: sol.non_unique,
        uniqueness: sol.uniqueness.clone(),
        u: sol.u,
        v: sol.v,
        x: sol.x,
        certificate,
    };
    let params = json!({
        "theta": args.theta, "tol": args.solver.tol, "max_iters": args.solver.max_iters,
        "penalty": args.solver.penalty, "support_tol": args.solver.support_tol,
    });
    Ok((to_value(&record)?, vec![path_str(&args.input.input)], params))
}

fn threshold_pairs(
    a: &DenseMatrix,
    count: usize,
    f: impl Fn(&DenseMatrix, usize, usize) -> Result<Threshold>,
) -> Result<Vec<Value>> {
    let mut out = Vec::new();
    for i in 0..count {
        for j in 0..count {
            if i == j {
                continue;
            }
            if let Threshold::Value(t) = f(a, i, j)? {
                out.push(json!({"dominant": i + 1, "dominated": j + 1, "threshold": t}));
            }
        }
    }
    Ok(out)
}

fn run_thresholds(args: &ThresholdArgs) -> Result<(Value, Vec<String>, Value)> {
    let a = read_input(&args.input)?;
    let mut record = json!({
        "command": "thresholds",
        "theta_a": theta_a(&a)?,
    });
    if !args.block_rows.is_empty() {
        let block = BlockSelector::new(
            zero_based(&args.block_rows, "block row")?,
            zero_based(&args.block_cols, "block column")?,
        )?;
        let tb = theta_b(&a, &block)?;
        record["theta_b"] = to_value(&tb)?;
        record["block_rows"] = json!(one_based(block.rows()));
        record["block_cols"] = json!(one_based(block.cols()));
    }
    if a.is_nonnegative() {
        record["row_zero"] = json!(threshold_pairs(&a, a.rows(), row_zero_threshold)?);
        record["col_zero"] = json!(threshold_pairs(&a, a.cols(), col_zero_threshold)?);
    }
    let params = json!({"block_rows": args.block_rows, "block_cols": args.block_cols});
    Ok((record, vec![path_str(&args.input.input)], params))
}

fn run_plant(args: &PlantArgs) -> Result<(Value, Vec<String>, Value)> {
    let model = PlantedModel::new(args.m, args.n, args.big_m, args.big_n, args.sigma0)
        .with_perturbation(args.c1, args.c2)
        .with_noise(args.noise, args.c3)
        .with_noise_on_block(!args.no_block_noise);
    let inst = plant_rank_one(&model, args.seed)?;
    write_matrix(&args.matrix, &inst.a, args.format)?;
    let InstanceKind::RankOne { u0, v0, .. } = &inst.kind else {
        unreachable!("plant_rank_one returns a rank-one instance")
    };
    let regime: Option<RegimeReport> = match (args.c5, args.theta) {
        (Some(c5), Some(theta)) => Some(validate_planted_regime(&model, c5, theta)),
        _ => None,
    };
    let record = json!({
        "command": "plant",
        "seed": args.seed,
        "matrix": path_str(&args.matrix),
        "format": args.format.to_string(),
        "model": to_value(&model)?,
        "truth_rows": one_based(inst.truth.rows()),
        "truth_cols": one_based(inst.truth.cols()),
        "u0": u0,
        "v0": v0,
        "regime": to_value(&regime)?,
    });
    let params = json!({"model": to_value(&model)?, "seed": args.seed, "c5": args.c5, "theta": args.theta});
    Ok((record, vec![], params))
}

fn run_certify(args: &CertifyArgs) -> Result<(Value, Vec<String>, Value)> {
    let a = read_input(&args.input)?;
    let text = std::fs::read_to_string(&args.solution)
        .map_err(|e| LarosError::Io(format!("{}: {e}", args.solution.display())))?;
    let sol: SolveRecord = serde_json::from_str(&text)
        .map_err(|e| LarosError::InvalidInput(format!("{}: {e}", args.solution.display())))?;
    let cert = sol
        .certificate
        .ok_or_else(|| LarosError::CertificateUnavailable("solution record carries no certificate".into()))?;
    if sol.x.shape() != a.shape() || cert.y.shape() != a.shape() {
        return Err(LarosError::DimensionMismatch {
            expected: format!("{:?}", a.shape()),
            found: format!("{:?}", sol.x.shape()),
        });
    }
    let report = check_optimality(&a, sol.theta, &sol.x.scale(cert.dual_norm), &cert);
    let record = json!({
        "command": "certify",
        "theta": sol.theta,
        "residuals": to_value(&report)?,
        "max_residual": report.max_residual(),
        "tolerance": args.tol,
        "certified": report.certifies(args.tol),
    });
    let params = json!({"tol": args.tol});
    Ok((record, vec![path_str(&args.input.input), path_str(&args.solution)], params))
}

fn run_nmf(args: &NmfArgs) -> Result<(Value, Vec<String>, Value)> {
    let a = read_input(&args.input)?;
    let schedule = match args.theta.as_slice() {
        [t] => ThetaSchedule::Fixed(*t),
        ts => ThetaSchedule::PerRound(ts.to_vec()),
    };
    let res = greedy_extract(&a, args.p, &schedule, &args.solver.config(args.theta[0]))?;
    let supports: Vec<Value> = res
        .supports
        .iter()
        .map(|b| json!({"rows": one_based(b.rows()), "cols": one_based(b.cols())}))
        .collect();
    let rounds: Vec<Value> = res
        .rounds
        .iter()
        .map(|r| json!({"theta": r.theta, "sigma": r.sigma, "solver_iterations": r.solver_iterations}))
        .collect();
    let record = json!({
        "command": "nmf",
        "features": res.features(),
        "short_count": res.short_count,
        "residual_norms": res.residual_norms,
        "supports": supports,
        "rounds": rounds,
        "w": to_value(&res.w)?,
        "h": to_value(&res.h)?,
    });
    let params = json!({"p": args.p, "theta": args.theta, "tol": args.solver.tol, "max_iters": args.solver.max_iters});
    Ok((record, vec![path_str(&args.input.input)], params))
}

fn run_biclique(args: &BicliqueArgs) -> Result<(Value, Vec<String>, Value)> {
    let theta = args
        .theta
        .unwrap_or(1.0 / ((args.big_m * args.big_n) as f64).sqrt());
    let cfg = args.solver.config(theta);
    let mut trials = Vec::new();
    let mut recovered_count = 0;
    for seed in args.seed..args.seed + args.trials {
        let inst = plant_biclique(args.m, args.n, args.big_m, args.big_n, args.p, seed)?;
        let sol = solve(&inst.a, &cfg)?;
        let recovered = sol.support_rows == inst.truth.rows() && sol.support_cols == inst.truth.cols();
        recovered_count += recovered as usize;
        trials.push(json!({
            "seed": seed,
            "recovered": recovered,
            "support_rows": one_based(&sol.support_rows),
            "support_cols": one_based(&sol.support_cols),
            "converged": sol.converged,
            "iterations": sol.iterations,
            "dual_gap": sol.dual_gap,
        }));
    }
    let record = json!({
        "command": "biclique",
        "theta": theta,
        "truth_rows": one_based(&(0..args.big_m).collect::<Vec<_>>()),
        "truth_cols": one_based(&(0..args.big_n).collect::<Vec<_>>()),
        "recovered": recovered_count == trials.len(),
        "recovered_count": recovered_count,
        "trials": trials,
    });
    let params = json!({
        "m": args.m, "n": args.n, "M": args.big_m, "N": args.big_n, "p": args.p,
        "seed": args.seed, "trials": args.trials, "theta": theta, "tol": args.solver.tol,
    });
    Ok((record, vec![], params))
}

fn to_value<T: Serialize>(x: &T) -> Result<Value> {
    serde_json::to_value(x).map_err(|e| LarosError::InvalidInput(e.to_string()))
}

/// Runs a parsed command without writing anything but the files it generates.
pub fn execute(cli: &Cli) -> Result<Outcome> {
    let start = Instant::now();
    let (name, (record, inputs, parameters)) = match &cli.command {
        Command::Solve(a) => ("solve", run_solve(a)?),
        Command::Thresholds(a) => ("thresholds", run_thresholds(a)?),
        Command::Plant(a) => ("plant", run_plant(a)?),
        Command::Certify(a) => ("certify", run_certify(a)?),
        Command::Nmf(a) => ("nmf", run_nmf(a)?),
        Command::Biclique(a) => ("biclique", run_biclique(a)?),
    };
    Ok(Outcome {
        record,
        manifest: RunManifest {
            command: name.into(),
            inputs,
            parameters,
            version: env!("CARGO_PKG_VERSION").into(),
            duration_seconds: start.elapsed().as_secs_f64(),
        },
    })
}

pub fn manifest_path(output: &Path) -> PathBuf {
    let mut s = output.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

fn emit(cli: &Cli, outcome: &Outcome) -> Result<()> {
    let text = serde_json::to_string_pretty(&outcome.record).map_err(|e| LarosError::InvalidInput(e.to_string()))? + "\n";
    match &cli.output {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| LarosError::Io(format!("{}: {e}", path.display())))?;
            let manifest = serde_json::to_string_pretty(&outcome.manifest)
                .map_err(|e| LarosError::InvalidInput(e.to_string()))?
                + "\n";
            let mpath = manifest_path(path);
            std::fs::write(&mpath, manifest).map_err(|e| LarosError::Io(format!("{}: {e}", mpath.display())))?;
        }
        None => print!("{text}"),
    }
    Ok(())
}

/// Parses `args` (including the program name), runs the command and writes
/// its outputs. Errors go to standard error with a nonzero status.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match execute(&cli).and_then(|o| emit(&cli, &o)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("laros: {e}");
            ExitCode::FAILURE
        }
    }
}
