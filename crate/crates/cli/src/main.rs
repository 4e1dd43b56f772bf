use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, ValueEnum};

use divhdg::experiment::{run_grid, threads_from_env, to_csv, to_markdown, ExperimentGrid};
use divhdg::precond::{PrecondOptions, SchurMode, SmootherKind};
use divhdg::verify::{run_verification, Level};
use divhdg::Problem;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Md,
}

/// Iteration counts of preconditioned MINRES for the condensed HDG
/// discretization of generalized Stokes and linear elasticity.
#[derive(Debug, Parser)]
#[command(name = "divhdg", version)]
struct Args {
    /// cavity, step, elast-steady or elast-unsteady
    #[arg(long, required_unless_present = "verify")]
    problem: Option<Problem>,

    /// polynomial degree (repeatable)
    #[arg(long, value_delimiter = ',', default_value = "2")]
    k: Vec<usize>,

    /// cells per unit length (repeatable)
    #[arg(long = "inv-h", value_delimiter = ',', default_value = "8")]
    inv_h: Vec<usize>,

    #[arg(long, value_delimiter = ',', default_value = "1")]
    mu: Vec<f64>,

    #[arg(long, value_delimiter = ',', default_value = "0")]
    tau: Vec<f64>,

    /// 1/λ; 0 is the incompressible limit (repeatable)
    #[arg(long = "inv-lambda", value_delimiter = ',', conflicts_with = "lambda")]
    inv_lambda: Vec<f64>,

    /// λ itself, `inf` allowed (repeatable)
    #[arg(long, value_delimiter = ',')]
    lambda: Vec<f64>,

    /// interior penalty parameter
    #[arg(long, default_value_t = divhdg::assembly::DEFAULT_ALPHA)]
    alpha: f64,

    #[arg(long, default_value_t = 1e-8)]
    tol: f64,

    #[arg(long, default_value_t = 1000)]
    maxit: usize,

    /// seed of the random initial guess
    #[arg(long, default_value_t = 0)]
    seed: u64,

    #[arg(long, value_enum, default_value = "csv")]
    format: Format,

    /// write the table here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,

    /// run the dense verification suite instead of a sweep
    #[arg(long, value_name = "small|full")]
    verify: Option<Level>,

    #[arg(long = "schur-mode", default_value = "exact", value_name = "exact|approx")]
    schur_mode: SchurMode,

    #[arg(long, default_value = "patch-sgs", value_name = "patch-sgs|jacobi")]
    smoother: SmootherKind,

    /// write 0 in the timing columns so that reruns are byte-identical
    #[arg(long)]
    no_timings: bool,

    /// allow meshes finer than 1/h = 64 (k ≤ 2) or 1/h = 32 (k ≥ 3)
    #[arg(long)]
    large: bool,
}

fn verify(level: Level) -> Result<ExitCode> {
    let checks = run_verification(level)?;
    for c in &checks {
        println!("{c}");
    }
    let failed = checks.iter().filter(|c| !c.passed()).count();
    println!("{} checks, {} failed", checks.len(), failed);
    Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn grid(args: &Args, problem: Problem) -> Result<ExperimentGrid> {
    let inv_lambdas = if !args.lambda.is_empty() {
        args.lambda
            .iter()
            .map(|&l| if l > 0.0 { Ok(1.0 / l) } else { bail!("lambda must be positive, got {l}") })
            .collect::<Result<_>>()?
    } else if args.inv_lambda.is_empty() {
        vec![0.0]
    } else {
        args.inv_lambda.clone()
    };
    if !args.large {
        for &k in &args.k {
            let cap = if k <= 2 { 64 } else { 32 };
            if let Some(h) = args.inv_h.iter().find(|&&h| h > cap) {
                bail!("1/h = {h} exceeds the default cap {cap} for k = {k}; pass --large to run it");
            }
        }
    }
    let mut g = ExperimentGrid::new(problem);
    g.ks = args.k.clone();
    g.inv_hs = args.inv_h.clone();
    g.mus = args.mu.clone();
    g.taus = args.tau.clone();
    g.inv_lambdas = inv_lambdas;
    g.alpha = args.alpha;
    g.tol = args.tol;
    g.maxit = args.maxit;
    g.seed = args.seed;
    g.precond = PrecondOptions::new(args.smoother, args.schur_mode);
    g.validate()?;
    Ok(g)
}

fn run(args: Args) -> Result<ExitCode> {
    if let Some(level) = args.verify {
        return verify(level);
    }
    let problem = args.problem.context("--problem is required")?;
    let g = grid(&args, problem)?;
    let rows = run_grid(&g, threads_from_env())?;
    for r in &rows {
        if let Some(e) = &r.error {
            eprintln!("{} k={} 1/h={} tau={} inv_lambda={}: {e}", r.problem, r.k, r.inv_h, r.tau, r.inv_lambda);
        }
    }
    let text = match args.format {
        Format::Csv => to_csv(&rows, !args.no_timings),
        Format::Md => to_markdown(&rows),
    };
    match &args.out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
