//! Parameter sweeps: build, precondition and solve each configuration and
//! collect one report row per run.

use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;

use crate::assembly::{ProblemParams, DEFAULT_ALPHA};
use crate::error::{Error, Result};
use crate::krylov::{condensed_start, minres, operator_condensed, MinresOptions, MinresResult};
use crate::pipeline::Discretization;
use crate::precond::{BlockPrecond, PrecondOptions, SchurMode, SmootherKind};
use crate::problem::Problem;

pub const CSV_HEADER: &str =
    "problem,dim,k,inv_h,mu,tau,inv_lambda,alpha,seed,iters,converged,final_relres,setup_ms,solve_ms";

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentGrid {
    pub problem: Problem,
    pub ks: Vec<usize>,
    pub inv_hs: Vec<usize>,
    pub mus: Vec<f64>,
    pub taus: Vec<f64>,
    pub inv_lambdas: Vec<f64>,
    pub alpha: f64,
    pub tol: f64,
    pub maxit: usize,
    pub seed: u64,
    pub precond: PrecondOptions,
}

impl ExperimentGrid {
    pub fn new(problem: Problem) -> Self {
        Self {
            problem,
            ks: vec![2],
            inv_hs: vec![8],
            mus: vec![1.0],
            taus: vec![0.0],
            inv_lambdas: vec![0.0],
            alpha: DEFAULT_ALPHA,
            tol: 1e-8,
            maxit: 1000,
            seed: 0,
            precond: PrecondOptions::default(),
        }
    }

    /// Configurations in output order: k, 1/h, μ, τ, inv_λ (last varies
    /// fastest).
    pub fn points(&self) -> Vec<RunConfig> {
        let mut out = Vec::new();
        for &k in &self.ks {
            for &inv_h in &self.inv_hs {
                for &mu in &self.mus {
                    for &tau in &self.taus {
                        for &inv_lambda in &self.inv_lambdas {
                            out.push(RunConfig {
                                problem: self.problem,
                                inv_h,
                                params: ProblemParams { k, mu, tau, inv_lambda, alpha: self.alpha },
                                opts: MinresOptions { tol: self.tol, maxit: self.maxit, seed: self.seed },
                                precond: self.precond,
                            });
                        }
                    }
                }
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        for p in self.points() {
            p.params.validated()?;
            p.problem.mesh(p.inv_h)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    pub problem: Problem,
    pub inv_h: usize,
    pub params: ProblemParams,
    pub opts: MinresOptions,
    pub precond: PrecondOptions,
}

/// One row of the output table.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub problem: Problem,
    pub dim: usize,
    pub k: usize,
    pub inv_h: usize,
    pub mu: f64,
    pub tau: f64,
    pub inv_lambda: f64,
    pub alpha: f64,
    pub seed: u64,
    pub iters: usize,
    pub converged: bool,
    pub final_relres: f64,
    pub setup_ms: f64,
    pub solve_ms: f64,
    /// relative preconditioned residual after each iteration
    pub history: Vec<f64>,
    /// set when the run failed before or during the solve
    pub error: Option<String>,
}

impl SolveReport {
    fn blank(c: &RunConfig) -> Self {
        Self {
            problem: c.problem,
            dim: 2,
            k: c.params.k,
            inv_h: c.inv_h,
            mu: c.params.mu,
            tau: c.params.tau,
            inv_lambda: c.params.inv_lambda,
            alpha: c.params.alpha,
            seed: c.opts.seed,
            iters: 0,
            converged: false,
            final_relres: f64::NAN,
            setup_ms: 0.0,
            solve_ms: 0.0,
            history: Vec::new(),
            error: None,
        }
    }
}

/// Setup and solve of one configuration; returns the report and the
/// MINRES iterate.
pub fn run_case(c: &RunConfig) -> Result<(SolveReport, MinresResult)> {
    let t0 = Instant::now();
    let d = Discretization::benchmark(c.problem, c.inv_h, c.params)?;
    let pc = BlockPrecond::new(&d, c.precond)?;
    let setup = t0.elapsed();
    let t1 = Instant::now();
    let (b, x0) = condensed_start(&d.cond, c.opts.seed);
    let res = minres(operator_condensed(&d.cond), |r| pc.apply(r), &b, x0, &c.opts)?;
    let solve = t1.elapsed();
    let mut rep = SolveReport::blank(c);
    rep.iters = res.iterations;
    rep.converged = res.converged;
    rep.final_relres = res.final_relres();
    rep.setup_ms = setup.as_secs_f64() * 1e3;
    rep.solve_ms = solve.as_secs_f64() * 1e3;
    rep.history = res.history.clone();
    Ok((rep, res))
}

/// Runs a single configuration; failures are recorded in the row.
pub fn run_point(c: &RunConfig) -> SolveReport {
    match run_case(c) {
        Ok((rep, _)) => rep,
        Err(e) => {
            let mut rep = SolveReport::blank(c);
            rep.error = Some(e.to_string());
            rep
        }
    }
}

/// Runs every grid point, in parallel over at most `threads` workers (all
/// cores when `None`); rows come back in grid order.
pub fn run_grid(grid: &ExperimentGrid, threads: Option<usize>) -> Result<Vec<SolveReport>> {
    let points = grid.points();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        builder = builder.num_threads(t.max(1));
    }
    let pool = builder.build().map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok(pool.install(|| points.par_iter().map(run_point).collect()))
}

/// Worker cap from `HDG_THREADS`, if set to a positive integer.
pub fn threads_from_env() -> Option<usize> {
    std::env::var("HDG_THREADS").ok().and_then(|v| v.trim().parse().ok()).filter(|n: &usize| *n > 0)
}

/// Shortest representation that parses back to the same value.
fn num(x: f64) -> String {
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    format!("{x:?}")
}

/// CSV with the fixed header; timing columns are written as 0 when
/// `timings` is false so that reruns are byte-identical.
pub fn to_csv(rows: &[SolveReport], timings: bool) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in rows {
        let (su, so) = if timings { (r.setup_ms, r.solve_ms) } else { (0.0, 0.0) };
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.problem,
            r.dim,
            r.k,
            r.inv_h,
            num(r.mu),
            num(r.tau),
            num(r.inv_lambda),
            num(r.alpha),
            r.seed,
            r.iters,
            r.converged,
            num(r.final_relres),
            num(su),
            num(so)
        );
    }
    s
}

/// Parses CSV produced by [`to_csv`]; histories and errors are not stored.
pub fn parse_csv(text: &str) -> Result<Vec<SolveReport>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == CSV_HEADER => {}
        _ => return Err(Error::Format("missing or unexpected CSV header".into())),
    }
    let bad = |what: &str, line: usize| Error::Format(format!("line {}: bad {what}", line + 2));
    lines
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            let f: Vec<&str> = l.split(',').collect();
            if f.len() != 14 {
                return Err(Error::Format(format!("line {}: expected 14 fields, got {}", i + 2, f.len())));
            }
            let float = |j: usize, what: &str| f[j].parse::<f64>().map_err(|_| bad(what, i));
            let int = |j: usize, what: &str| f[j].parse::<usize>().map_err(|_| bad(what, i));
            Ok(SolveReport {
                problem: f[0].parse()?,
                dim: int(1, "dim")?,
                k: int(2, "k")?,
                inv_h: int(3, "inv_h")?,
                mu: float(4, "mu")?,
                tau: float(5, "tau")?,
                inv_lambda: float(6, "inv_lambda")?,
                alpha: float(7, "alpha")?,
                seed: f[8].parse().map_err(|_| bad("seed", i))?,
                iters: int(9, "iters")?,
                converged: f[10].parse().map_err(|_| bad("converged", i))?,
                final_relres: float(11, "final_relres")?,
                setup_ms: float(12, "setup_ms")?,
                solve_ms: float(13, "solve_ms")?,
                history: Vec::new(),
                error: None,
            })
        })
        .collect()
}

/// Markdown tables of iteration counts, one per (k, μ): rows are 1/h,
/// columns the (τ, inv_λ) combinations. Non-converged runs are marked
/// with `*`, failed runs with `-`.
pub fn to_markdown(rows: &[SolveReport]) -> String {
    let mut groups: Vec<(usize, f64)> = Vec::new();
    for r in rows {
        if !groups.iter().any(|g| g.0 == r.k && g.1 == r.mu) {
            groups.push((r.k, r.mu));
        }
    }
    let mut s = String::new();
    for (gi, &(k, mu)) in groups.iter().enumerate() {
        let sel: Vec<&SolveReport> = rows.iter().filter(|r| r.k == k && r.mu == mu).collect();
        let mut cols: Vec<(f64, f64)> = Vec::new();
        let mut hs: Vec<usize> = Vec::new();
        for r in &sel {
            if !cols.contains(&(r.tau, r.inv_lambda)) {
                cols.push((r.tau, r.inv_lambda));
            }
            if !hs.contains(&r.inv_h) {
                hs.push(r.inv_h);
            }
        }
        let vary_tau = cols.iter().any(|c| c.0 != cols[0].0);
        let vary_il = cols.iter().any(|c| c.1 != cols[0].1);
        let label = |c: &(f64, f64)| match (vary_tau, vary_il) {
            (true, false) => format!("τ={}", num(c.0)),
            (false, true) => format!("inv_λ={}", num(c.1)),
            (false, false) => format!("τ={}, inv_λ={}", num(c.0), num(c.1)),
            (true, true) => format!("τ={}, inv_λ={}", num(c.0), num(c.1)),
        };
        if gi > 0 {
            s.push('\n');
        }
        let _ = writeln!(s, "{} k={} μ={}\n", sel[0].problem, k, num(mu));
        let _ = writeln!(s, "| 1/h | {} |", cols.iter().map(label).collect::<Vec<_>>().join(" | "));
        let _ = writeln!(s, "|---|{}", "---|".repeat(cols.len()));
        for h in &hs {
            let cells: Vec<String> = cols
                .iter()
                .map(|c| {
                    match sel.iter().find(|r| r.inv_h == *h && r.tau == c.0 && r.inv_lambda == c.1) {
                        Some(r) if r.error.is_some() => "-".to_string(),
                        Some(r) if !r.converged => format!("{}*", r.iters),
                        Some(r) => r.iters.to_string(),
                        None => String::new(),
                    }
                })
                .collect();
            let _ = writeln!(s, "| {} | {} |", h, cells.join(" | "));
        }
    }
    s
}

impl PrecondOptions {
    pub fn new(smoother: SmootherKind, schur: SchurMode) -> Self {
        Self { smoother, schur }
    }
}
