//! Fixtures shared by the benchmarks.

use divhdg::assembly::ProblemParams;
use divhdg::experiment::RunConfig;
use divhdg::krylov::MinresOptions;
use divhdg::pipeline::Discretization;
use divhdg::Problem;

/// k = 2, μ = 1 parameters.
pub fn params(tau: f64, inv_lambda: f64) -> ProblemParams {
    ProblemParams::new(2, 1.0, tau, inv_lambda).expect("valid parameters")
}

pub fn discretization(problem: Problem, inv_h: usize, tau: f64, inv_lambda: f64) -> Discretization {
    Discretization::benchmark(problem, inv_h, params(tau, inv_lambda)).expect("benchmark mesh")
}

pub fn run_config(problem: Problem, inv_h: usize, tau: f64, inv_lambda: f64) -> RunConfig {
    RunConfig {
        problem,
        inv_h,
        params: params(tau, inv_lambda),
        opts: MinresOptions::default(),
        precond: Default::default(),
    }
}
