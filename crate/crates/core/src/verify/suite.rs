//! The dense verification suite: every check reports the measured constant
//! next to the bound it is held to.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::dense::{schur_condensed, schur_monolithic, solve_condensed_dense, solve_monolithic_dense, to_dense};
use super::oracles::{asp_spectrum, schur_spectrum, woodbury_roundtrip};
use crate::assembly::{assemble_pressure_ops, ProblemParams};
use crate::error::{Error, Result};
use crate::linalg::dense::{complement_basis, gen_eig_pair};
use crate::mesh::Mesh;
use crate::pipeline::Discretization;
use crate::precond::{SchurMode, SmootherKind};
use crate::problem::Problem;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    /// unit_square(2) checks plus one refinement step for the spectra
    Small,
    Full,
}

impl FromStr for Level {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "small" => Ok(Level::Small),
            "full" => Ok(Level::Full),
            _ => Err(Error::InvalidArgument(format!("unknown verification level {s:?}"))),
        }
    }
}

/// Outcome of one check. `measured <= bound` is the pass condition.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub bound: f64,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, measured: f64, bound: f64, detail: String) -> Self {
        Self { name: name.into(), measured, bound, detail }
    }

    pub fn passed(&self) -> bool {
        self.measured <= self.bound
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "ok  " } else { "FAIL" };
        write!(f, "{status} {:<28} {:>11.3e} (bound {:.3e})", self.name, self.measured, self.bound)?;
        if !self.detail.is_empty() {
            write!(f, "  {}", self.detail)?;
        }
        Ok(())
    }
}

fn disc(problem: Problem, n: usize, k: usize, tau: f64, inv_lambda: f64) -> Result<Discretization> {
    Discretization::benchmark(problem, n, ProblemParams::new(k, 1.0, tau, inv_lambda)?)
}

fn rel_diff(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
    let den: f64 = b.iter().map(|y| y * y).sum();
    (num / den).sqrt()
}

/// Condensed solve plus back-substitution against the monolithic direct
/// solve, worst relative coefficient difference.
pub fn condensation_equivalence(n: usize, ks: &[usize]) -> Result<Check> {
    let mut worst = 0.0f64;
    for &k in ks {
        for (tau, il) in [(0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0)] {
            let d = disc(Problem::Cavity, n, k, tau, il)?;
            let full = d.cond.back_substitute(&solve_condensed_dense(&d.cond)?)?;
            let mono = solve_monolithic_dense(&d.block, d.cond.mean_zero)?;
            worst = worst.max(rel_diff(&full.velocity, &mono.velocity)).max(rel_diff(&full.pressure, &mono.pressure));
        }
    }
    Ok(Check::new("condensation equivalence", worst, 1e-9, format!("cavity n={n} k={ks:?}")))
}

/// `‖S′ − S_g‖_F / ‖S′‖_F` over a (τ, inv_λ) grid.
pub fn schur_invariance(n: usize, ks: &[usize]) -> Result<Check> {
    let mut worst = 0.0f64;
    for &k in ks {
        for tau in [0.0, 1.0, 100.0] {
            for il in [0.0, 1e-4, 1.0] {
                let d = disc(Problem::Cavity, n, k, tau, il)?;
                let s1 = schur_monolithic(&d.block)?;
                let s2 = schur_condensed(&d.cond)?;
                worst = worst.max((&s1 - &s2).norm() / s1.norm());
            }
        }
    }
    Ok(Check::new("schur invariance", worst, 1e-10, format!("cavity n={n} k={ks:?}")))
}

/// Roundtrip through the Woodbury inverse of the norm matrix, 100 random
/// vectors per point of {0, 1, 1e4} × {0, 1e-4, 1}.
pub fn woodbury_exactness(n: usize) -> Result<Check> {
    let mesh = Mesh::unit_square(n)?;
    let ops = assemble_pressure_ops(&mesh, Problem::Cavity)?;
    let mut worst = 0.0f64;
    for tau in [0.0, 1.0, 1e4] {
        for il in [0.0, 1e-4, 1.0] {
            let params = ProblemParams::new(2, 1.0, tau, il)?;
            worst = worst.max(woodbury_roundtrip(&ops, &params, 100, 0)?);
        }
    }
    Ok(Check::new("woodbury roundtrip", worst, 1e-10, format!("cavity n={n}")))
}

/// Condition numbers `κ[i][j]` for parameter point `i` on mesh `ns[j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct KappaTable {
    pub ns: Vec<usize>,
    pub points: Vec<(f64, f64)>,
    pub kappa: Vec<Vec<f64>>,
}

impl KappaTable {
    /// Largest relative increase between consecutive meshes.
    pub fn step_growth(&self) -> f64 {
        self.kappa.iter().flat_map(|row| row.windows(2).map(|w| w[1] / w[0] - 1.0)).fold(0.0, f64::max)
    }

    /// Largest relative increase from the coarsest to the finest mesh.
    pub fn total_growth(&self) -> f64 {
        self.kappa.iter().map(|row| row[row.len() - 1] / row[0] - 1.0).fold(0.0, f64::max)
    }

    /// Ratio of the largest to the smallest κ in the table.
    pub fn spread(&self) -> f64 {
        let all = self.kappa.iter().flatten();
        let max = all.clone().fold(0.0, |a: f64, b| a.max(*b));
        let min = all.fold(f64::INFINITY, |a: f64, b| a.min(*b));
        max / min
    }

    fn render(&self) -> String {
        self.points
            .iter()
            .zip(&self.kappa)
            .map(|(p, row)| {
                let ks: Vec<String> = row.iter().map(|k| format!("{k:.3}")).collect();
                format!("τ={} inv_λ={}: {}", p.0, p.1, ks.join(" → "))
            })
            .collect::<Vec<_>>()
            .join("; ")
    }
}

fn kappa_table(
    ns: &[usize],
    points: Vec<(f64, f64)>,
    kappa: impl Fn(&Discretization) -> Result<f64> + Sync,
) -> Result<KappaTable> {
    let jobs: Vec<(usize, usize)> = (0..points.len()).flat_map(|i| (0..ns.len()).map(move |j| (i, j))).collect();
    let values = jobs
        .par_iter()
        .map(|&(i, j)| kappa(&disc(Problem::Cavity, ns[j], 2, points[i].0, points[i].1)?))
        .collect::<Result<Vec<f64>>>()?;
    let kappa = values.chunks(ns.len()).map(|c| c.to_vec()).collect();
    Ok(KappaTable { ns: ns.to_vec(), points, kappa })
}

/// `κ(S̃⁻¹ S_g)` on unit_square(n), k = 2, over {0, 1, 100} × {0, 1e-4, 1}.
pub fn schur_kappa(ns: &[usize], mode: SchurMode) -> Result<KappaTable> {
    let points = [0.0, 1.0, 100.0].iter().flat_map(|&t| [0.0, 1e-4, 1.0].map(|il| (t, il))).collect();
    kappa_table(ns, points, |d| Ok(schur_spectrum(d, mode)?.kappa()))
}

/// `κ(Ã_g⁻¹ A_g)` on unit_square(n), k = 2, over {0, 100} × {0, 1}.
pub fn asp_kappa(ns: &[usize], kind: SmootherKind) -> Result<KappaTable> {
    let points = [0.0, 100.0].iter().flat_map(|&t| [0.0, 1.0].map(|il| (t, il))).collect();
    kappa_table(ns, points, |d| Ok(asp_spectrum(d, kind)?.kappa()))
}

/// Smallest generalized eigenvalue of `(Q̃ᵀ A Q̃, Q̃ᵀ B Q̃)` where `Q̃` spans
/// the complement of `orth`.
fn min_gen_eig(a: &DMatrix<f64>, b: &DMatrix<f64>, orth: &[f64]) -> Result<f64> {
    let q = complement_basis(a.nrows(), &[orth.to_vec()]);
    let ev = gen_eig_pair(&(q.transpose() * a * &q), &(q.transpose() * b * &q))?;
    Ok(ev[0])
}

/// Discrete inf-sup constant in the viscous norm,
/// `inf_p̄ sup_v (p̄, div v)² / (2μ |||v|||²) · 2μ / ‖p̄‖²` over mean-zero p̄:
/// the smallest eigenvalue of `2μ B_gᵀ A_g⁻¹ B_g` against the pressure mass
/// matrix (τ = 0, λ = ∞).
pub fn inf_sup_viscous(n: usize) -> Result<f64> {
    let d = disc(Problem::Cavity, n, 2, 0.0, 0.0)?;
    let s = schur_condensed(&d.cond)? * (2.0 * d.cond.params.mu);
    let ops = assemble_pressure_ops(&d.mesh, d.problem)?;
    let m = DMatrix::from_diagonal(&DVector::from_vec(ops.m.clone()));
    min_gen_eig(&s, &m, &ops.m)
}

/// Discrete inf-sup constant in the reaction norm,
/// `inf_p̄ sup_v (p̄, div v)² / (τ ‖v‖²) · τ / (pᵀ N p)`: the smallest
/// eigenvalue of `B̄ᵀ M_v⁻¹ B̄` against the jump matrix `N`, with `M_v` the
/// velocity mass matrix on the free BDM DOFs.
pub fn inf_sup_reaction(n: usize) -> Result<f64> {
    let r1 = disc(Problem::Cavity, n, 2, 1.0, 0.0)?.block.reduced()?;
    let d = disc(Problem::Cavity, n, 2, 0.0, 0.0)?;
    let r0 = d.block.reduced()?;
    let uh = d.block.split().uh_range();
    let bdm: Vec<usize> = (0..r0.free.len()).filter(|&i| !uh.contains(&r0.free[i])).collect();
    let mass = (to_dense(r1.a.csr()) - to_dense(r0.a.csr())).select_rows(&bdm).select_columns(&bdm);
    let npb = d.block.split().n_pb();
    let b = to_dense(&r0.b).select_rows(&bdm).columns(0, npb).into_owned();
    let x = mass.cholesky().ok_or(Error::NotSpd { row: 0, pivot: f64::NAN })?.solve(&b);
    let s = b.transpose() * x;
    let ops = assemble_pressure_ops(&d.mesh, d.problem)?;
    min_gen_eig(&s, &to_dense(ops.n.csr()), &vec![1.0; npb])
}

/// Runs every check of the given level.
pub fn run_verification(level: Level) -> Result<Vec<Check>> {
    let (schur_ns, asp_ns, wood_n, inf_sup_ns): (&[usize], &[usize], usize, (usize, usize)) = match level {
        Level::Small => (&[2, 4], &[2, 4], 2, (2, 4)),
        Level::Full => (&[2, 4, 8], &[4, 8], 4, (4, 8)),
    };
    let mut checks = vec![
        condensation_equivalence(2, &[2, 3])?,
        schur_invariance(2, &[2, 3])?,
        woodbury_exactness(wood_n)?,
    ];
    let s = schur_kappa(schur_ns, SchurMode::Exact)?;
    checks.push(Check::new("schur κ growth per step", s.step_growth(), 0.25, s.render()));
    checks.push(Check::new("schur κ spread", s.spread(), 10.0, format!("coarse-to-fine growth {:.3}", s.total_growth())));
    let a = asp_kappa(asp_ns, SmootherKind::PatchSgs)?;
    checks.push(Check::new("asp κ growth", a.step_growth(), 0.25, a.render()));
    let (c, f) = inf_sup_ns;
    let pairs: Vec<(f64, f64)> = [inf_sup_viscous, inf_sup_reaction]
        .par_iter()
        .map(|g| Ok((g(c)?, g(f)?)))
        .collect::<Result<_>>()?;
    for (name, (bc, bf)) in ["inf-sup viscous", "inf-sup reaction"].iter().zip(pairs) {
        checks.push(Check::new(
            format!("{name} decrease"),
            1.0 - bf / bc,
            0.2,
            format!("n={c}: {bc:.4} → n={f}: {bf:.4}"),
        ));
    }
    Ok(checks)
}
