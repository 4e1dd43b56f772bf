//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

use std::time::{Duration, Instant};

use divhdg::experiment::{run_case, run_grid, ExperimentGrid, SolveReport};
use divhdg::fespace::{build_reference_bdm, build_spaces, map_piola, ElementTables};
use divhdg::precond::{SchurMode, SmootherKind};
use divhdg::verify::suite::{
    asp_kappa, condensation_equivalence, schur_invariance, schur_kappa, woodbury_exactness,
};
use divhdg::{Mesh, Problem};
use nalgebra::DMatrix;

struct Outcome {
    pass: bool,
    summary: String,
}

fn outcome(pass: bool, summary: String) -> Outcome {
    Outcome { pass, summary }
}

fn run(id: usize, title: &str, budget: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let t = Instant::now();
    let o = f();
    let elapsed = t.elapsed();
    let in_time = elapsed <= budget;
    let pass = o.pass && in_time;
    let time = format!("{:.1} s of {} s", elapsed.as_secs_f64(), budget.as_secs());
    let time = if in_time { time } else { format!("{time}, over budget") };
    println!("{} {id:>2}. {title}: {} ({time})", if pass { "PASS" } else { "FAIL" }, o.summary);
    pass
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

fn table1_grid() -> ExperimentGrid {
    let mut g = ExperimentGrid::new(Problem::Cavity);
    g.inv_hs = vec![8, 16, 32, 64];
    g.taus = vec![0.0, 1.0, 100.0];
    g.inv_lambdas = vec![0.0];
    g
}

fn table3_grid() -> ExperimentGrid {
    let mut g = ExperimentGrid::new(Problem::ElastSteady);
    g.inv_hs = vec![8, 16, 32];
    g.inv_lambdas = vec![1e-4, 1e-1, 1.0];
    g
}

fn table4_grid() -> ExperimentGrid {
    let mut g = ExperimentGrid::new(Problem::ElastUnsteady);
    g.inv_hs = vec![32];
    g.taus = vec![10.0, 1e2, 1e3, 1e4];
    g.inv_lambdas = vec![1e-4, 1e-1, 1.0, 10.0];
    g
}

/// Reference counts by 1/h (rows) and τ (columns).
const TABLE1: [[usize; 3]; 4] = [[57, 60, 54], [58, 60, 56], [57, 61, 57], [58, 61, 58]];
/// Reference counts by 1/h (rows) and inv_λ (columns).
const TABLE3: [[usize; 3]; 3] = [[89, 57, 38], [90, 57, 38], [61, 59, 38]];
/// Reference counts at 1/h = 32 by τ (rows) and λ column (columns).
const TABLE4: [[usize; 4]; 4] = [[60, 53, 36, 29], [59, 52, 38, 28], [57, 51, 35, 27], [50, 42, 30, 23]];

fn all_converged(rows: &[SolveReport]) -> bool {
    rows.iter().all(|r| r.error.is_none() && r.converged)
}

fn column(rows: &[SolveReport], pick: impl Fn(&SolveReport) -> bool) -> Vec<usize> {
    rows.iter().filter(|r| pick(r)).map(|r| r.iters).collect()
}

fn flatness(col: &[usize]) -> f64 {
    *col.iter().max().unwrap() as f64 / *col.iter().min().unwrap() as f64
}

fn within_band(col: &[usize], reference: impl Iterator<Item = usize>) -> bool {
    col.iter().zip(reference).all(|(&got, r)| got as f64 <= 1.5 * r as f64)
}

fn fmt_col(col: &[usize]) -> String {
    col.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
}

fn criterion1() -> Outcome {
    let c = condensation_equivalence(2, &[2, 3]).unwrap();
    outcome(c.passed(), format!("max relative difference {:.2e} (bound {:.0e})", c.measured, c.bound))
}

fn criterion2() -> Outcome {
    let c = schur_invariance(2, &[2, 3]).unwrap();
    outcome(c.passed(), format!("max relative Frobenius difference {:.2e} (bound {:.0e})", c.measured, c.bound))
}

fn criterion3() -> Outcome {
    let c = woodbury_exactness(4).unwrap();
    outcome(c.passed(), format!("worst roundtrip error {:.2e} over 9 points x 100 vectors (bound {:.0e})", c.measured, c.bound))
}

fn criterion4() -> Outcome {
    let t = schur_kappa(&[2, 4, 8], SchurMode::Exact).unwrap();
    let (step, total, spread) = (t.step_growth(), t.total_growth(), t.spread());
    let max = t.kappa.iter().flatten().fold(0.0f64, |a, b| a.max(*b));
    outcome(
        step <= 0.25 && spread <= 10.0,
        format!(
            "κ ≤ {max:.2}, growth per refinement ≤ {:.1}% (bound 25%; coarsest to finest {:.1}%), spread x{spread:.2} (bound x10)",
            100.0 * step,
            100.0 * total
        ),
    )
}

fn criterion5() -> Outcome {
    let t = asp_kappa(&[4, 8], SmootherKind::PatchSgs).unwrap();
    let g = t.step_growth();
    let max = t.kappa.iter().flatten().fold(0.0f64, |a, b| a.max(*b));
    outcome(g <= 0.25, format!("κ ≤ {max:.2}, growth n=4 → 8 ≤ {:.1}% (bound 25%)", 100.0 * g))
}

fn criterion6(rows: &[SolveReport]) -> Outcome {
    let mut pass = all_converged(rows);
    let mut parts = Vec::new();
    for (j, tau) in [0.0, 1.0, 100.0].into_iter().enumerate() {
        let col = column(rows, |r| r.tau == tau);
        let flat = flatness(&col);
        let band = within_band(&col, TABLE1.iter().map(|r| r[j]));
        pass &= flat <= 1.15 && band;
        parts.push(format!("τ={tau}: {} max/min {flat:.3}{}{}", fmt_col(&col), if flat <= 1.15 { "" } else { " > 1.15" }, if band { "" } else { " outside x1.5" }));
    }
    outcome(pass, parts.join("; "))
}

fn criterion7(rows: &[SolveReport]) -> Outcome {
    let mut pass = all_converged(rows);
    let mut parts = Vec::new();
    for (j, il) in [1e-4, 1e-1, 1.0].into_iter().enumerate() {
        let col = column(rows, |r| r.inv_lambda == il);
        let flat = flatness(&col);
        let band = within_band(&col, TABLE3.iter().map(|r| r[j]));
        pass &= flat <= 1.2 && band;
        parts.push(format!("inv_λ={il}: {} max/min {flat:.3}{}", fmt_col(&col), if band { "" } else { " outside x1.5" }));
    }
    let monotone = [8, 16, 32].iter().all(|&h| column(rows, |r| r.inv_h == h).windows(2).all(|w| w[1] <= w[0]));
    pass &= monotone;
    parts.push(format!("non-increasing in inv_λ: {monotone}"));
    outcome(pass, parts.join("; "))
}

fn criterion8(rows: &[SolveReport]) -> Outcome {
    let iters: Vec<usize> = rows.iter().map(|r| r.iters).collect();
    let spread = flatness(&iters);
    let band = within_band(&iters, TABLE4.iter().flatten().copied());
    let conv = all_converged(rows);
    let rows_txt: Vec<String> = iters.chunks(4).map(fmt_col).collect();
    outcome(
        conv && spread <= 3.5 && band,
        format!(
            "rows τ=1e1..1e4: [{}]; all converged {conv}, spread {spread:.2} (bound 3.5), within x1.5 {band}",
            rows_txt.join(" / ")
        ),
    )
}

/// Worst violation of the reference basis and divergence identities.
fn criterion9() -> Outcome {
    let max_abs = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut worst = 0.0f64;
    let mut independent = true;
    let mesh = Mesh::step_domain(2).unwrap();
    for k in 1..=4 {
        let b = build_reference_bdm(k).unwrap();
        let nf = b.n_facet();
        let nc = b.n_div_free_interior();
        for e in 0..3 {
            let f0 = b.facet_index(e, 0);
            worst = worst.max(max_abs(&b.normal_trace(f0, e)[1..]));
            for i in 0..=k {
                let f = b.facet_index(e, i);
                for other in (0..3).filter(|o| *o != e) {
                    worst = worst.max(max_abs(&b.normal_trace(f, other)));
                }
                if i > 0 {
                    worst = worst.max(b.divergences()[f].terms().fold(0.0, |m, t| m.max(t.2.abs())));
                }
            }
        }
        for l in 0..b.n_interior() {
            let f = nf + l;
            for e in 0..3 {
                worst = worst.max(max_abs(&b.normal_trace(f, e)));
            }
            let div = &b.divergences()[f];
            let err = if l < nc { div.clone() } else { div - &b.pressure_modes()[1 + l - nc] };
            worst = worst.max(err.terms().fold(0.0, |m, t| m.max(t.2.abs())));
        }
        let fs = b.functions();
        let g = DMatrix::from_fn(fs.len(), fs.len(), |i, j| fs[i].dot(&fs[j]).integrate_ref());
        let ev = g.symmetric_eigenvalues();
        independent &= ev.min() > 1e-10 * ev.max();
        // on physical elements: facet functions have constant divergence,
        // interior functions mean-zero divergence
        let (_, dofs) = build_spaces(&mesh, k).unwrap();
        let tables = ElementTables::new(&b, 2 * k + 2);
        for t in 0..mesh.n_triangles() {
            let geom = dofs.geometry(t);
            let ev = map_piola(&tables.volume, geom, geom.det.abs());
            for f in 0..b.n_functions() {
                let d = &ev.div[f];
                if f < nf {
                    worst = worst.max(d.iter().fold(0.0, |m, x| m.max((x - d[0]).abs() / (1.0 + d[0].abs()))));
                } else {
                    worst = worst.max(d.iter().zip(&ev.weights).map(|(x, w)| x * w).sum::<f64>().abs());
                }
            }
        }
    }
    outcome(worst <= 1e-11 && independent, format!("worst violation {worst:.2e} (bound 1e-11), bases independent {independent}, k=1..4"))
}

fn criterion10(tables: &[(&ExperimentGrid, &[SolveReport])]) -> Outcome {
    let mut identical = true;
    for (grid, _) in tables {
        let cfg = grid.points()[0];
        let (a, sa) = run_case(&cfg).unwrap();
        let (b, sb) = run_case(&cfg).unwrap();
        let bits = |h: &[f64]| h.iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        identical &= a.iters == b.iters && bits(&a.history) == bits(&b.history) && sa.x == sb.x;
    }
    let rows: Vec<&SolveReport> = tables.iter().flat_map(|(_, r)| r.iter()).collect();
    let monotone = rows.iter().all(|r| r.history.windows(2).all(|w| w[1] <= w[0]));
    let converged = rows.iter().all(|r| r.error.is_none() && r.converged && r.final_relres <= 1e-8 && r.iters <= 1000);
    let max_iters = rows.iter().map(|r| r.iters).max().unwrap();
    outcome(
        identical && monotone && converged,
        format!(
            "reruns bit-identical {identical}, histories monotone {monotone}, {} runs converged to 1e-8 {converged} (max {max_iters} iterations)",
            rows.len()
        ),
    )
}

fn main() {
    let mut results = vec![
        run(1, "condensation equivalence", secs(10), criterion1),
        run(2, "schur complement invariance", secs(30), criterion2),
        run(3, "woodbury exactness", secs(10), criterion3),
        run(4, "schur spectral equivalence", secs(300), criterion4),
        run(5, "auxiliary space equivalence", secs(300), criterion5),
    ];
    let (g1, g3, g4) = (table1_grid(), table3_grid(), table4_grid());
    let mut r1 = Vec::new();
    results.push(run(6, "lid-driven cavity iterations", secs(900), || {
        r1 = run_grid(&g1, None).unwrap();
        criterion6(&r1)
    }));
    let mut r3 = Vec::new();
    results.push(run(7, "steady elasticity iterations", secs(300), || {
        r3 = run_grid(&g3, None).unwrap();
        criterion7(&r3)
    }));
    let mut r4 = Vec::new();
    results.push(run(8, "unsteady elasticity robustness", secs(300), || {
        r4 = run_grid(&g4, None).unwrap();
        criterion8(&r4)
    }));
    results.push(run(9, "basis and divergence identities", secs(5), criterion9));
    results.push(run(10, "minres determinism and monotonicity", secs(120), || {
        criterion10(&[(&g1, &r1), (&g3, &r3), (&g4, &r4)])
    }));
    let failed: Vec<usize> = results.iter().enumerate().filter(|(_, p)| !**p).map(|(i, _)| i + 1).collect();
    if failed.is_empty() {
        println!("acceptance: all 10 criteria pass");
    } else {
        println!("acceptance: failing criteria {failed:?}");
        std::process::exit(1);
    }
}
