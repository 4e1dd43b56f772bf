use divhdg::assembly::ProblemParams;
use divhdg::pipeline::Discretization;
use divhdg::verify::{schur_condensed, schur_monolithic, solve_condensed_dense, solve_monolithic_dense, to_dense};
use divhdg::Problem;
use nalgebra::{DMatrix, DVector};

fn disc(problem: Problem, n: usize, k: usize, tau: f64, inv_lambda: f64) -> Discretization {
    let params = ProblemParams::new(k, 1.0, tau, inv_lambda).unwrap();
    Discretization::benchmark(problem, n, params).unwrap()
}

fn rel_diff(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let den: f64 = b.iter().map(|y| y * y).sum::<f64>().sqrt();
    num / den
}

#[test]
fn element_blocks_are_symmetric_with_orthogonal_pressure_coupling() {
    let d = disc(Problem::Cavity, 2, 3, 1.0, 1.0);
    let k = 3;
    let ng = 3 * (k + 1) + 3 * k;
    let nf = 3 * (k + 1);
    for blk in &d.block.elements {
        assert_eq!(blk.a.clone() - blk.a.transpose(), DMatrix::zeros(blk.a.nrows(), blk.a.ncols()));
        // b(p̄, u^o) = 0 and b(p^o, u∂) = 0
        for i in ng..blk.a.nrows() {
            assert!(blk.b[(i, 0)].abs() < 1e-14);
        }
        for i in 0..nf {
            for m in 1..blk.b.ncols() {
                assert!(blk.b[(i, m)].abs() < 1e-13, "{}", blk.b[(i, m)]);
            }
        }
        // û does not enter b
        for i in nf..ng {
            assert!(blk.b.row(i).iter().all(|x| *x == 0.0));
        }
    }
}

#[test]
fn condensed_stiffness_is_spd() {
    for k in 1..=4 {
        let d = disc(Problem::Cavity, 2, k, 0.0, 0.0);
        let a = to_dense(d.cond.a_g.csr());
        let ev = a.symmetric_eigenvalues();
        assert!(ev.min() > 0.0, "k={k}: {}", ev.min());
    }
}

#[test]
fn condensed_matches_monolithic() {
    for problem in [Problem::Cavity, Problem::Step] {
        for k in [1, 2, 3] {
            for (tau, inv_lambda) in [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)] {
                let d = disc(problem, 2, k, tau, inv_lambda);
                let x = solve_condensed_dense(&d.cond).unwrap();
                let full = d.cond.back_substitute(&x).unwrap();
                let mono = solve_monolithic_dense(&d.block, d.cond.mean_zero).unwrap();
                let dv = rel_diff(&full.velocity, &mono.velocity);
                let dp = rel_diff(&full.pressure, &mono.pressure);
                assert!(dv < 1e-9 && dp < 1e-9, "{problem} k={k} tau={tau} il={inv_lambda}: {dv} {dp}");
            }
        }
    }
}

#[test]
fn back_substitution_satisfies_uncondensed_equations() {
    let d = disc(Problem::Cavity, 2, 2, 1.0, 1.0);
    let x = solve_condensed_dense(&d.cond).unwrap();
    let full = d.cond.back_substitute(&x).unwrap();
    let red = d.block.reduced().unwrap();
    let u: Vec<f64> = red.free.iter().map(|&i| full.velocity[i]).collect();
    let mut r = red.a.mul_vec(&u).unwrap();
    let bp = red.b.mul_vec(&full.pressure).unwrap();
    for i in 0..r.len() {
        r[i] += bp[i] - red.f[i];
    }
    let fnorm = red.f.iter().map(|v| v * v).sum::<f64>().sqrt();
    assert!(r.iter().map(|v| v * v).sum::<f64>().sqrt() < 1e-9 * fnorm);
}

#[test]
fn back_substitution_is_affine() {
    let d = disc(Problem::Cavity, 2, 3, 1.0, 1.0);
    let n = d.cond.n();
    let x: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
    let y: Vec<f64> = (0..n).map(|i| (i as f64 * 1.13).cos()).collect();
    let xy: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
    let s = |v: &[f64]| d.cond.back_substitute(v).unwrap();
    let (sx, sy, sxy, s0) = (s(&x), s(&y), s(&xy), s(&vec![0.0; n]));
    for i in 0..sx.velocity.len() {
        assert!((sxy.velocity[i] + s0.velocity[i] - sx.velocity[i] - sy.velocity[i]).abs() < 1e-11);
    }
    for i in 0..sx.pressure.len() {
        assert!((sxy.pressure[i] + s0.pressure[i] - sx.pressure[i] - sy.pressure[i]).abs() < 1e-11);
    }
}

#[test]
fn pressure_modes_follow_divergence_for_finite_lambda() {
    let inv_lambda = 0.5;
    let d = disc(Problem::Cavity, 2, 3, 1.0, inv_lambda);
    let x = solve_condensed_dense(&d.cond).unwrap();
    let full = d.cond.back_substitute(&x).unwrap();
    let split = *d.cond.split();
    let dofs = &d.block.dofs;
    // (p^o + λ div u, q) = 0 for every local pressure mode: with the
    // orthonormal modes the element mass is |det J| times identity
    for t in 0..split.n_elements {
        let blk = &d.block.elements[t];
        let vd = dofs.element_velocity(t);
        let u = DVector::from_iterator(vd.len(), vd.iter().map(|&i| full.velocity[i]));
        let btu = blk.b.transpose() * u;
        let det = dofs.geometry(t).det.abs();
        for (m, &pi) in dofs.element_pressure(t).iter().enumerate().skip(1) {
            // b(q, u) = -(q, div u) so (q, div u) = -btu
            let resid = det * full.pressure[pi] - (1.0 / inv_lambda) * btu[m];
            assert!(resid.abs() < 1e-10, "{resid}");
        }
    }
}

#[test]
fn stokes_interior_velocity_is_locally_divergence_free() {
    let d = disc(Problem::Cavity, 2, 3, 1.0, 0.0);
    let x = solve_condensed_dense(&d.cond).unwrap();
    let full = d.cond.back_substitute(&x).unwrap();
    let dofs = &d.block.dofs;
    for t in 0..d.cond.split().n_elements {
        let blk = &d.block.elements[t];
        let vd = dofs.element_velocity(t);
        let u = DVector::from_iterator(vd.len(), vd.iter().map(|&i| full.velocity[i]));
        let btu = blk.b.transpose() * u;
        assert!(btu.rows(1, btu.len() - 1).iter().all(|v| v.abs() < 1e-10));
    }
}

/// Eliminating `p^o` first via `E = A_oo + λ (div, div)` and then `u^o`
/// gives the same condensed stiffness as the local saddle solve.
#[test]
fn local_saddle_matches_penalty_form() {
    let inv_lambda = 0.1;
    let k = 2;
    let d = disc(Problem::Cavity, 1, k, 1.0, inv_lambda);
    let ng = 3 * (k + 1) + 3 * k;
    let split = *d.cond.split();
    let nc = split.n_condensed();
    let mut a_g = DMatrix::<f64>::zeros(nc, nc);
    for (t, blk) in d.block.elements.iter().enumerate() {
        let nv = blk.a.nrows();
        let no = nv - ng;
        let det = d.block.dofs.geometry(t).det.abs();
        let b_oo = blk.b.view((ng, 1), (no, blk.b.ncols() - 1)).into_owned();
        // p^o mass is |det J| I, so D = λ B M⁻¹ Bᵀ
        let e = blk.a.view((ng, ng), (no, no)) + (b_oo.clone() * b_oo.transpose()) / (inv_lambda * det);
        let a_og = blk.a.view((ng, 0), (no, ng)).into_owned();
        let s = blk.a.view((0, 0), (ng, ng)) - a_og.transpose() * e.lu().solve(&a_og).unwrap();
        let vd = &d.block.dofs.element_velocity(t)[..ng];
        for (i, &gi) in vd.iter().enumerate() {
            for (j, &gj) in vd.iter().enumerate() {
                a_g[(gi, gj)] += s[(i, j)];
            }
        }
    }
    let free = &d.cond.free;
    let want = DMatrix::from_fn(free.len(), free.len(), |i, j| a_g[(free[i], free[j])]);
    let got = to_dense(d.cond.a_g.csr());
    assert!((&got - &want).norm() <= 1e-12 * want.norm(), "{}", (&got - &want).norm() / want.norm());
}

#[test]
fn schur_complement_invariance() {
    for k in [2, 3] {
        for tau in [0.0, 1.0, 100.0] {
            for inv_lambda in [0.0, 1e-4, 1.0] {
                let d = disc(Problem::Cavity, 2, k, tau, inv_lambda);
                let s1 = schur_monolithic(&d.block).unwrap();
                let s2 = schur_condensed(&d.cond).unwrap();
                let err = (&s1 - &s2).norm() / s1.norm();
                assert!(err <= 1e-10, "k={k} tau={tau} il={inv_lambda}: {err}");
            }
        }
    }
}

#[test]
fn monolithic_inertia() {
    let d = disc(Problem::Step, 2, 2, 1.0, 1.0);
    let mono = divhdg::condense::build_monolithic(&d.block).unwrap();
    assert_eq!(mono.matrix.clone() - mono.matrix.transpose(), DMatrix::zeros(mono.matrix.nrows(), mono.matrix.nrows()));
    let ev = mono.matrix.clone().symmetric_eigenvalues();
    let neg = ev.iter().filter(|v| **v < 0.0).count();
    assert_eq!(neg, mono.n_pressure);
}
