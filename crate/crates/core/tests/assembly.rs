use divhdg::assembly::{assemble_aux, assemble_pressure_ops, ProblemParams};
use divhdg::fespace::poly::{Poly, VecPoly};
use divhdg::pipeline::Discretization;
use divhdg::verify::{solve_condensed_dense, to_dense};
use divhdg::{BoundaryTag, Mesh, Problem};

fn walled_square(n: usize) -> Mesh {
    let m = Mesh::unit_square(n).unwrap();
    Mesh::from_parts(m.vertices().to_vec(), m.triangles().to_vec(), |_, _| BoundaryTag::Wall).unwrap()
}

#[test]
fn aux_laplacian_stencil() {
    let mesh = Mesh::unit_square(4).unwrap();
    let params = ProblemParams::new(2, 0.5, 0.0, 0.0).unwrap();
    let aux = assemble_aux(&mesh, &params, Problem::Cavity).unwrap();
    // only the 3×3 interior vertices are free
    assert_eq!(aux.n_free_vertices, 9);
    let a = to_dense(aux.a0.csr());
    let centre = aux.free_vertex[2 * 5 + 2].unwrap();
    assert!((a[(2 * centre, 2 * centre)] - 4.0).abs() < 1e-13);
    assert!((a[(2 * centre + 1, 2 * centre + 1)] - 4.0).abs() < 1e-13);
    assert!(a[(2 * centre, 2 * centre + 1)].abs() < 1e-15);
    let row: f64 = (0..a.ncols()).map(|j| a[(2 * centre, j)]).sum();
    assert!(row.abs() < 1e-13);
}

#[test]
fn aux_free_on_outlet() {
    let mesh = Mesh::step_domain(2).unwrap();
    let params = ProblemParams::new(2, 1.0, 1.0, 0.0).unwrap();
    let aux = assemble_aux(&mesh, &params, Problem::Step).unwrap();
    let outlet_interior = mesh
        .vertices()
        .iter()
        .enumerate()
        .filter(|(_, p)| (p[0] - 4.0).abs() < 1e-12 && p[1] > 1e-12 && p[1] < 1.0 - 1e-12)
        .count();
    let interior = mesh
        .vertices()
        .iter()
        .filter(|p| p[0] > 1e-12 && p[0] < 4.0 - 1e-12 && p[1] > 1e-12 && p[1] < 1.0 - 1e-12)
        .filter(|p| !(p[0] <= 0.5 + 1e-12 && p[1] <= 0.5 + 1e-12))
        .count();
    assert_eq!(aux.n_free_vertices, interior + outlet_interior);
    let ev = to_dense(aux.a0.csr()).symmetric_eigenvalues();
    assert!(ev.min() > 0.0);
}

#[test]
fn pressure_ops_two_triangles() {
    let mesh = Mesh::unit_square(1).unwrap();
    let ops = assemble_pressure_ops(&mesh, Problem::Cavity).unwrap();
    assert_eq!(ops.m, vec![0.5, 0.5]);
    // diagonal of length √2, centroids (2/3, 1/3) and (1/3, 2/3): |F|/h_F = 3
    let n = to_dense(ops.n.csr());
    for (got, want) in n.iter().zip([3.0, -3.0, -3.0, 3.0]) {
        assert!((got - want).abs() < 1e-14);
    }
    assert!(ops.singular);
}

#[test]
fn pressure_jump_operator_nonsingular_with_outlet() {
    let mesh = Mesh::step_domain(2).unwrap();
    let ops = assemble_pressure_ops(&mesh, Problem::Step).unwrap();
    assert!(!ops.singular);
    let ev = to_dense(ops.n.csr()).symmetric_eigenvalues();
    assert!(ev.min() > 1e-8, "{}", ev.min());
}

struct Manufactured {
    u: VecPoly,
    p: Poly,
    f: VecPoly,
}

/// `u = curl ψ` with `ψ = (x(1-x)y(1-y))²`, `p = x² - 1/3`
fn manufactured(mu: f64, tau: f64) -> Manufactured {
    let x = Poly::x();
    let y = Poly::y();
    let one = Poly::constant(1.0);
    let b = &(&x * &(&one - &x)) * &(&y * &(&one - &y));
    let psi = &b * &b;
    let u = VecPoly::curl(&psi);
    let p = &(&x * &x) - &Poly::constant(1.0 / 3.0);
    let lap = |f: &Poly| &f.dx().dx() + &f.dy().dy();
    let f = VecPoly([
        &(&u.0[0].scale(tau) - &lap(&u.0[0]).scale(mu)) + &p.dx(),
        &(&u.0[1].scale(tau) - &lap(&u.0[1]).scale(mu)) + &p.dy(),
    ]);
    Manufactured { u, p, f }
}

fn errors(k: usize, n: usize, tau: f64) -> (f64, f64, f64) {
    let m = manufactured(1.0, tau);
    let params = ProblemParams::new(k, 1.0, tau, 0.0).unwrap();
    let force = |p: [f64; 2]| m.f.eval(p);
    let d = Discretization::new(Problem::Cavity, walled_square(n), params, Some(&force)).unwrap();
    let x = solve_condensed_dense(&d.cond).unwrap();
    let sol = d.cond.back_substitute(&x).unwrap();
    let s = d.sample(&sol, 2 * k + 4);
    let eu = s.velocity_l2_error(|p| m.u.eval(p));
    let ep = s.pressure_l2_error(|p| m.p.eval(p));
    let div = s.divergence.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    (eu, ep, div)
}

#[test]
fn velocity_converges_at_optimal_rate() {
    for (k, tau) in [(1, 0.0), (2, 0.0), (2, 10.0), (3, 1.0)] {
        let e: Vec<(f64, f64, f64)> = [2, 4, 8].iter().map(|&n| errors(k, n, tau)).collect();
        let rate = (e[1].0 / e[2].0).log2();
        assert!(rate >= (k + 1) as f64 - 0.3, "k={k} tau={tau}: rate {rate}, errors {e:?}");
        let prate = (e[1].1 / e[2].1).log2();
        assert!(prate >= k as f64 - 0.3, "k={k} tau={tau}: pressure rate {prate}, errors {e:?}");
        for (_, _, div) in &e {
            assert!(*div < 1e-9, "k={k}: div {div}");
        }
    }
}

#[test]
fn pressure_robust_velocity() {
    // a pure gradient force changes only the pressure
    let k = 3;
    let params = ProblemParams::new(k, 1.0, 1.0, 0.0).unwrap();
    let grad = |p: [f64; 2]| [2.0 * p[0], -1.0 + p[1]];
    let d = Discretization::new(Problem::Cavity, walled_square(4), params, Some(&grad)).unwrap();
    let x = solve_condensed_dense(&d.cond).unwrap();
    let sol = d.cond.back_substitute(&x).unwrap();
    let umax = sol.velocity.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    assert!(umax < 1e-10, "{umax}");
    let s = d.sample(&sol, 8);
    let ep = s.pressure_l2_error(|p| p[0] * p[0] - p[1] + 0.5 * p[1] * p[1]);
    assert!(ep < 1e-10, "{ep}");
}
