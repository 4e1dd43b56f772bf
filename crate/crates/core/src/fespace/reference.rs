//! Hierarchical BDM_k basis on the reference triangle.
//!
//! Reference vertices are `(0,0), (1,0), (0,1)`, identified with the element
//! vertices in ascending global order. Local edge `i` is opposite vertex `i`,
//! so its endpoints are the two other vertices in ascending order. With this
//! numbering every facet-supported function is intrinsic to its edge and the
//! Piola map yields normal-continuous fields without sign corrections.

use nalgebra::{DMatrix, DVector};

use super::poly::{Poly, VecPoly};
use crate::error::{Error, Result};
use crate::quadrature::legendre_with_derivative;

pub const REF_VERTICES: [[f64; 2]; 3] = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
/// Endpoints of local edge `i` (opposite vertex `i`), ascending.
pub const REF_EDGES: [[usize; 2]; 3] = [[1, 2], [0, 2], [0, 1]];

pub const MAX_DEGREE: usize = 4;

/// Outward unit normal of reference edge `e`.
pub fn ref_normal(e: usize) -> [f64; 2] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    [[h, h], [-1.0, 0.0], [0.0, -1.0]][e]
}

/// Length of reference edge `e`.
pub fn ref_edge_length(e: usize) -> f64 {
    if e == 0 {
        std::f64::consts::SQRT_2
    } else {
        1.0
    }
}

/// Point at parameter `s` on reference edge `e`.
pub fn ref_edge_point(e: usize, s: f64) -> [f64; 2] {
    let [a, b] = REF_EDGES[e];
    let (pa, pb) = (REF_VERTICES[a], REF_VERTICES[b]);
    [pa[0] + s * (pb[0] - pa[0]), pa[1] + s * (pb[1] - pa[1])]
}

fn barycentric(i: usize) -> Poly {
    match i {
        0 => &(&Poly::constant(1.0) - &Poly::x()) - &Poly::y(),
        1 => Poly::x(),
        _ => Poly::y(),
    }
}

/// Scaled integrated Legendre polynomial `t^n L_n(s/t)` for `n >= 2`.
fn scaled_integrated_legendre(n: usize, s: &Poly, t: &Poly) -> Poly {
    let t2 = t * t;
    let mut p = vec![Poly::constant(1.0), s.clone()];
    for m in 2..=n {
        let a = (s * &p[m - 1]).scale((2 * m - 1) as f64);
        let b = (&t2 * &p[m - 2]).scale((m - 1) as f64);
        p.push((&a - &b).scale(1.0 / m as f64));
    }
    (&p[n] - &(&t2 * &p[n - 2])).scale(1.0 / (2 * n - 1) as f64)
}

/// Legendre basis `P_j(2s - 1)`, `j < k`, for the tangential facet unknowns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FacetBasis {
    k: usize,
}

impl FacetBasis {
    pub fn new(k: usize) -> Self {
        Self { k }
    }

    pub fn dim(&self) -> usize {
        self.k
    }

    pub fn eval(&self, j: usize, s: f64) -> f64 {
        legendre_with_derivative(j, 2.0 * s - 1.0).0
    }

    /// `∫_0^1 ℓ_j(s)^2 ds`
    pub fn norm_sq(&self, j: usize) -> f64 {
        1.0 / (2 * j + 1) as f64
    }
}

/// BDM_k basis split into the four hierarchical groups, plus the matching
/// pressure modes.
#[derive(Debug, Clone)]
pub struct ReferenceBasis {
    k: usize,
    /// per local edge: RT0 function followed by `k` divergence-free bubbles
    facet: [Vec<VecPoly>; 3],
    /// divergence-free interior bubbles, then the nonzero-divergence ones
    interior: Vec<VecPoly>,
    n_div_free: usize,
    /// constant, then an L2-orthonormal basis of mean-zero `P^{k-1}`
    pressure: Vec<Poly>,
    all: Vec<VecPoly>,
    divs: Vec<Poly>,
}

/// `∫_T u·v` over the reference triangle.
fn inner(u: &VecPoly, v: &VecPoly) -> f64 {
    u.dot(v).integrate_ref()
}

fn monomials(deg: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for d in 0..=deg {
        for i in (0..=d).rev() {
            out.push((i, d - i));
        }
    }
    out
}

/// Constant followed by an orthonormal basis of `{q ∈ P^{deg} : ∫ q = 0}`.
fn pressure_modes(deg: usize) -> Vec<Poly> {
    let mut ortho: Vec<Poly> = vec![Poly::constant(2f64.sqrt())];
    for &(i, j) in monomials(deg).iter().skip(1) {
        let mut q = Poly::monomial(i, j, 1.0);
        for b in &ortho {
            let c = (&q * b).integrate_ref();
            q = &q - &b.scale(c);
        }
        let nrm = (&q * &q).integrate_ref().sqrt();
        ortho.push(q.scale(1.0 / nrm));
    }
    // monomial Gram-Schmidt loses a few digits; one Cholesky pass restores
    // orthonormality to round-off
    let n = ortho.len();
    let gram = DMatrix::from_fn(n, n, |i, j| (&ortho[i] * &ortho[j]).integrate_ref());
    let l = gram.cholesky().expect("Gram matrix of independent modes").l();
    let linv = l.try_inverse().expect("triangular factor");
    let mut basis = vec![Poly::constant(1.0)];
    for i in 1..n {
        let mut q = Poly::zero();
        for j in 0..=i {
            q = &q + &ortho[j].scale(linv[(i, j)]);
        }
        basis.push(q);
    }
    basis
}

pub fn build_reference_bdm(k: usize) -> Result<ReferenceBasis> {
    if !(1..=MAX_DEGREE).contains(&k) {
        return Err(Error::InvalidArgument(format!("polynomial degree {k} outside 1..={MAX_DEGREE}")));
    }
    let lam: Vec<Poly> = (0..3).map(barycentric).collect();

    let facet: [Vec<VecPoly>; 3] = std::array::from_fn(|e| {
        let [a, b] = REF_EDGES[e];
        let mut fs = Vec::with_capacity(k + 1);
        let whitney = VecPoly::curl(&lam[b]).mul_scalar(&lam[a]).sub(&VecPoly::curl(&lam[a]).mul_scalar(&lam[b]));
        fs.push(whitney);
        let s = &lam[b] - &lam[a];
        let t = &lam[a] + &lam[b];
        for i in 1..=k {
            fs.push(VecPoly::curl(&scaled_integrated_legendre(i + 1, &s, &t)));
        }
        fs
    });

    let bubble = &(&lam[0] * &lam[1]) * &lam[2];
    let mut interior: Vec<VecPoly> = Vec::new();
    if k >= 2 {
        for &(i, j) in &monomials(k - 2) {
            let g = &bubble * &(&lam[1].pow(i) * &lam[2].pow(j));
            interior.push(VecPoly::curl(&g));
        }
    }
    let n_div_free = interior.len();

    let pressure = pressure_modes(k - 1);
    interior.extend(divergence_bubbles(k, &lam, &pressure[1..])?);

    let mut all: Vec<VecPoly> = facet.iter().flatten().cloned().collect();
    all.extend(interior.iter().cloned());
    let divs = all.iter().map(VecPoly::div).collect();
    Ok(ReferenceBasis { k, facet, interior, n_div_free, pressure, all, divs })
}

/// Normal-trace-free fields whose divergences are exactly `targets`, each
/// L2-orthogonal to the divergence-free normal-trace-free bubbles.
///
/// The bubble space is spanned (redundantly for `k >= 3`) by the edge
/// fields `λ_a λ_b m t_e` with `m ∈ P^{k-2}` and `t_e` an integer tangent of
/// edge `e = (a, b)`; every member has exactly zero normal trace, so only
/// the combination weights carry round-off.
fn divergence_bubbles(k: usize, lam: &[Poly], targets: &[Poly]) -> Result<Vec<VecPoly>> {
    if targets.is_empty() {
        return Ok(Vec::new());
    }
    let tangents = [[-1.0, 1.0], [0.0, 1.0], [1.0, 0.0]];
    let mut span: Vec<VecPoly> = Vec::new();
    for (e, t) in tangents.iter().enumerate() {
        let [a, b] = REF_EDGES[e];
        let ab = &lam[a] * &lam[b];
        for &(i, j) in &monomials(k - 2) {
            let g = &ab * &(&lam[1].pow(i) * &lam[2].pow(j));
            span.push(VecPoly([g.scale(t[0]), g.scale(t[1])]));
        }
    }
    let n = span.len();
    let w = DMatrix::from_fn(n, n, |i, j| inner(&span[i], &span[j]));
    let g = DMatrix::from_fn(targets.len(), n, |i, j| (&span[j].div() * &targets[i]).integrate_ref());
    let wn = w.norm();
    let w_pinv = w.pseudo_inverse(1e-12 * wn).map_err(|e| Error::InvalidArgument(e.into()))?;
    let gwg = &g * &w_pinv * g.transpose();
    let gwg_inv = gwg.try_inverse().ok_or(Error::SingularLocalBlock { element: usize::MAX })?;
    let coef = &w_pinv * g.transpose() * gwg_inv;
    let combine = |c: &DMatrix<f64>, fs: &[VecPoly], j: usize| {
        let col: DVector<f64> = c.column(j).into();
        fs.iter().enumerate().fold(VecPoly::zero(), |acc, (l, b)| acc.add(&b.scale(col[l])))
    };
    let first: Vec<VecPoly> = (0..targets.len()).map(|j| combine(&coef, &span, j)).collect();
    // one refinement step: express each divergence in the target basis by
    // matching monomial coefficients (no quadrature round-off), then rescale
    let mons = monomials(k - 1);
    let coeffs = |p: &Poly| DVector::from_iterator(mons.len(), mons.iter().map(|&(i, j)| p.coefficient(i, j)));
    let q = DMatrix::from_columns(&targets.iter().map(coeffs).collect::<Vec<_>>());
    let d = DMatrix::from_columns(&first.iter().map(|f| coeffs(&f.div())).collect::<Vec<_>>());
    let r = q.svd(true, true).solve(&d, 1e-14).map_err(|e| Error::InvalidArgument(e.into()))?;
    let r_inv = r.try_inverse().ok_or(Error::SingularLocalBlock { element: usize::MAX })?;
    Ok((0..targets.len()).map(|j| combine(&r_inv, &first, j)).collect())
}

impl ReferenceBasis {
    pub fn k(&self) -> usize {
        self.k
    }

    /// `(k+1)(k+2)`
    pub fn n_functions(&self) -> usize {
        self.all.len()
    }

    /// `k + 1` functions per edge.
    pub fn n_per_edge(&self) -> usize {
        self.k + 1
    }

    pub fn n_facet(&self) -> usize {
        3 * (self.k + 1)
    }

    /// `k^2 - 1`
    pub fn n_interior(&self) -> usize {
        self.interior.len()
    }

    pub fn n_div_free_interior(&self) -> usize {
        self.n_div_free
    }

    /// Local index of function `i` of edge `e`.
    pub fn facet_index(&self, e: usize, i: usize) -> usize {
        e * (self.k + 1) + i
    }

    pub fn facet_functions(&self, e: usize) -> &[VecPoly] {
        &self.facet[e]
    }

    pub fn interior_functions(&self) -> &[VecPoly] {
        &self.interior
    }

    /// All functions: facet groups edge by edge, then interior.
    pub fn functions(&self) -> &[VecPoly] {
        &self.all
    }

    pub fn divergences(&self) -> &[Poly] {
        &self.divs
    }

    /// `[1, q_1, …]`; the `q_j` are L2-orthonormal on the reference
    /// element with zero mean, and are the divergences of the last
    /// interior functions.
    pub fn pressure_modes(&self) -> &[Poly] {
        &self.pressure
    }

    /// Number of mean-zero pressure modes `k(k+1)/2 - 1`.
    pub fn n_pressure_interior(&self) -> usize {
        self.pressure.len() - 1
    }

    /// Outward normal component of function `f` along reference edge `e`,
    /// as ascending coefficients in the edge parameter.
    pub fn normal_trace(&self, f: usize, e: usize) -> Vec<f64> {
        let [a, b] = REF_EDGES[e];
        self.all[f].dot_const(ref_normal(e)).restrict(REF_VERTICES[a], REF_VERTICES[b])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_sizes() {
        for (k, total) in [(1, 6), (2, 12), (3, 20), (4, 30)] {
            let b = build_reference_bdm(k).unwrap();
            assert_eq!(b.n_functions(), total);
            assert_eq!(b.n_div_free_interior(), k * (k - 1) / 2);
            assert_eq!(b.n_interior(), k * k - 1);
            assert_eq!(b.n_pressure_interior(), k * (k + 1) / 2 - 1);
        }
        assert!(build_reference_bdm(0).is_err());
        assert!(build_reference_bdm(5).is_err());
    }

    #[test]
    fn pressure_modes_orthonormal() {
        let b = build_reference_bdm(4).unwrap();
        let q = b.pressure_modes();
        for i in 1..q.len() {
            assert!(q[i].integrate_ref().abs() < 1e-13);
            for j in 1..q.len() {
                let g = (&q[i] * &q[j]).integrate_ref();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((g - want).abs() < 1e-12, "({i},{j}) {g}");
            }
        }
    }

    #[test]
    fn whitney_flux_is_unit() {
        let b = build_reference_bdm(1).unwrap();
        for e in 0..3 {
            let tr = b.normal_trace(b.facet_index(e, 0), e);
            let flux = super::super::poly::upoly_integral01(&tr) * ref_edge_length(e);
            assert!((flux.abs() - 1.0).abs() < 1e-14);
        }
    }
}
