use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::params::ProblemParams;
use super::projection::FacetProjection;
use crate::error::{Error, Result};
use crate::fespace::piola::Mat2;
use crate::fespace::{map_piola, DofMap, ElementTables, EssentialBc, ReferenceBasis, SpaceSplit};
use crate::linalg::{CsrMatrix, SparseSym, TripletBuilder};
use crate::mesh::{Mesh, Point};
use crate::quadrature::LineRule;

/// Volume load `f(x)`.
pub type BodyForce<'a> = &'a (dyn Fn(Point) -> [f64; 2] + Sync);

/// Dense element matrices in the local layout of [`DofMap`].
#[derive(Debug, Clone)]
pub struct ElementBlock {
    /// velocity × velocity
    pub a: DMatrix<f64>,
    /// velocity × pressure
    pub b: DMatrix<f64>,
    /// diagonal of the pressure block
    pub c: DVector<f64>,
    /// velocity load
    pub f: DVector<f64>,
}

/// Assembled saddle point system before condensation.
#[derive(Debug, Clone)]
pub struct BlockSystem {
    pub params: ProblemParams,
    pub dofs: DofMap,
    pub bc: EssentialBc,
    pub elements: Vec<ElementBlock>,
}

fn sym_grad(g: &Mat2) -> Mat2 {
    let off = 0.5 * (g[0][1] + g[1][0]);
    [[g[0][0], off], [off, g[1][1]]]
}

fn ddot(a: &Mat2, b: &Mat2) -> f64 {
    a[0][0] * b[0][0] + a[0][1] * b[0][1] + a[1][0] * b[1][0] + a[1][1] * b[1][1]
}

/// Element matrices of the SIP-divHDG form `a`, the divergence form `b`,
/// the penalty form `c`, and the load.
pub fn assemble_element(
    mesh: &Mesh,
    basis: &ReferenceBasis,
    tables: &ElementTables,
    proj: &FacetProjection,
    dofs: &DofMap,
    params: &ProblemParams,
    t: usize,
    force: Option<BodyForce<'_>>,
) -> Result<ElementBlock> {
    let k = params.k;
    let geom = dofs.geometry(t);
    let nb = basis.n_functions();
    let nv = dofs.element_velocity(t).len();
    let np = dofs.element_pressure(t).len();
    let two_mu = 2.0 * params.mu;
    let loc: Vec<usize> = (0..nb).map(|f| dofs.local_of_bdm(f)).collect();

    let mut a = DMatrix::<f64>::zeros(nv, nv);
    let mut b = DMatrix::<f64>::zeros(nv, np);
    let mut c = DVector::<f64>::zeros(np);
    let mut f = DVector::<f64>::zeros(nv);

    let ev = map_piola(&tables.volume, geom, geom.det.abs());
    let nq = ev.weights.len();
    let d: Vec<Vec<Mat2>> = ev.grad.iter().map(|g| g.iter().map(sym_grad).collect()).collect();
    for i in 0..nb {
        for j in 0..=i {
            let mut s = 0.0;
            for q in 0..nq {
                let vi = ev.val[i][q];
                let vj = ev.val[j][q];
                s += ev.weights[q] * (two_mu * ddot(&d[i][q], &d[j][q]) + params.tau * (vi[0] * vj[0] + vi[1] * vj[1]));
            }
            a[(loc[i], loc[j])] = s;
            a[(loc[j], loc[i])] = s;
        }
        for m in 0..np {
            let s: f64 = (0..nq).map(|q| ev.weights[q] * tables.volume.pres[m][q] * ev.div[i][q]).sum();
            b[(loc[i], m)] = -s;
        }
    }
    for m in 0..np {
        let s: f64 = (0..nq).map(|q| ev.weights[q] * tables.volume.pres[m][q].powi(2)).sum();
        c[m] = -params.inv_lambda * s;
    }
    if let Some(force) = force {
        for q in 0..nq {
            let fx = force(ev.points[q]);
            for i in 0..nb {
                f[loc[i]] += ev.weights[q] * (fx[0] * ev.val[i][q][0] + fx[1] * ev.val[i][q][1]);
            }
        }
    }

    for le in 0..3 {
        let edge = &mesh.edges()[geom.edges[le]];
        let len = edge.length;
        let sign = if edge.left == t { 1.0 } else { -1.0 };
        let n = [sign * edge.normal[0], sign * edge.normal[1]];
        let tv = edge.tangent(mesh.vertices());
        let ee = map_piola(&tables.edges[le], geom, len);
        let nq = ee.weights.len();
        // tangential jump samples per local DOF and D(u)n·t per BDM function
        let mut jump = vec![vec![0.0; nq]; nv];
        let mut dnt = vec![vec![0.0; nq]; nb];
        for i in 0..nb {
            for q in 0..nq {
                let v = ee.val[i][q];
                jump[loc[i]][q] = v[0] * tv[0] + v[1] * tv[1];
                let g = sym_grad(&ee.grad[i][q]);
                let dn = [g[0][0] * n[0] + g[0][1] * n[1], g[1][0] * n[0] + g[1][1] * n[1]];
                dnt[i][q] = dn[0] * tv[0] + dn[1] * tv[1];
            }
        }
        for jm in 0..k {
            let row = dofs.local_of_facet(le, jm);
            for q in 0..nq {
                jump[row][q] = -proj.mode(jm, q);
            }
        }
        let active: Vec<usize> = (0..nv).filter(|&r| jump[r].iter().any(|x| *x != 0.0)).collect();
        // consistency terms
        for &r in &active {
            for i in 0..nb {
                let s: f64 = (0..nq).map(|q| ee.weights[q] * dnt[i][q] * jump[r][q]).sum();
                a[(r, loc[i])] -= two_mu * s;
                a[(loc[i], r)] -= two_mu * s;
            }
        }
        // projected-jump penalty (αk²/h_F)⟨P·, P·⟩_F with h_F = |F|; the
        // factor |F| converts the reference-parameter inner product
        let h_f = len;
        let pen = two_mu * params.alpha * (k * k) as f64 / h_f * len;
        let coef: Vec<Vec<f64>> = active.iter().map(|&r| proj.coefficients(&jump[r])).collect();
        for (x, &r) in active.iter().enumerate() {
            for (y, &s) in active.iter().enumerate() {
                a[(r, s)] += pen * proj.inner(&coef[x], &coef[y]);
            }
        }
    }
    // enforce exact symmetry against round-off in the edge loops
    let at = a.transpose();
    a = (a + at) * 0.5;
    Ok(ElementBlock { a, b, c, f })
}

/// Smallest eigenvalue of an element block, relative to its largest.
fn min_relative_eigenvalue(a: &DMatrix<f64>) -> f64 {
    let ev = a.clone().symmetric_eigenvalues();
    let top = ev.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    ev.min() / top
}

/// Assembles all element blocks; fails with [`Error::NotCoercive`] if
/// any element velocity block has a clearly negative eigenvalue (the
/// stabilization parameter is too small).
pub fn assemble_saddle(
    mesh: &Mesh,
    basis: &ReferenceBasis,
    dofs: DofMap,
    params: ProblemParams,
    bc: EssentialBc,
    force: Option<BodyForce<'_>>,
) -> Result<BlockSystem> {
    let params = params.validated()?;
    if basis.k() != params.k || dofs.split().k != params.k {
        return Err(Error::InvalidArgument("degree mismatch between basis, spaces and parameters".into()));
    }
    let deg = 2 * params.k + 2;
    let tables = ElementTables::new(basis, deg);
    let proj = FacetProjection::new(params.k, &LineRule::with_degree(deg));
    let elements = (0..mesh.n_triangles())
        .into_par_iter()
        .map(|t| {
            let blk = assemble_element(mesh, basis, &tables, &proj, &dofs, &params, t, force)?;
            let lo = min_relative_eigenvalue(&blk.a);
            if lo < -1e-10 {
                return Err(Error::NotCoercive { element: t, eigenvalue: lo });
            }
            Ok(blk)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BlockSystem { params, dofs, bc, elements })
}

/// Global matrices on all (unreduced) DOFs.
#[derive(Debug, Clone)]
pub struct GlobalMatrices {
    pub a: SparseSym,
    /// velocity × pressure
    pub b: CsrMatrix,
    pub c: SparseSym,
    pub f: Vec<f64>,
}

/// Saddle point system restricted to the free velocity DOFs, with the
/// essential data lifted into the right-hand side.
#[derive(Debug, Clone)]
pub struct ReducedSystem {
    /// global velocity index of each free DOF
    pub free: Vec<usize>,
    pub a: SparseSym,
    pub b: CsrMatrix,
    pub c: SparseSym,
    pub f: Vec<f64>,
    /// pressure right-hand side `-B_eᵀ g`
    pub g: Vec<f64>,
}

impl BlockSystem {
    pub fn split(&self) -> &SpaceSplit {
        self.dofs.split()
    }

    pub fn global(&self) -> Result<GlobalMatrices> {
        let split = *self.split();
        let (nv, np) = (split.n_velocity(), split.n_pressure());
        let mut ta = TripletBuilder::new(nv, nv);
        let mut tb = TripletBuilder::new(nv, np);
        let mut tc = TripletBuilder::new(np, np);
        let mut f = vec![0.0; nv];
        for (t, blk) in self.elements.iter().enumerate() {
            let vd = self.dofs.element_velocity(t);
            let pd = self.dofs.element_pressure(t);
            for (i, &gi) in vd.iter().enumerate() {
                f[gi] += blk.f[i];
                for (j, &gj) in vd.iter().enumerate() {
                    ta.push(gi, gj, blk.a[(i, j)]);
                }
                for (m, &gm) in pd.iter().enumerate() {
                    tb.push(gi, gm, blk.b[(i, m)]);
                }
            }
            for (m, &gm) in pd.iter().enumerate() {
                tc.push(gm, gm, blk.c[m]);
            }
        }
        Ok(GlobalMatrices {
            a: SparseSym::from_csr_symmetrized(ta.build())?,
            b: tb.build(),
            c: SparseSym::new(tc.build())?,
            f,
        })
    }

    pub fn free_velocity(&self) -> Vec<usize> {
        (0..self.split().n_velocity()).filter(|&d| !self.bc.is_essential(d)).collect()
    }

    pub fn reduced(&self) -> Result<ReducedSystem> {
        let gm = self.global()?;
        let free = self.free_velocity();
        let all_p: Vec<usize> = (0..self.split().n_pressure()).collect();
        let lift = self.bc.lift();
        let ag = gm.a.mul_vec(&lift)?;
        let f = free.iter().map(|&i| gm.f[i] - ag[i]).collect();
        let bg = gm.b.mul_transpose_vec(&lift)?;
        let g = bg.iter().map(|x| -x).collect();
        Ok(ReducedSystem {
            a: gm.a.principal(&free),
            b: gm.b.extract(&free, &all_p),
            c: gm.c,
            f,
            g,
            free,
        })
    }
}
