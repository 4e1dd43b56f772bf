//! Element-wise static condensation of the interior velocity and pressure
//! unknowns, back-substitution, and a monolithic reference path.

use nalgebra::{DMatrix, DVector, LU};
use rayon::prelude::*;

use crate::assembly::{BlockSystem, ElementBlock, ProblemParams};
use crate::error::{Error, Result};
use crate::fespace::{DofMap, EssentialBc, SpaceSplit};
use crate::linalg::{CsrMatrix, SparseSym, TripletBuilder, DENSE_CAP};

type Lu = LU<f64, nalgebra::Dyn, nalgebra::Dyn>;

/// Cached local saddle factorization of one element.
#[derive(Debug, Clone)]
pub struct LocalFactor {
    /// `K⁻¹ [A_og; 0]`
    x: DMatrix<f64>,
    /// `K⁻¹ [f_o; 0]`
    y: DVector<f64>,
}

/// The condensed system on `u∂ ⊕ û ⊕ p̄`, restricted to free velocity DOFs.
#[derive(Debug, Clone)]
pub struct CondensedSystem {
    pub params: ProblemParams,
    pub dofs: DofMap,
    pub bc: EssentialBc,
    locals: Vec<Option<LocalFactor>>,
    /// condensed (global) index of each free DOF
    pub free: Vec<usize>,
    pub a_g: SparseSym,
    /// free velocity × p̄
    pub b_g: CsrMatrix,
    /// `-inv_λ · M`
    pub c_g: SparseSym,
    pub f_g: Vec<f64>,
    /// pressure right-hand side from the essential lifting
    pub g_p: Vec<f64>,
    /// pressure is only determined up to a constant
    pub mean_zero: bool,
}

fn local_saddle(blk: &ElementBlock, ng: usize) -> Result<Option<(Lu, usize)>> {
    let nv = blk.a.nrows();
    let no = nv - ng;
    let npo = blk.c.len() - 1;
    if no == 0 {
        return Ok(None);
    }
    let n = no + npo;
    let mut k = DMatrix::<f64>::zeros(n, n);
    k.view_mut((0, 0), (no, no)).copy_from(&blk.a.view((ng, ng), (no, no)));
    let b_oo = blk.b.view((ng, 1), (no, npo));
    k.view_mut((0, no), (no, npo)).copy_from(&b_oo);
    k.view_mut((no, 0), (npo, no)).copy_from(&b_oo.transpose());
    for m in 0..npo {
        k[(no + m, no + m)] = blk.c[1 + m];
    }
    Ok(Some((k.lu(), no)))
}

/// Eliminates `(u^o, p^o)` element by element.
pub fn eliminate_local(sys: &BlockSystem) -> Result<CondensedSystem> {
    let split = *sys.split();
    let k = split.k;
    let ng = 3 * (k + 1) + 3 * k;
    let results: Vec<(DMatrix<f64>, DVector<f64>, Option<LocalFactor>)> = sys
        .elements
        .par_iter()
        .enumerate()
        .map(|(t, blk)| {
            let a_gg = blk.a.view((0, 0), (ng, ng)).into_owned();
            let f_g = blk.f.rows(0, ng).into_owned();
            let Some((lu, no)) = local_saddle(blk, ng)? else {
                return Ok((a_gg, f_g, None));
            };
            let n = lu.l().nrows();
            let mut r = DMatrix::<f64>::zeros(n, ng);
            r.view_mut((0, 0), (no, ng)).copy_from(&blk.a.view((ng, 0), (no, ng)));
            let mut rf = DVector::<f64>::zeros(n);
            rf.rows_mut(0, no).copy_from(&blk.f.rows(ng, no));
            let x = lu.solve(&r).ok_or(Error::SingularLocalBlock { element: t })?;
            let y = lu.solve(&rf).ok_or(Error::SingularLocalBlock { element: t })?;
            let s = &a_gg - r.transpose() * &x;
            let fs = &f_g - r.transpose() * &y;
            Ok((s, fs, Some(LocalFactor { x, y })))
        })
        .collect::<Result<Vec<_>>>()?;

    let nc = split.n_condensed();
    let mut ta = TripletBuilder::new(nc, nc);
    let mut tb = TripletBuilder::new(nc, split.n_pb());
    let mut f = vec![0.0; nc];
    let mut locals = Vec::with_capacity(results.len());
    for (t, (s, fs, lf)) in results.into_iter().enumerate() {
        let vd = &sys.dofs.element_velocity(t)[..ng];
        for (i, &gi) in vd.iter().enumerate() {
            f[gi] += fs[i];
            for (j, &gj) in vd.iter().enumerate() {
                ta.push(gi, gj, s[(i, j)]);
            }
            tb.push(gi, split.pb(t), sys.elements[t].b[(i, 0)]);
        }
        locals.push(lf);
    }
    let a_full = SparseSym::from_csr_symmetrized(ta.build())?;
    let b_full = tb.build();

    let free: Vec<usize> = (0..nc).filter(|&d| !sys.bc.is_essential(d)).collect();
    let lift: Vec<f64> = sys.bc.lift()[..nc].to_vec();
    let ag = a_full.mul_vec(&lift)?;
    let f_g = free.iter().map(|&i| f[i] - ag[i]).collect();
    let g_p = b_full.mul_transpose_vec(&lift)?.into_iter().map(|x| -x).collect();
    let c_diag: Vec<f64> = (0..split.n_pb()).map(|t| sys.elements[t].c[0]).collect();
    let pb: Vec<usize> = (0..split.n_pb()).collect();
    let has_natural = has_natural_boundary(sys);
    Ok(CondensedSystem {
        params: sys.params,
        dofs: sys.dofs.clone(),
        bc: sys.bc.clone(),
        locals,
        a_g: a_full.principal(&free),
        b_g: b_full.extract(&free, &pb),
        c_g: SparseSym::from_diagonal(&c_diag),
        f_g,
        g_p,
        mean_zero: sys.params.is_incompressible() && !has_natural,
        free,
    })
}

/// Whether some boundary edge is free of essential data, i.e. the domain
/// has a natural (outflow) boundary.
fn has_natural_boundary(sys: &BlockSystem) -> bool {
    let split = sys.split();
    let mut count = vec![0u8; split.n_edges];
    for t in 0..split.n_elements {
        for &e in &sys.dofs.geometry(t).edges {
            count[e] += 1;
        }
    }
    (0..split.n_edges).any(|e| count[e] == 1 && !sys.bc.is_essential(split.ub(e, 0)))
}

/// Full solution in the original (unreduced) numbering.
#[derive(Debug, Clone, PartialEq)]
pub struct FullSolution {
    pub velocity: Vec<f64>,
    pub pressure: Vec<f64>,
}

impl CondensedSystem {
    pub fn split(&self) -> &SpaceSplit {
        self.dofs.split()
    }

    pub fn n_velocity(&self) -> usize {
        self.free.len()
    }

    pub fn n_pressure(&self) -> usize {
        self.split().n_pb()
    }

    pub fn n(&self) -> usize {
        self.n_velocity() + self.n_pressure()
    }

    /// Right-hand side `[F_g; G]` of the condensed system.
    pub fn rhs(&self) -> Vec<f64> {
        let mut r = self.f_g.clone();
        r.extend_from_slice(&self.g_p);
        r
    }

    /// `[A_g x_u + B_g x_p; B_gᵀ x_u + C_g x_p]`
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let nu = self.n_velocity();
        let (xu, xp) = x.split_at(nu);
        let mut y = vec![0.0; x.len()];
        {
            let (yu, yp) = y.split_at_mut(nu);
            self.a_g.mul_vec_into(xu, yu);
            let bx = self.b_g.mul_vec(xp).expect("dimension checked by split");
            yu.iter_mut().zip(&bx).for_each(|(a, b)| *a += b);
            self.c_g.mul_vec_into(xp, yp);
            let btx = self.b_g.mul_transpose_vec(xu).expect("dimension checked by split");
            yp.iter_mut().zip(&btx).for_each(|(a, b)| *a += b);
        }
        y
    }

    /// Recovers the interior unknowns and returns the full solution.
    pub fn back_substitute(&self, x: &[f64]) -> Result<FullSolution> {
        if x.len() != self.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), got: x.len() });
        }
        let split = *self.split();
        let k = split.k;
        let ng = 3 * (k + 1) + 3 * k;
        let mut velocity = self.bc.lift();
        for (i, &d) in self.free.iter().enumerate() {
            velocity[d] = x[i];
        }
        let mut pressure = vec![0.0; split.n_pressure()];
        pressure[..split.n_pb()].copy_from_slice(&x[self.n_velocity()..]);
        for (t, lf) in self.locals.iter().enumerate() {
            let Some(lf) = lf else { continue };
            let vd = self.dofs.element_velocity(t);
            let ug = DVector::from_iterator(ng, vd[..ng].iter().map(|&d| velocity[d]));
            let loc = &lf.y - &lf.x * ug;
            let no = vd.len() - ng;
            for (i, &d) in vd[ng..].iter().enumerate() {
                velocity[d] = loc[i];
            }
            for (m, &d) in self.dofs.element_pressure(t)[1..].iter().enumerate() {
                pressure[d] = loc[no + m];
            }
        }
        Ok(FullSolution { velocity, pressure })
    }
}

/// Dense reduced saddle matrix `[[A, B], [Bᵀ, C]]` on free velocity DOFs and
/// all pressure DOFs, with its right-hand side.
#[derive(Debug, Clone)]
pub struct Monolithic {
    pub matrix: DMatrix<f64>,
    pub rhs: DVector<f64>,
    /// global velocity index of each free DOF
    pub free: Vec<usize>,
    pub n_pressure: usize,
}

pub fn build_monolithic(sys: &BlockSystem) -> Result<Monolithic> {
    let red = sys.reduced()?;
    let nu = red.free.len();
    let np = red.c.n();
    let n = nu + np;
    if n > DENSE_CAP {
        return Err(Error::CapExceeded { n, cap: DENSE_CAP });
    }
    let mut m = DMatrix::<f64>::zeros(n, n);
    let fill = |m: &mut DMatrix<f64>, csr: &CsrMatrix, r0: usize, c0: usize, transpose: bool| {
        for i in 0..csr.nrows() {
            let (cols, vals) = csr.row(i);
            for (j, v) in cols.iter().zip(vals) {
                if transpose {
                    m[(r0 + j, c0 + i)] = *v;
                } else {
                    m[(r0 + i, c0 + j)] = *v;
                }
            }
        }
    };
    fill(&mut m, red.a.csr(), 0, 0, false);
    fill(&mut m, &red.b, 0, nu, false);
    fill(&mut m, &red.b, nu, 0, true);
    fill(&mut m, red.c.csr(), nu, nu, false);
    let mut rhs = DVector::<f64>::zeros(n);
    rhs.rows_mut(0, nu).copy_from_slice(&red.f);
    rhs.rows_mut(nu, np).copy_from_slice(&red.g);
    Ok(Monolithic { matrix: m, rhs, free: red.free, n_pressure: np })
}
