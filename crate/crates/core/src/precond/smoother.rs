use std::str::FromStr;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::condense::CondensedSystem;
use crate::error::{Error, Result};
use crate::linalg::{SparseSym, SpdFactor};
use crate::mesh::Mesh;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SmootherKind {
    /// vertex-patch block symmetric Gauss-Seidel
    #[default]
    PatchSgs,
    /// point Jacobi `D⁻¹`
    Jacobi,
}

impl SmootherKind {
    pub fn name(self) -> &'static str {
        match self {
            SmootherKind::PatchSgs => "patch-sgs",
            SmootherKind::Jacobi => "jacobi",
        }
    }
}

impl FromStr for SmootherKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "patch-sgs" => Ok(SmootherKind::PatchSgs),
            "jacobi" => Ok(SmootherKind::Jacobi),
            _ => Err(Error::InvalidArgument(format!("unknown smoother {s:?}"))),
        }
    }
}

/// One vertex patch with its factored principal block.
#[derive(Debug, Clone)]
pub struct Patch {
    pub dofs: Vec<usize>,
    factor: Cholesky<f64, Dyn>,
}

/// The fine-space part `R_g` of the auxiliary space preconditioner.
#[derive(Debug, Clone)]
pub enum Smoother {
    PatchSgs { a: SparseSym, patches: Vec<Patch> },
    Jacobi { inv_diag: Vec<f64> },
    /// exact inverse, for testing
    Exact(SpdFactor),
}

/// Free condensed DOFs on the edges incident to each vertex, in ascending
/// vertex order; vertices without free DOFs are skipped.
pub fn vertex_patches(mesh: &Mesh, cond: &CondensedSystem) -> Vec<Vec<usize>> {
    let split = *cond.split();
    let k = split.k;
    let mut position = vec![usize::MAX; split.n_condensed()];
    for (i, &d) in cond.free.iter().enumerate() {
        position[d] = i;
    }
    let mut incident = vec![Vec::new(); mesh.n_vertices()];
    for (ei, e) in mesh.edges().iter().enumerate() {
        incident[e.vertices[0]].push(ei);
        incident[e.vertices[1]].push(ei);
    }
    incident
        .iter()
        .map(|edges| {
            let mut p: Vec<usize> = edges
                .iter()
                .flat_map(|&e| (0..=k).map(move |i| split.ub(e, i)).chain((0..k).map(move |j| split.uh(e, j))))
                .map(|d| position[d])
                .filter(|&i| i != usize::MAX)
                .collect();
            p.sort_unstable();
            p
        })
        .filter(|p| !p.is_empty())
        .collect()
}

impl Smoother {
    pub fn new(kind: SmootherKind, mesh: &Mesh, cond: &CondensedSystem) -> Result<Self> {
        let a = &cond.a_g;
        match kind {
            SmootherKind::Jacobi => {
                let d = a.diagonal();
                if let Some(row) = d.iter().position(|x| !(*x > 0.0)) {
                    return Err(Error::NotSpd { row, pivot: d[row] });
                }
                Ok(Smoother::Jacobi { inv_diag: d.iter().map(|x| 1.0 / x).collect() })
            }
            SmootherKind::PatchSgs => {
                let n = a.n();
                let mut local = vec![usize::MAX; n];
                let patches = vertex_patches(mesh, cond)
                    .into_iter()
                    .map(|dofs| {
                        for (l, &d) in dofs.iter().enumerate() {
                            local[d] = l;
                        }
                        let mut m = DMatrix::<f64>::zeros(dofs.len(), dofs.len());
                        for (l, &d) in dofs.iter().enumerate() {
                            let (cols, vals) = a.row(d);
                            for (c, v) in cols.iter().zip(vals) {
                                if local[*c] != usize::MAX {
                                    m[(l, local[*c])] = *v;
                                }
                            }
                        }
                        for &d in &dofs {
                            local[d] = usize::MAX;
                        }
                        let factor = m.cholesky().ok_or(Error::NotSpd { row: dofs[0], pivot: f64::NAN })?;
                        Ok(Patch { dofs, factor })
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Smoother::PatchSgs { a: a.clone(), patches })
            }
        }
    }

    pub fn exact(cond: &CondensedSystem) -> Result<Self> {
        Ok(Smoother::Exact(crate::linalg::factor_spd(&cond.a_g)?))
    }

    pub fn apply(&self, r: &[f64]) -> Vec<f64> {
        match self {
            Smoother::Jacobi { inv_diag } => r.iter().zip(inv_diag).map(|(x, d)| x * d).collect(),
            Smoother::Exact(f) => f.solve(r).expect("dimension checked by caller"),
            Smoother::PatchSgs { a, patches } => {
                let mut z = vec![0.0; r.len()];
                for p in patches.iter().chain(patches.iter().rev()) {
                    patch_update(a, p, r, &mut z);
                }
                z
            }
        }
    }
}

/// `z_P += A_PP⁻¹ (r - A z)_P`
fn patch_update(a: &SparseSym, p: &Patch, r: &[f64], z: &mut [f64]) {
    let res = DVector::from_iterator(
        p.dofs.len(),
        p.dofs.iter().map(|&d| {
            let (cols, vals) = a.row(d);
            r[d] - cols.iter().zip(vals).map(|(c, v)| v * z[*c]).sum::<f64>()
        }),
    );
    let dz = p.factor.solve(&res);
    for (l, &d) in p.dofs.iter().enumerate() {
        z[d] += dz[l];
    }
}
