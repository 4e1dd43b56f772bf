use crate::assembly::AuxSpace;
use crate::condense::CondensedSystem;
use crate::error::{Error, Result};
use crate::fespace::ReferenceBasis;
use crate::linalg::{factor_spd, CsrMatrix, SpdFactor};
use crate::mesh::Mesh;

use super::smoother::{Smoother, SmootherKind};
use super::transfer::build_transfer;

/// Auxiliary space preconditioner `z = R_g r + Π A₀⁻¹ Πᵀ r` for the
/// condensed stiffness `A_g`, with a direct factorization of `A₀`.
#[derive(Debug, Clone)]
pub struct AspPrecond {
    pub smoother: Smoother,
    /// `None` when the auxiliary space is empty or disabled
    coarse: Option<Coarse>,
    n: usize,
}

#[derive(Debug, Clone)]
struct Coarse {
    pi: CsrMatrix,
    a0: SpdFactor,
}

impl AspPrecond {
    pub fn new(mesh: &Mesh, basis: &ReferenceBasis, cond: &CondensedSystem, aux: &AuxSpace, kind: SmootherKind) -> Result<Self> {
        let smoother = Smoother::new(kind, mesh, cond)?;
        let coarse = if aux.n() == 0 {
            None
        } else {
            Some(Coarse { pi: build_transfer(mesh, basis, cond, aux)?, a0: factor_spd(&aux.a0)? })
        };
        Ok(Self { smoother, coarse, n: cond.n_velocity() })
    }

    /// Smoother only, without the auxiliary correction.
    pub fn smoother_only(smoother: Smoother, n: usize) -> Self {
        Self { smoother, coarse: None, n }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn transfer(&self) -> Option<&CsrMatrix> {
        self.coarse.as_ref().map(|c| &c.pi)
    }

    pub fn apply(&self, r: &[f64]) -> Result<Vec<f64>> {
        if r.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: r.len() });
        }
        let mut z = self.smoother.apply(r);
        if let Some(c) = &self.coarse {
            let rc = c.pi.mul_transpose_vec(r)?;
            let yc = c.a0.solve(&rc)?;
            let zc = c.pi.mul_vec(&yc)?;
            z.iter_mut().zip(&zc).for_each(|(a, b)| *a += b);
        }
        Ok(z)
    }
}
