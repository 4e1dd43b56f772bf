//! Block-diagonal preconditioner for the condensed saddle point system:
//! an auxiliary space preconditioner for the velocity block and the
//! inverse of a spectrally equivalent Schur complement for the pressure.

pub mod asp;
pub mod schur;
pub mod smoother;
pub mod transfer;

pub use asp::AspPrecond;
pub use schur::{SchurMode, SchurPrecond};
pub use smoother::{vertex_patches, Smoother, SmootherKind};
pub use transfer::build_transfer;

use crate::assembly::{assemble_aux, assemble_pressure_ops};
use crate::error::{Error, Result};
use crate::pipeline::Discretization;

/// `diag(Ã_g⁻¹, S̃⁻¹)`
#[derive(Debug, Clone)]
pub struct BlockPrecond {
    pub asp: AspPrecond,
    pub schur: SchurPrecond,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PrecondOptions {
    pub smoother: SmootherKind,
    pub schur: SchurMode,
}

impl BlockPrecond {
    pub fn new(d: &Discretization, opts: PrecondOptions) -> Result<Self> {
        let params = d.cond.params;
        let aux = assemble_aux(&d.mesh, &params, d.problem)?;
        let asp = AspPrecond::new(&d.mesh, &d.basis, &d.cond, &aux, opts.smoother)?;
        let ops = assemble_pressure_ops(&d.mesh, d.problem)?;
        let schur = SchurPrecond::new(&ops, &params, opts.schur)?;
        Ok(Self { asp, schur })
    }

    pub fn n(&self) -> usize {
        self.asp.n() + self.schur.n()
    }

    pub fn apply(&self, r: &[f64]) -> Result<Vec<f64>> {
        if r.len() != self.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), got: r.len() });
        }
        let (ru, rp) = r.split_at(self.asp.n());
        let mut z = self.asp.apply(ru)?;
        z.extend(self.schur.apply(rp)?);
        Ok(z)
    }
}
