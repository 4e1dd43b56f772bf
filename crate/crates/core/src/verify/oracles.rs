//! Dense spectral checks of the preconditioners.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use super::dense::{schur_condensed, to_dense};
use crate::assembly::{assemble_aux, assemble_pressure_ops, PressureOps, ProblemParams};
use crate::error::{Error, Result};
use crate::linalg::dense::gen_eigenvalues;
use crate::pipeline::Discretization;
use crate::precond::{AspPrecond, SchurMode, SchurPrecond, SmootherKind};

fn constants(n: usize) -> Vec<Vec<f64>> {
    vec![vec![1.0; n]]
}

/// Pressure nullspace of the condensed system.
pub fn pressure_nullspace(d: &Discretization) -> Vec<Vec<f64>> {
    if d.cond.mean_zero {
        constants(d.cond.n_pressure())
    } else {
        Vec::new()
    }
}

/// Extreme eigenvalues and condition number of `P⁻¹ A`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spectrum {
    pub min: f64,
    pub max: f64,
}

impl Spectrum {
    pub fn kappa(&self) -> f64 {
        self.max / self.min
    }

    fn from_eigenvalues(ev: &[f64]) -> Result<Self> {
        let (min, max) = (ev[0], ev[ev.len() - 1]);
        if !(min > 0.0) {
            return Err(Error::NotSpd { row: 0, pivot: min });
        }
        Ok(Self { min, max })
    }
}

/// Spectrum of `S̃⁻¹ S_g` on the complement of the pressure nullspace.
pub fn schur_spectrum(d: &Discretization, mode: SchurMode) -> Result<Spectrum> {
    let s = schur_condensed(&d.cond)?;
    let ops = assemble_pressure_ops(&d.mesh, d.problem)?;
    let pc = SchurPrecond::new(&ops, &d.cond.params, mode)?;
    let ev = gen_eigenvalues(&s, |r| pc.apply(r).expect("sized"), &pressure_nullspace(d))?;
    Spectrum::from_eigenvalues(&ev)
}

/// Spectrum of `Ã_g⁻¹ A_g`.
pub fn asp_spectrum(d: &Discretization, kind: SmootherKind) -> Result<Spectrum> {
    let a = to_dense(d.cond.a_g.csr());
    let aux = assemble_aux(&d.mesh, &d.cond.params, d.problem)?;
    let pc = AspPrecond::new(&d.mesh, &d.basis, &d.cond, &aux, kind)?;
    let ev = gen_eigenvalues(&a, |r| pc.apply(r).expect("sized"), &[])?;
    Spectrum::from_eigenvalues(&ev)
}

/// Dense `S̃ = inv_λ M + M (τ M + 2μ N)⁻¹ N`. When `τ M + 2μ N` is
/// singular its inverse is taken on the complement of the constants.
pub fn norm_matrix(ops: &PressureOps, params: &ProblemParams) -> Result<DMatrix<f64>> {
    let n = ops.m.len();
    let m = DMatrix::from_diagonal(&DVector::from_vec(ops.m.clone()));
    let nm = to_dense(ops.n.csr());
    let t = &m * params.tau + &nm * (2.0 * params.mu);
    let y = if params.tau == 0.0 && ops.singular {
        // (2μ N)† N = projector onto the complement of the constants
        let pinv = t.clone().pseudo_inverse(1e-12 * t.norm()).map_err(|e| Error::InvalidArgument(e.into()))?;
        pinv * &nm
    } else {
        t.lu().solve(&nm).ok_or_else(|| Error::InvalidArgument("singular τM + 2μN".into()))?
    };
    let _ = n;
    Ok(&m * params.inv_lambda + &m * y)
}

/// Worst relative roundtrip error `‖S̃ (S̃⁻¹ r) − r‖ / ‖r‖` over `samples`
/// random vectors. Inputs are mean-zero whenever `S̃` is only defined or
/// invertible on that subspace (enclosed domain with `τ = 0` or `λ = ∞`).
pub fn woodbury_roundtrip(ops: &PressureOps, params: &ProblemParams, samples: usize, seed: u64) -> Result<f64> {
    let s = norm_matrix(ops, params)?;
    let pc = SchurPrecond::new(ops, params, SchurMode::Exact)?;
    let restrict = ops.singular && (params.tau == 0.0 || params.inv_lambda == 0.0);
    let n = ops.m.len();
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let mut r: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        if restrict {
            let mean = r.iter().sum::<f64>() / n as f64;
            r.iter_mut().for_each(|x| *x -= mean);
        }
        let z = pc.apply(&r)?;
        let back = &s * DVector::from_vec(z);
        let r = DVector::from_vec(r);
        worst = worst.max((back - &r).norm() / r.norm());
    }
    Ok(worst)
}
