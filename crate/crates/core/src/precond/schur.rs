use std::str::FromStr;

use crate::assembly::{PressureOps, ProblemParams};
use crate::error::{Error, Result};
use crate::linalg::{factor_spd, DeflatedSolver, SparseSym, SpdFactor};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SchurMode {
    /// exact inverse of the norm matrix via the Woodbury identity
    #[default]
    Exact,
    /// `c₁ M⁻¹ + τ (τ inv_λ M + N)⁻¹`
    Approx,
}

impl SchurMode {
    pub fn name(self) -> &'static str {
        match self {
            SchurMode::Exact => "exact",
            SchurMode::Approx => "approx",
        }
    }
}

impl FromStr for SchurMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(SchurMode::Exact),
            "approx" => Ok(SchurMode::Approx),
            _ => Err(Error::InvalidArgument(format!("unknown schur mode {s:?}"))),
        }
    }
}

#[derive(Debug, Clone)]
enum ShiftedSolve {
    None,
    Plain(SpdFactor),
    Deflated(DeflatedSolver),
}

/// Preconditioner for the pressure Schur complement,
/// `z = c₁ M⁻¹ r + c₂ (s M + N)⁻¹ r (+ γ · constant mode)`.
///
/// The norm matrix is `S̃ = inv_λ M + M (τ M + 2μ N)⁻¹ N`. With
/// `c₁ = 2μ/(1 + 2μ inv_λ)`, `c₂ = τ/(1 + 2μ inv_λ)²` and
/// `s = τ inv_λ/(1 + 2μ inv_λ)` the formula is its exact inverse.
#[derive(Debug, Clone)]
pub struct SchurPrecond {
    pub mode: SchurMode,
    pub m: Vec<f64>,
    pub c1: f64,
    pub c2: f64,
    pub shift: f64,
    /// coefficient of `1 (1ᵀ r) / |Ω|`; nonzero only for `τ = 0` on an
    /// enclosed domain with finite λ, where it is the `τ → 0` limit of the
    /// second term acting on constants
    pub gamma: f64,
    /// inputs and outputs are projected onto mean-zero vectors
    pub deflate: bool,
    solve: ShiftedSolve,
}

impl SchurPrecond {
    pub fn new(ops: &PressureOps, params: &ProblemParams, mode: SchurMode) -> Result<Self> {
        let (mu2, tau, il) = (2.0 * params.mu, params.tau, params.inv_lambda);
        let d = 1.0 + mu2 * il;
        let c1 = mu2 / d;
        let (c2, shift) = match mode {
            SchurMode::Exact => (tau / (d * d), tau * il / d),
            SchurMode::Approx => (tau, tau * il),
        };
        let deflate = ops.singular && il == 0.0;
        let gamma = if tau == 0.0 && ops.singular && il > 0.0 {
            match mode {
                SchurMode::Exact => 1.0 / il - c1,
                SchurMode::Approx => 1.0 / il,
            }
        } else {
            0.0
        };
        let solve = if c2 == 0.0 {
            ShiftedSolve::None
        } else {
            let a = shifted(ops, shift)?;
            if shift == 0.0 && ops.singular {
                ShiftedSolve::Deflated(DeflatedSolver::new(&a, &[vec![1.0; ops.m.len()]])?)
            } else {
                ShiftedSolve::Plain(factor_spd(&a)?)
            }
        };
        Ok(Self { mode, m: ops.m.clone(), c1, c2, shift, gamma, deflate, solve })
    }

    pub fn n(&self) -> usize {
        self.m.len()
    }

    pub fn apply(&self, r: &[f64]) -> Result<Vec<f64>> {
        if r.len() != self.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), got: r.len() });
        }
        let mut r = r.to_vec();
        if self.deflate {
            remove_mean(&mut r);
        }
        let mut z: Vec<f64> = r.iter().zip(&self.m).map(|(x, m)| self.c1 * x / m).collect();
        let second = match &self.solve {
            ShiftedSolve::None => None,
            ShiftedSolve::Plain(f) => Some(f.solve(&r)?),
            ShiftedSolve::Deflated(f) => Some(f.solve(&r)?),
        };
        if let Some(y) = second {
            z.iter_mut().zip(&y).for_each(|(a, b)| *a += self.c2 * b);
        }
        if self.gamma != 0.0 {
            let c = self.gamma * r.iter().sum::<f64>() / self.m.iter().sum::<f64>();
            z.iter_mut().for_each(|a| *a += c);
        }
        if self.deflate {
            remove_mean(&mut z);
        }
        Ok(z)
    }
}

/// `s M + N`
pub fn shifted(ops: &PressureOps, s: f64) -> Result<SparseSym> {
    let scaled: Vec<f64> = ops.m.iter().map(|m| s * m).collect();
    let sum = ops.n.add_scaled(1.0, SparseSym::from_diagonal(&scaled).csr(), 1.0);
    SparseSym::new(sum)
}

pub(crate) fn remove_mean(v: &mut [f64]) {
    if v.is_empty() {
        return;
    }
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    v.iter_mut().for_each(|x| *x -= mean);
}
