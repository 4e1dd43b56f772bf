//! Solves with symmetric positive semi-definite matrices whose nullspace is
//! known, returning the minimum-norm solution.

use super::ldlt::{factor_spd, SpdFactor};
use super::sparse::{dot, SparseSym};
use crate::error::{Error, Result};

/// Pseudo-inverse application `x = A† b` for a PSD matrix with a known
/// nullspace.
///
/// Internally the matrix is grounded at one DOF per nullspace vector (rows
/// and columns removed), which is nonsingular; the reduced solution is then
/// projected orthogonally onto the complement of the nullspace. The result
/// equals the minimum-norm solution of `A x = P b`.
#[derive(Debug, Clone)]
pub struct DeflatedSolver {
    n: usize,
    /// orthonormal nullspace basis
    basis: Vec<Vec<f64>>,
    kept: Vec<usize>,
    factor: SpdFactor,
}

impl DeflatedSolver {
    pub fn new(a: &SparseSym, nullspace: &[Vec<f64>]) -> Result<Self> {
        let n = a.n();
        let basis = orthonormalize(nullspace, n)?;
        // pick grounded DOFs by pivoted elimination on the nullspace block
        let mut work = basis.clone();
        let mut pinned = Vec::with_capacity(work.len());
        for j in 0..work.len() {
            let (piv, _) = (0..n)
                .filter(|i| !pinned.contains(i))
                .map(|i| (i, work[j][i].abs()))
                .fold((usize::MAX, -1.0), |best, c| if c.1 > best.1 { c } else { best });
            pinned.push(piv);
            let pv = work[j][piv];
            for l in j + 1..work.len() {
                let f = work[l][piv] / pv;
                for i in 0..n {
                    let v = work[j][i];
                    work[l][i] -= f * v;
                }
            }
        }
        let kept: Vec<usize> = (0..n).filter(|i| !pinned.contains(i)).collect();
        let factor = factor_spd(&a.principal(&kept))?;
        Ok(Self { n, basis, kept, factor })
    }

    /// Orthogonal projection onto the complement of the nullspace.
    pub fn project(&self, v: &mut [f64]) {
        project_out(&self.basis, v);
    }

    pub fn nullspace(&self) -> &[Vec<f64>] {
        &self.basis
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        if b.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: b.len() });
        }
        let mut pb = b.to_vec();
        self.project(&mut pb);
        let reduced: Vec<f64> = self.kept.iter().map(|&i| pb[i]).collect();
        let y = self.factor.solve(&reduced)?;
        let mut x = vec![0.0; self.n];
        for (k, &i) in self.kept.iter().enumerate() {
            x[i] = y[k];
        }
        self.project(&mut x);
        Ok(x)
    }
}

/// `x = A† b`; see [`DeflatedSolver`].
pub fn solve_deflated(a: &SparseSym, b: &[f64], nullspace: &[Vec<f64>]) -> Result<Vec<f64>> {
    DeflatedSolver::new(a, nullspace)?.solve(b)
}

pub(crate) fn project_out(basis: &[Vec<f64>], v: &mut [f64]) {
    for z in basis {
        let c = dot(z, v);
        for (vi, zi) in v.iter_mut().zip(z) {
            *vi -= c * zi;
        }
    }
}

fn orthonormalize(vs: &[Vec<f64>], n: usize) -> Result<Vec<Vec<f64>>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for v in vs {
        if v.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: v.len() });
        }
        let mut w = v.clone();
        project_out(&out, &mut w);
        project_out(&out, &mut w);
        let nw = dot(&w, &w).sqrt();
        if nw <= 1e-12 * dot(v, v).sqrt().max(f64::MIN_POSITIVE) {
            return Err(Error::InvalidArgument("nullspace vectors are linearly dependent".into()));
        }
        w.iter_mut().for_each(|x| *x /= nw);
        out.push(w);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::sparse::CsrMatrix;

    fn pair() -> SparseSym {
        SparseSym::new(CsrMatrix::from_dense(2, 2, &[1.0, -1.0, -1.0, 1.0])).unwrap()
    }

    #[test]
    fn two_node_hand_solve() {
        let x = solve_deflated(&pair(), &[1.0, -1.0], &[vec![1.0, 1.0]]).unwrap();
        assert!((x[0] - 0.5).abs() < 1e-15 && (x[1] + 0.5).abs() < 1e-15);
    }

    #[test]
    fn pure_nullspace_input_gives_zero() {
        let x = solve_deflated(&pair(), &[1.0, 1.0], &[vec![1.0, 1.0]]).unwrap();
        assert!(x.iter().all(|v| v.abs() < 1e-15));
    }
}
