//! Dense symmetric kernels used at verification scale.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::sparse::CsrMatrix;
use crate::error::{Error, Result};

/// Largest dimension accepted by the dense verification kernels.
pub const DENSE_CAP: usize = 5000;

/// Dense symmetric matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseSym {
    n: usize,
    data: Vec<f64>,
}

impl DenseSym {
    /// Checks symmetry to `1e-12` relative to the largest entry.
    pub fn new(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, got: data.len() });
        }
        let scale = data.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
        for i in 0..n {
            for j in 0..i {
                if (data[i * n + j] - data[j * n + i]).abs() > 1e-12 * scale {
                    return Err(Error::InvalidArgument(format!("not symmetric at ({i},{j})")));
                }
            }
        }
        Ok(Self { n, data })
    }

    pub fn from_diagonal(d: &[f64]) -> Self {
        let n = d.len();
        let mut data = vec![0.0; n * n];
        for (i, v) in d.iter().enumerate() {
            data[i * n + i] = *v;
        }
        Self { n, data }
    }

    pub fn from_csr(m: &CsrMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch { expected: m.nrows(), got: m.ncols() });
        }
        Self::new(m.nrows(), m.to_dense())
    }

    /// Symmetrizes `(M + Mᵀ)/2` without checking.
    pub fn from_matrix_symmetrized(m: &DMatrix<f64>) -> Self {
        let n = m.nrows();
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                data[i * n + j] = 0.5 * (m[(i, j)] + m[(j, i)]);
            }
        }
        Self { n, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.n, self.n, &self.data)
    }
}

/// Eigenvalues of a dense symmetric matrix, ascending.
pub fn dense_eig_sym(a: &DenseSym) -> Result<Vec<f64>> {
    if a.n > DENSE_CAP {
        return Err(Error::CapExceeded { n: a.n, cap: DENSE_CAP });
    }
    Ok(sym_eigenvalues(a.to_matrix()))
}

pub(crate) fn sym_eigenvalues(m: DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let mut ev: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Dense matrix whose columns are `op(e_j)`.
pub fn materialize(n: usize, op: impl Fn(&[f64]) -> Vec<f64>) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, n);
    let mut e = vec![0.0; n];
    for j in 0..n {
        e[j] = 1.0;
        let col = op(&e);
        assert_eq!(col.len(), n, "operator output has wrong length");
        m.set_column(j, &DVector::from_vec(col));
        e[j] = 0.0;
    }
    m
}

/// Orthonormal basis of the complement of `span(nullspace)`, as columns.
pub fn complement_basis(n: usize, nullspace: &[Vec<f64>]) -> DMatrix<f64> {
    if nullspace.is_empty() {
        return DMatrix::identity(n, n);
    }
    let z = DMatrix::from_fn(n, nullspace.len(), |i, j| nullspace[j][i]);
    // Gram-Schmidt on [Z | I] with reorthogonalization
    let mut q: Vec<DVector<f64>> = Vec::new();
    let mut out = Vec::new();
    let cand = (0..nullspace.len())
        .map(|j| z.column(j).into_owned())
        .chain((0..n).map(|i| {
            let mut e = DVector::zeros(n);
            e[i] = 1.0;
            e
        }));
    for (idx, mut v) in cand.enumerate() {
        for _ in 0..2 {
            for qj in &q {
                let c = qj.dot(&v);
                v.axpy(-c, qj, 1.0);
            }
        }
        let nv = v.norm();
        if nv > 1e-8 {
            v /= nv;
            if idx >= nullspace.len() {
                out.push(v.clone());
            }
            q.push(v);
        }
        if out.len() + nullspace.len() == n {
            break;
        }
    }
    DMatrix::from_columns(&out)
}

/// `κ = λ_max / λ_min` of the preconditioned operator `P⁻¹ A`, computed
/// densely. `apply_pinv` must be symmetric positive definite on the
/// complement of `nullspace`; `A` is restricted to the same complement.
pub fn gen_condition(
    a: &DMatrix<f64>,
    apply_pinv: impl Fn(&[f64]) -> Vec<f64>,
    nullspace: &[Vec<f64>],
) -> Result<f64> {
    let (lo, hi) = gen_extreme_eigenvalues(a, apply_pinv, nullspace)?;
    Ok(hi / lo)
}

/// Smallest and largest eigenvalue of `P⁻¹ A` on the complement of
/// `nullspace`.
pub fn gen_extreme_eigenvalues(
    a: &DMatrix<f64>,
    apply_pinv: impl Fn(&[f64]) -> Vec<f64>,
    nullspace: &[Vec<f64>],
) -> Result<(f64, f64)> {
    let ev = gen_eigenvalues(a, apply_pinv, nullspace)?;
    let lo = ev[0];
    let hi = *ev.last().unwrap();
    if !(lo > 0.0) {
        return Err(Error::NotSpd { row: 0, pivot: lo });
    }
    Ok((lo, hi))
}

/// All eigenvalues of `P⁻¹ A` restricted to the complement of `nullspace`.
pub fn gen_eigenvalues(
    a: &DMatrix<f64>,
    apply_pinv: impl Fn(&[f64]) -> Vec<f64>,
    nullspace: &[Vec<f64>],
) -> Result<Vec<f64>> {
    let n = a.nrows();
    if n > DENSE_CAP {
        return Err(Error::CapExceeded { n, cap: DENSE_CAP });
    }
    let q = complement_basis(n, nullspace);
    let pinv = materialize(n, apply_pinv);
    let pr = q.transpose() * &pinv * &q;
    let ar = q.transpose() * a * &q;
    let pr = DenseSym::from_matrix_symmetrized(&pr).to_matrix();
    let chol = pr
        .cholesky()
        .ok_or(Error::NotSpd { row: 0, pivot: f64::NAN })?;
    // P⁻¹A is similar to Lᵀ A L where P⁻¹ = L Lᵀ
    let l = chol.l();
    let sym = l.transpose() * ar * &l;
    let sym = DenseSym::from_matrix_symmetrized(&sym).to_matrix();
    Ok(sym_eigenvalues(sym))
}

/// Generalized eigenvalues `A x = θ B x` with `B` SPD, ascending.
pub fn gen_eig_pair(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<Vec<f64>> {
    let chol = DenseSym::from_matrix_symmetrized(b)
        .to_matrix()
        .cholesky()
        .ok_or(Error::NotSpd { row: 0, pivot: f64::NAN })?;
    let linv = chol
        .l()
        .try_inverse()
        .ok_or(Error::NotSpd { row: 0, pivot: 0.0 })?;
    let s = &linv * a * linv.transpose();
    Ok(sym_eigenvalues(DenseSym::from_matrix_symmetrized(&s).to_matrix()))
}
