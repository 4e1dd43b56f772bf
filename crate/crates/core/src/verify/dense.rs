//! Dense reference computations at verification scale.

use nalgebra::{DMatrix, DVector};

use crate::assembly::BlockSystem;
use crate::condense::{build_monolithic, CondensedSystem, FullSolution};
use crate::error::{Error, Result};
use crate::linalg::{CsrMatrix, DENSE_CAP};

pub fn to_dense(m: &CsrMatrix) -> DMatrix<f64> {
    DMatrix::from_row_slice(m.nrows(), m.ncols(), &m.to_dense())
}

fn check_cap(n: usize) -> Result<()> {
    if n > DENSE_CAP {
        Err(Error::CapExceeded { n, cap: DENSE_CAP })
    } else {
        Ok(())
    }
}

/// Solves `m x = rhs`, optionally under the extra constraint `cᵀ x = 0`
/// imposed through a Lagrange multiplier.
pub fn solve_bordered(m: &DMatrix<f64>, rhs: &DVector<f64>, constraint: Option<&DVector<f64>>) -> Result<DVector<f64>> {
    let n = m.nrows();
    let singular = || Error::InvalidArgument("dense reference system is singular".into());
    match constraint {
        None => m.clone().lu().solve(rhs).ok_or_else(singular),
        Some(c) => {
            let mut big = DMatrix::<f64>::zeros(n + 1, n + 1);
            big.view_mut((0, 0), (n, n)).copy_from(m);
            big.view_mut((0, n), (n, 1)).copy_from(c);
            big.view_mut((n, 0), (1, n)).copy_from(&c.transpose());
            let mut r = DVector::<f64>::zeros(n + 1);
            r.rows_mut(0, n).copy_from(rhs);
            let x = big.lu().solve(&r).ok_or_else(singular)?;
            Ok(x.rows(0, n).into_owned())
        }
    }
}

/// Dense condensed matrix `[[A_g, B_g], [B_gᵀ, C_g]]`.
pub fn condensed_matrix(cond: &CondensedSystem) -> Result<DMatrix<f64>> {
    let (nu, np) = (cond.n_velocity(), cond.n_pressure());
    check_cap(nu + np)?;
    let mut m = DMatrix::<f64>::zeros(nu + np, nu + np);
    m.view_mut((0, 0), (nu, nu)).copy_from(&to_dense(cond.a_g.csr()));
    let b = to_dense(&cond.b_g);
    m.view_mut((0, nu), (nu, np)).copy_from(&b);
    m.view_mut((nu, 0), (np, nu)).copy_from(&b.transpose());
    m.view_mut((nu, nu), (np, np)).copy_from(&to_dense(cond.c_g.csr()));
    Ok(m)
}

/// Direct solve of the condensed system; when the pressure is only
/// determined up to a constant, the p̄ entries are constrained to sum to 0.
pub fn solve_condensed_dense(cond: &CondensedSystem) -> Result<Vec<f64>> {
    let m = condensed_matrix(cond)?;
    let rhs = DVector::from_vec(cond.rhs());
    let c = cond.mean_zero.then(|| {
        DVector::from_fn(cond.n(), |i, _| if i >= cond.n_velocity() { 1.0 } else { 0.0 })
    });
    Ok(solve_bordered(&m, &rhs, c.as_ref())?.as_slice().to_vec())
}

/// Direct solve of the uncondensed saddle point system.
pub fn solve_monolithic_dense(sys: &BlockSystem, mean_zero: bool) -> Result<FullSolution> {
    let mono = build_monolithic(sys)?;
    let nu = mono.free.len();
    let split = sys.split();
    let c = mean_zero.then(|| {
        DVector::from_fn(mono.matrix.nrows(), |i, _| if i >= nu && i < nu + split.n_pb() { 1.0 } else { 0.0 })
    });
    let x = solve_bordered(&mono.matrix, &mono.rhs, c.as_ref())?;
    let mut velocity = sys.bc.lift();
    for (i, &d) in mono.free.iter().enumerate() {
        velocity[d] = x[i];
    }
    Ok(FullSolution { velocity, pressure: x.rows(nu, mono.n_pressure).iter().copied().collect() })
}

/// Schur complement onto p̄ of the uncondensed system,
/// `S′ = -C_p̄ + K_{p̄W} K_WW⁻¹ K_{Wp̄}` with `W` = (free velocity, p^o).
pub fn schur_monolithic(sys: &BlockSystem) -> Result<DMatrix<f64>> {
    let mono = build_monolithic(sys)?;
    let nu = mono.free.len();
    let npb = sys.split().n_pb();
    let n = mono.matrix.nrows();
    let w: Vec<usize> = (0..nu).chain(nu + npb..n).collect();
    let p: Vec<usize> = (nu..nu + npb).collect();
    let sub = |r: &[usize], c: &[usize]| DMatrix::from_fn(r.len(), c.len(), |i, j| mono.matrix[(r[i], c[j])]);
    let kww = sub(&w, &w);
    let kwp = sub(&w, &p);
    let kpp = sub(&p, &p);
    let x = kww.lu().solve(&kwp).ok_or_else(|| Error::InvalidArgument("singular velocity block".into()))?;
    Ok(-kpp + kwp.transpose() * x)
}

/// `S_g = -C_g + B_gᵀ A_g⁻¹ B_g`
pub fn schur_condensed(cond: &CondensedSystem) -> Result<DMatrix<f64>> {
    check_cap(cond.n())?;
    let a = to_dense(cond.a_g.csr());
    let b = to_dense(&cond.b_g);
    let c = to_dense(cond.c_g.csr());
    let x = a.cholesky().ok_or(Error::NotSpd { row: 0, pivot: 0.0 })?.solve(&b);
    Ok(-c + b.transpose() * x)
}
