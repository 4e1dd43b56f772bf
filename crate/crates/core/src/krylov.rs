//! Preconditioned MINRES for symmetric indefinite systems.

use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::condense::CondensedSystem;
use crate::error::{Error, Result};
use crate::linalg::{axpy, dot};
use crate::precond::schur::remove_mean;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinresOptions {
    /// stop when the preconditioned residual norm drops below
    /// `tol` times its initial value
    pub tol: f64,
    pub maxit: usize,
    /// seed of the uniform(-1, 1) initial guess
    pub seed: u64,
}

impl Default for MinresOptions {
    fn default() -> Self {
        Self { tol: 1e-8, maxit: 1000, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinresResult {
    pub x: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// preconditioned residual norms relative to the initial one; entry 0
    /// is 1 and entry `i` follows iteration `i`
    pub history: Vec<f64>,
}

impl MinresResult {
    pub fn final_relres(&self) -> f64 {
        *self.history.last().unwrap_or(&f64::NAN)
    }
}

/// Random initial guess, uniform in `(-1, 1)`.
pub fn random_guess(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

/// Solves `K x = b` with the SPD preconditioner `apply_pinv`, starting
/// from `x0`. Fails with [`Error::Breakdown`] when the preconditioner is
/// detected to be indefinite.
pub fn minres(
    apply_k: impl Fn(&[f64]) -> Result<Vec<f64>>,
    apply_pinv: impl Fn(&[f64]) -> Result<Vec<f64>>,
    b: &[f64],
    x0: Vec<f64>,
    opts: &MinresOptions,
) -> Result<MinresResult> {
    let n = b.len();
    if x0.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: x0.len() });
    }
    let mut x = x0;
    let kx = apply_k(&x)?;
    let mut r1: Vec<f64> = b.iter().zip(&kx).map(|(b, k)| b - k).collect();
    let mut y = apply_pinv(&r1)?;
    let beta1sq = dot(&r1, &y);
    if beta1sq < 0.0 {
        return Err(Error::Breakdown(beta1sq));
    }
    let beta1 = beta1sq.sqrt();
    let mut history = vec![1.0];
    if beta1 == 0.0 {
        return Ok(MinresResult { x, iterations: 0, converged: true, history });
    }

    // Paige-Saunders recurrences
    let mut r2 = r1.clone();
    let mut oldb = 0.0;
    let mut beta = beta1;
    let mut dbar = 0.0;
    let mut epsln = 0.0;
    let mut phibar = beta1;
    let mut cs = -1.0;
    let mut sn = 0.0;
    let mut w = vec![0.0; n];
    let mut w2 = vec![0.0; n];
    let mut converged = false;
    let mut iterations = 0;

    for itn in 1..=opts.maxit {
        let s = 1.0 / beta;
        let v: Vec<f64> = y.iter().map(|yi| s * yi).collect();
        let mut yk = apply_k(&v)?;
        if itn >= 2 {
            axpy(-beta / oldb, &r1, &mut yk);
        }
        let alfa = dot(&v, &yk);
        axpy(-alfa / beta, &r2, &mut yk);
        r1 = std::mem::replace(&mut r2, yk);
        y = apply_pinv(&r2)?;
        oldb = beta;
        let bsq = dot(&r2, &y);
        if bsq < 0.0 {
            return Err(Error::Breakdown(bsq));
        }
        beta = bsq.sqrt();

        let oldeps = epsln;
        let delta = cs * dbar + sn * alfa;
        let gbar = sn * dbar - cs * alfa;
        epsln = sn * beta;
        dbar = -cs * beta;

        let gamma = gbar.hypot(beta).max(f64::MIN_POSITIVE);
        cs = gbar / gamma;
        sn = beta / gamma;
        let phi = cs * phibar;
        phibar *= sn;

        let denom = 1.0 / gamma;
        let w1 = std::mem::replace(&mut w2, std::mem::take(&mut w));
        w = v.iter().zip(&w1).zip(&w2).map(|((vi, a), b)| (vi - oldeps * a - delta * b) * denom).collect();
        axpy(phi, &w, &mut x);

        iterations = itn;
        let rel = phibar.abs() / beta1;
        history.push(rel);
        if rel <= opts.tol {
            converged = true;
            break;
        }
        if beta == 0.0 {
            // exact invariant subspace reached
            converged = true;
            break;
        }
    }
    Ok(MinresResult { x, iterations, converged, history })
}

/// Action of the condensed system, with the p̄ block projected onto
/// mean-zero vectors when the pressure is only determined up to a constant.
pub fn operator_condensed(cond: &CondensedSystem) -> impl Fn(&[f64]) -> Result<Vec<f64>> + '_ {
    move |x: &[f64]| {
        if x.len() != cond.n() {
            return Err(Error::DimensionMismatch { expected: cond.n(), got: x.len() });
        }
        let mut y = cond.apply(x);
        if cond.mean_zero {
            remove_mean(&mut y[cond.n_velocity()..]);
        }
        Ok(y)
    }
}

/// Right-hand side and initial guess for [`minres`] on the condensed
/// system, projected consistently with [`operator_condensed`].
pub fn condensed_start(cond: &CondensedSystem, seed: u64) -> (Vec<f64>, Vec<f64>) {
    let nu = cond.n_velocity();
    let mut b = cond.rhs();
    let mut x0 = random_guess(cond.n(), seed);
    if cond.mean_zero {
        remove_mean(&mut b[nu..]);
        remove_mean(&mut x0[nu..]);
    }
    (b, x0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(d: Vec<f64>) -> impl Fn(&[f64]) -> Result<Vec<f64>> {
        move |x: &[f64]| Ok(x.iter().zip(&d).map(|(a, b)| a * b).collect())
    }

    fn ident(x: &[f64]) -> Result<Vec<f64>> {
        Ok(x.to_vec())
    }

    #[test]
    fn identity_one_step() {
        let r = minres(ident, ident, &[1.0, 2.0, 3.0], vec![0.0; 3], &MinresOptions::default()).unwrap();
        assert_eq!(r.iterations, 1);
        assert!(r.converged);
        assert!((r.x[2] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn diagonal_finite_termination() {
        let b = [1.0, 1.0, 1.0];
        let r = minres(diag(vec![1.0, 2.0, 3.0]), ident, &b, vec![0.0; 3], &MinresOptions::default()).unwrap();
        assert!(r.converged && r.iterations <= 3);
        assert!((r.x[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn indefinite_diagonal_with_preconditioner() {
        let d = vec![4.0, -1.0, 9.0, -16.0, 2.0];
        let inv: Vec<f64> = d.iter().map(|x: &f64| 1.0 / x.abs()).collect();
        let b = [1.0, 2.0, 3.0, 4.0, 5.0];
        let r = minres(diag(d.clone()), diag(inv), &b, random_guess(5, 3), &MinresOptions::default()).unwrap();
        assert!(r.converged && r.iterations <= 2, "{}", r.iterations);
        for i in 0..5 {
            assert!((r.x[i] * d[i] - b[i]).abs() < 1e-9);
        }
    }

    #[test]
    fn indefinite_preconditioner_breaks_down() {
        let b = [1.0, 2.0];
        let e = minres(ident, diag(vec![1.0, -1.0]), &b, vec![0.0, 0.0], &MinresOptions::default());
        assert!(matches!(e, Err(Error::Breakdown(_))));
    }

    #[test]
    fn seeded_guess_is_reproducible() {
        assert_eq!(random_guess(10, 7), random_guess(10, 7));
        assert_ne!(random_guess(10, 7), random_guess(10, 8));
        assert!(random_guess(1000, 1).iter().all(|v| v.abs() < 1.0));
    }
}
