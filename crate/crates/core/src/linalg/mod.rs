//! Sparse and dense symmetric linear algebra.

pub mod deflate;
pub mod dense;
pub mod ldlt;
pub mod sparse;

pub use deflate::{solve_deflated, DeflatedSolver};
pub use dense::{dense_eig_sym, gen_condition, DenseSym, DENSE_CAP};
pub use ldlt::{factor_spd, SpdFactor, PIVOT_TOL};
pub use sparse::{axpy, dot, norm2, spmv, CsrMatrix, SparseSym, TripletBuilder};
