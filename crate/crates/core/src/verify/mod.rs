//! Dense reference computations and spectral oracles used by the
//! verification suite and the tests.

pub mod dense;
pub mod oracles;
pub mod suite;

pub use dense::{
    condensed_matrix, schur_condensed, schur_monolithic, solve_bordered, solve_condensed_dense, solve_monolithic_dense,
    to_dense,
};
pub use oracles::{asp_spectrum, norm_matrix, pressure_nullspace, schur_spectrum, woodbury_roundtrip, Spectrum};
pub use suite::{inf_sup_reaction, inf_sup_viscous, run_verification, Check, KappaTable, Level};
