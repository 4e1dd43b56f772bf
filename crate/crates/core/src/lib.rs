pub mod assembly;
pub mod condense;
pub mod error;
pub mod experiment;
pub mod fespace;
pub mod krylov;
pub mod linalg;
pub mod mesh;
pub mod pipeline;
pub mod precond;
pub mod problem;
pub mod quadrature;
pub mod verify;

pub use error::{Error, Result};
pub use mesh::{BoundaryTag, Mesh};
pub use problem::Problem;
