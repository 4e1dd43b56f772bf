//! Quadrature-based assembly of the bilinear forms.

pub mod aux;
pub mod params;
pub mod pressure;
pub mod projection;
pub mod saddle;

pub use aux::{assemble_aux, essential_vertices, AuxSpace};
pub use params::{ProblemParams, DEFAULT_ALPHA};
pub use pressure::{assemble_pressure_ops, PressureOps};
pub use projection::FacetProjection;
pub use saddle::{assemble_saddle, BlockSystem, BodyForce, ElementBlock, GlobalMatrices, ReducedSystem};
