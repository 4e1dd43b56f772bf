//! Finite element spaces: hierarchical BDM_k velocities, tangential facet
//! unknowns, and discontinuous pressures.

pub mod piola;
pub mod poly;
pub mod reference;
pub mod space;

pub use piola::{map_piola, ElementGeometry, ElementTables, PhysicalEval, Tabulation};
pub use reference::{build_reference_bdm, FacetBasis, ReferenceBasis};
pub use space::{build_spaces, interpolate_essential, DofMap, EdgeProjector, EssentialBc, SpaceSplit};
