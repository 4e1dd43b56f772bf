//! Benchmark problems: domains and boundary data.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::mesh::{BoundaryTag, Mesh, Point};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Problem {
    /// Lid-driven cavity on the unit square.
    Cavity,
    /// Backward-facing step with parabolic inflow and a free outlet.
    Step,
    /// Steady linear elasticity on the cavity domain.
    ElastSteady,
    /// Unsteady (reaction-dominated) linear elasticity on the cavity domain.
    ElastUnsteady,
}

impl Problem {
    pub const ALL: [Problem; 4] = [Problem::Cavity, Problem::Step, Problem::ElastSteady, Problem::ElastUnsteady];

    pub fn name(self) -> &'static str {
        match self {
            Problem::Cavity => "cavity",
            Problem::Step => "step",
            Problem::ElastSteady => "elast-steady",
            Problem::ElastUnsteady => "elast-unsteady",
        }
    }

    /// Uniform mesh with `inv_h` cells per unit length.
    pub fn mesh(self, inv_h: usize) -> Result<Mesh> {
        match self {
            Problem::Step => Mesh::step_domain(inv_h),
            _ => Mesh::unit_square(inv_h),
        }
    }

    /// Prescribed velocity on an edge with the given tag, or `None` where
    /// the boundary condition is natural (and on interior edges).
    pub fn boundary_value(self, tag: BoundaryTag, x: Point) -> Option<[f64; 2]> {
        match tag {
            BoundaryTag::Interior | BoundaryTag::Outlet => None,
            BoundaryTag::Wall => Some([0.0, 0.0]),
            BoundaryTag::Lid => Some([4.0 * x[0] * (1.0 - x[0]), 0.0]),
            BoundaryTag::Inlet => Some([16.0 * (1.0 - x[1]) * (x[1] - 0.5), 0.0]),
        }
    }

    pub fn is_essential(self, tag: BoundaryTag) -> bool {
        !matches!(tag, BoundaryTag::Interior | BoundaryTag::Outlet)
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Problem {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Problem::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown problem '{s}'")))
    }
}
