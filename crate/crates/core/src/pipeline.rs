//! Mesh-to-condensed-system setup shared by the driver and the tests.

use crate::assembly::{assemble_saddle, BlockSystem, BodyForce, ProblemParams};
use crate::condense::FullSolution;
use crate::condense::{eliminate_local, CondensedSystem};
use crate::error::Result;
use crate::fespace::{build_reference_bdm, build_spaces, interpolate_essential, map_piola, ElementTables, ReferenceBasis};
use crate::mesh::{Mesh, Point};
use crate::problem::Problem;

#[derive(Debug, Clone)]
pub struct Discretization {
    pub problem: Problem,
    pub mesh: Mesh,
    pub basis: ReferenceBasis,
    pub block: BlockSystem,
    pub cond: CondensedSystem,
}

impl Discretization {
    /// Builds spaces, boundary data, the saddle point system and its
    /// condensation on `mesh`.
    pub fn new(problem: Problem, mesh: Mesh, params: ProblemParams, force: Option<BodyForce<'_>>) -> Result<Self> {
        let basis = build_reference_bdm(params.k)?;
        let (_, dofs) = build_spaces(&mesh, params.k)?;
        let bc = interpolate_essential(&mesh, &basis, &dofs, problem)?;
        let block = assemble_saddle(&mesh, &basis, dofs, params, bc, force)?;
        let cond = eliminate_local(&block)?;
        Ok(Self { problem, mesh, basis, block, cond })
    }

    /// The benchmark mesh with `inv_h` cells per unit length.
    pub fn benchmark(problem: Problem, inv_h: usize, params: ProblemParams) -> Result<Self> {
        Self::new(problem, problem.mesh(inv_h)?, params, None)
    }
}

/// Element-wise quadrature samples of a discrete solution.
#[derive(Debug, Clone)]
pub struct FieldSamples {
    pub points: Vec<Point>,
    pub weights: Vec<f64>,
    pub velocity: Vec<[f64; 2]>,
    pub divergence: Vec<f64>,
    pub pressure: Vec<f64>,
}

impl Discretization {
    /// Evaluates `sol` at a degree `degree` quadrature on every element.
    pub fn sample(&self, sol: &FullSolution, degree: usize) -> FieldSamples {
        let tables = ElementTables::new(&self.basis, degree);
        let dofs = &self.block.dofs;
        let mut out = FieldSamples {
            points: Vec::new(),
            weights: Vec::new(),
            velocity: Vec::new(),
            divergence: Vec::new(),
            pressure: Vec::new(),
        };
        for t in 0..dofs.n_elements() {
            let geom = dofs.geometry(t);
            let ev = map_piola(&tables.volume, geom, geom.det.abs());
            let vd = dofs.element_velocity(t);
            let pd = dofs.element_pressure(t);
            for q in 0..ev.weights.len() {
                let mut u = [0.0; 2];
                let mut div = 0.0;
                for f in 0..self.basis.n_functions() {
                    let c = sol.velocity[vd[dofs.local_of_bdm(f)]];
                    u[0] += c * ev.val[f][q][0];
                    u[1] += c * ev.val[f][q][1];
                    div += c * ev.div[f][q];
                }
                let p = pd.iter().enumerate().map(|(m, &d)| sol.pressure[d] * tables.volume.pres[m][q]).sum();
                out.points.push(ev.points[q]);
                out.weights.push(ev.weights[q]);
                out.velocity.push(u);
                out.divergence.push(div);
                out.pressure.push(p);
            }
        }
        out
    }
}

impl FieldSamples {
    pub fn velocity_l2_error(&self, exact: impl Fn(Point) -> [f64; 2]) -> f64 {
        let s: f64 = (0..self.points.len())
            .map(|q| {
                let e = exact(self.points[q]);
                let d = [self.velocity[q][0] - e[0], self.velocity[q][1] - e[1]];
                self.weights[q] * (d[0] * d[0] + d[1] * d[1])
            })
            .sum();
        s.sqrt()
    }

    /// L2 pressure error after removing the mean of the difference.
    pub fn pressure_l2_error(&self, exact: impl Fn(Point) -> f64) -> f64 {
        let d: Vec<f64> = (0..self.points.len()).map(|q| self.pressure[q] - exact(self.points[q])).collect();
        let area: f64 = self.weights.iter().sum();
        let mean = d.iter().zip(&self.weights).map(|(x, w)| x * w).sum::<f64>() / area;
        d.iter().zip(&self.weights).map(|(x, w)| w * (x - mean).powi(2)).sum::<f64>().sqrt()
    }
}
