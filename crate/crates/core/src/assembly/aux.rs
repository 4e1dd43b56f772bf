use crate::error::Result;
use crate::linalg::{SparseSym, TripletBuilder};
use crate::mesh::Mesh;
use crate::problem::Problem;

use super::params::ProblemParams;

/// Continuous vector P1 space vanishing on the essential-velocity boundary,
/// with its operator `a₀(u, v) = (2μ ∇u : ∇v + τ u·v)`.
#[derive(Debug, Clone)]
pub struct AuxSpace {
    /// free index of each mesh vertex (`None` on the essential boundary)
    pub free_vertex: Vec<Option<usize>>,
    pub n_free_vertices: usize,
    /// on DOFs `2 * free_vertex + component`
    pub a0: SparseSym,
}

impl AuxSpace {
    pub fn n(&self) -> usize {
        2 * self.n_free_vertices
    }
}

/// Vertices on an edge carrying essential velocity data.
pub fn essential_vertices(mesh: &Mesh, problem: Problem) -> Vec<bool> {
    let mut mark = vec![false; mesh.n_vertices()];
    for e in mesh.edges() {
        if e.is_boundary() && problem.is_essential(e.tag) {
            mark[e.vertices[0]] = true;
            mark[e.vertices[1]] = true;
        }
    }
    mark
}

/// Barycentric gradients of a triangle.
pub fn p1_gradients(p: [[f64; 2]; 3]) -> ([[f64; 2]; 3], f64) {
    let det = (p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]);
    let g = std::array::from_fn(|i| {
        let (a, b) = (p[(i + 1) % 3], p[(i + 2) % 3]);
        [(a[1] - b[1]) / det, (b[0] - a[0]) / det]
    });
    (g, 0.5 * det.abs())
}

pub fn assemble_aux(mesh: &Mesh, params: &ProblemParams, problem: Problem) -> Result<AuxSpace> {
    let ess = essential_vertices(mesh, problem);
    let mut free_vertex = vec![None; mesh.n_vertices()];
    let mut n_free = 0;
    for (v, e) in ess.iter().enumerate() {
        if !e {
            free_vertex[v] = Some(n_free);
            n_free += 1;
        }
    }
    let two_mu = 2.0 * params.mu;
    let mut tb = TripletBuilder::new(2 * n_free, 2 * n_free);
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let (g, area) = p1_gradients(mesh.triangle_points(t));
        for i in 0..3 {
            let Some(fi) = free_vertex[tri[i]] else { continue };
            for j in 0..3 {
                let Some(fj) = free_vertex[tri[j]] else { continue };
                let stiff = area * (g[i][0] * g[j][0] + g[i][1] * g[j][1]);
                let mass = area / 12.0 * if i == j { 2.0 } else { 1.0 };
                let v = two_mu * stiff + params.tau * mass;
                for c in 0..2 {
                    tb.push(2 * fi + c, 2 * fj + c, v);
                }
            }
        }
    }
    Ok(AuxSpace { free_vertex, n_free_vertices: n_free, a0: SparseSym::from_csr_symmetrized(tb.build())? })
}
