use crate::error::Result;
use crate::linalg::{SparseSym, TripletBuilder};
use crate::mesh::{BoundaryTag, Mesh};
use crate::problem::Problem;

/// Element-wise constant pressure operators: the mass `M` and the jump
/// operator `N` with `⟨N p, q⟩ = Σ_F (1/h_F) ⟨[p], [q]⟩_F`.
///
/// Here `h_F` is the distance between the centroids of the two elements
/// sharing `F` (on a boundary edge, twice the distance from the centroid
/// to the edge), the two-point flux length of finite volume schemes.
#[derive(Debug, Clone)]
pub struct PressureOps {
    /// diagonal of `M` (element areas)
    pub m: Vec<f64>,
    pub n: SparseSym,
    /// `N` has the constants as nullspace (no natural boundary)
    pub singular: bool,
}

/// Interior edges contribute jump terms; natural (outlet) boundary edges
/// contribute trace terms; essential boundary edges contribute nothing.
pub fn assemble_pressure_ops(mesh: &Mesh, problem: Problem) -> Result<PressureOps> {
    let nt = mesh.n_triangles();
    let m = (0..nt).map(|t| mesh.area(t)).collect();
    let mut tb = TripletBuilder::new(nt, nt);
    let mut natural = false;
    let centroid = |t: usize| {
        let p = mesh.triangle_points(t);
        [(p[0][0] + p[1][0] + p[2][0]) / 3.0, (p[0][1] + p[1][1] + p[2][1]) / 3.0]
    };
    for e in mesh.edges() {
        let cl = centroid(e.left);
        match e.right {
            Some(r) => {
                let cr = centroid(r);
                let w = e.length / (cl[0] - cr[0]).hypot(cl[1] - cr[1]);
                let l = e.left;
                tb.push(l, l, w);
                tb.push(r, r, w);
                tb.push(l, r, -w);
                tb.push(r, l, -w);
            }
            None if e.tag != BoundaryTag::Interior && !problem.is_essential(e.tag) => {
                natural = true;
                let m = e.midpoint(mesh.vertices());
                let dist = ((m[0] - cl[0]) * e.normal[0] + (m[1] - cl[1]) * e.normal[1]).abs();
                tb.push(e.left, e.left, e.length / (2.0 * dist));
            }
            None => {}
        }
    }
    Ok(PressureOps { m, n: SparseSym::from_csr_symmetrized(tb.build())?, singular: !natural })
}
