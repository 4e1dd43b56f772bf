use crate::assembly::AuxSpace;
use crate::condense::CondensedSystem;
use crate::error::Result;
use crate::fespace::{EdgeProjector, ReferenceBasis};
use crate::linalg::{CsrMatrix, TripletBuilder};
use crate::mesh::Mesh;

/// Transfer `Π` from the vector P1 space to the free condensed velocity
/// DOFs: per edge, the L2 projection of the normal trace onto `u∂` and of
/// the tangential trace onto `û`.
///
/// Rows follow `cond.free`, columns the aux DOFs `2 * vertex + component`.
pub fn build_transfer(mesh: &Mesh, basis: &ReferenceBasis, cond: &CondensedSystem, aux: &AuxSpace) -> Result<CsrMatrix> {
    let split = *cond.split();
    let k = split.k;
    let mut position = vec![usize::MAX; split.n_condensed()];
    for (i, &d) in cond.free.iter().enumerate() {
        position[d] = i;
    }
    let proj = EdgeProjector::new(basis);
    let verts = mesh.vertices();
    let mut tb = TripletBuilder::with_capacity(cond.free.len(), aux.n(), mesh.n_edges() * 4 * (2 * k + 1));
    for (ei, edge) in mesh.edges().iter().enumerate() {
        for (end, &v) in edge.vertices.iter().enumerate() {
            let Some(fv) = aux.free_vertex[v] else { continue };
            let other = verts[edge.vertices[1 - end]];
            let (a, b) = (verts[v], other);
            let len2 = (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2);
            // hat function of `v` restricted to the edge
            let hat = |x: [f64; 2]| ((x[0] - b[0]) * (a[0] - b[0]) + (x[1] - b[1]) * (a[1] - b[1])) / len2;
            for c in 0..2 {
                let (normal, tang) = proj.project(mesh, basis, &cond.dofs, ei, |x| {
                    let h = hat(x);
                    if c == 0 {
                        [h, 0.0]
                    } else {
                        [0.0, h]
                    }
                })?;
                let col = 2 * fv + c;
                let rows = (0..=k).map(|i| split.ub(ei, i)).zip(normal);
                let rows = rows.chain((0..k).map(|j| split.uh(ei, j)).zip(tang));
                for (d, val) in rows {
                    if position[d] != usize::MAX && val.abs() > 1e-15 {
                        tb.push(position[d], col, val);
                    }
                }
            }
        }
    }
    Ok(tb.build())
}
