//! Element geometry, reference tabulation, and the contravariant Piola map.

use super::reference::{ref_edge_point, ReferenceBasis, REF_EDGES};
use crate::error::{Error, Result};
use crate::mesh::{Mesh, Point};
use crate::quadrature::{LineRule, TriangleRule};

pub type Mat2 = [[f64; 2]; 2];

fn matvec(a: &Mat2, v: [f64; 2]) -> [f64; 2] {
    [a[0][0] * v[0] + a[0][1] * v[1], a[1][0] * v[0] + a[1][1] * v[1]]
}

fn matmul(a: &Mat2, b: &Mat2) -> Mat2 {
    std::array::from_fn(|i| std::array::from_fn(|j| a[i][0] * b[0][j] + a[i][1] * b[1][j]))
}

/// Affine map from the reference triangle, with vertices taken in
/// ascending global order.
#[derive(Debug, Clone)]
pub struct ElementGeometry {
    pub element: usize,
    /// sorted global vertex indices
    pub vertices: [usize; 3],
    pub points: [Point; 3],
    /// global edge of local edge `i` (opposite local vertex `i`)
    pub edges: [usize; 3],
    pub jac: Mat2,
    pub jinv: Mat2,
    pub det: f64,
}

impl ElementGeometry {
    pub fn new(mesh: &Mesh, t: usize) -> Result<Self> {
        let tri = mesh.triangles()[t];
        let mut vertices = tri;
        vertices.sort_unstable();
        let points = vertices.map(|v| mesh.vertices()[v]);
        let edges = vertices.map(|v| {
            let j = tri.iter().position(|&w| w == v).expect("vertex of its own triangle");
            mesh.tri_edges()[t][j]
        });
        let [p0, p1, p2] = points;
        let jac = [[p1[0] - p0[0], p2[0] - p0[0]], [p1[1] - p0[1], p2[1] - p0[1]]];
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        let scale = mesh.diameter(t).powi(2);
        if det.abs() <= 1e-14 * scale {
            return Err(Error::DegenerateElement { element: t, det });
        }
        let jinv = [[jac[1][1] / det, -jac[0][1] / det], [-jac[1][0] / det, jac[0][0] / det]];
        Ok(Self { element: t, vertices, points, edges, jac, jinv, det })
    }

    pub fn map(&self, xi: [f64; 2]) -> Point {
        let d = matvec(&self.jac, xi);
        [self.points[0][0] + d[0], self.points[0][1] + d[1]]
    }

    pub fn area(&self) -> f64 {
        0.5 * self.det.abs()
    }
}

/// Basis values, gradients and divergences at a set of points.
#[derive(Debug, Clone)]
pub struct Tabulation {
    pub points: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
    /// `val[f][q]`
    pub val: Vec<Vec<[f64; 2]>>,
    /// `grad[f][q][i][j] = ∂_j v_i`
    pub grad: Vec<Vec<Mat2>>,
    pub div: Vec<Vec<f64>>,
    /// pressure modes `pres[m][q]` (scalar, unmapped)
    pub pres: Vec<Vec<f64>>,
}

impl Tabulation {
    pub fn new(basis: &ReferenceBasis, points: Vec<[f64; 2]>, weights: Vec<f64>) -> Self {
        let eval_all = |f: &dyn Fn(&[f64; 2]) -> f64| points.iter().map(f).collect::<Vec<f64>>();
        let mut val = Vec::new();
        let mut grad = Vec::new();
        let mut div = Vec::new();
        for (v, d) in basis.functions().iter().zip(basis.divergences()) {
            let g = v.gradient();
            val.push(points.iter().map(|p| v.eval(*p)).collect());
            grad.push(
                points
                    .iter()
                    .map(|p| [[g[0][0].eval(*p), g[0][1].eval(*p)], [g[1][0].eval(*p), g[1][1].eval(*p)]])
                    .collect(),
            );
            div.push(eval_all(&|p| d.eval(*p)));
        }
        let pres = basis.pressure_modes().iter().map(|q| eval_all(&|p| q.eval(*p))).collect();
        Self { points, weights, val, grad, div, pres }
    }

    pub fn n_points(&self) -> usize {
        self.points.len()
    }
}

/// Reference tabulations on the element interior and on each local edge.
#[derive(Debug, Clone)]
pub struct ElementTables {
    pub volume: Tabulation,
    /// edge tabulations; weights integrate over the parameter `s ∈ [0, 1]`
    pub edges: [Tabulation; 3],
    /// edge parameters of the edge quadrature points
    pub edge_params: Vec<f64>,
}

impl ElementTables {
    /// Rules exact to `degree` on the element and on edges.
    pub fn new(basis: &ReferenceBasis, degree: usize) -> Self {
        let tri = TriangleRule::with_degree(degree);
        let line = LineRule::with_degree(degree);
        let volume = Tabulation::new(basis, tri.points, tri.weights);
        let edges = std::array::from_fn(|e| {
            let pts = line.points.iter().map(|&s| ref_edge_point(e, s)).collect();
            Tabulation::new(basis, pts, line.weights.clone())
        });
        Self { volume, edges, edge_params: line.points }
    }
}

/// Physical basis evaluations on one element (or one of its edges).
#[derive(Debug, Clone)]
pub struct PhysicalEval {
    pub points: Vec<Point>,
    /// physical quadrature weights
    pub weights: Vec<f64>,
    pub val: Vec<Vec<[f64; 2]>>,
    pub grad: Vec<Vec<Mat2>>,
    pub div: Vec<Vec<f64>>,
}

/// Contravariant Piola map `v = J v̂ / det J`; `measure` converts the
/// reference weights to physical ones (`|det J|` on the element, the edge
/// length on an edge).
pub fn map_piola(tab: &Tabulation, geom: &ElementGeometry, measure: f64) -> PhysicalEval {
    let inv_det = 1.0 / geom.det;
    let points = tab.points.iter().map(|p| geom.map(*p)).collect();
    let weights = tab.weights.iter().map(|w| w * measure).collect();
    let val = tab
        .val
        .iter()
        .map(|fv| fv.iter().map(|v| matvec(&geom.jac, *v).map(|c| c * inv_det)).collect())
        .collect();
    let grad = tab
        .grad
        .iter()
        .map(|fg| {
            fg.iter()
                .map(|g| matmul(&matmul(&geom.jac, g), &geom.jinv).map(|r| r.map(|c| c * inv_det)))
                .collect()
        })
        .collect();
    let div = tab.div.iter().map(|fd| fd.iter().map(|d| d * inv_det).collect()).collect();
    PhysicalEval { points, weights, val, grad, div }
}

/// Physical length of local edge `e`.
pub fn edge_length(geom: &ElementGeometry, e: usize) -> f64 {
    let [a, b] = REF_EDGES[e];
    let (pa, pb) = (geom.points[a], geom.points[b]);
    (pb[0] - pa[0]).hypot(pb[1] - pa[1])
}
