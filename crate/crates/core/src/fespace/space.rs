//! Global DOF numbering and essential boundary data.

use std::ops::Range;

use nalgebra::{DMatrix, DVector};

use super::piola::{map_piola, ElementGeometry, ElementTables};
use super::reference::{FacetBasis, ReferenceBasis};
use crate::error::{Error, Result};
use crate::mesh::{Mesh, Point};
use crate::problem::Problem;

/// Sizes and index ranges of the split spaces.
///
/// Velocity unknowns are numbered `[u∂ | û | u^o]`, so the condensed
/// system lives on the leading `u∂ ⊕ û` block. Pressure unknowns are
/// numbered `[p̄ | p^o]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpaceSplit {
    pub k: usize,
    pub n_edges: usize,
    pub n_elements: usize,
}

impl SpaceSplit {
    pub fn new(k: usize, n_edges: usize, n_elements: usize) -> Self {
        Self { k, n_edges, n_elements }
    }

    pub fn n_ub(&self) -> usize {
        (self.k + 1) * self.n_edges
    }

    pub fn n_uh(&self) -> usize {
        self.k * self.n_edges
    }

    pub fn n_uo(&self) -> usize {
        (self.k * self.k - 1) * self.n_elements
    }

    pub fn n_pb(&self) -> usize {
        self.n_elements
    }

    pub fn n_po_per_element(&self) -> usize {
        self.k * (self.k + 1) / 2 - 1
    }

    pub fn n_po(&self) -> usize {
        self.n_po_per_element() * self.n_elements
    }

    pub fn n_velocity(&self) -> usize {
        self.n_ub() + self.n_uh() + self.n_uo()
    }

    pub fn n_pressure(&self) -> usize {
        self.n_pb() + self.n_po()
    }

    /// `u∂ ⊕ û`
    pub fn n_condensed(&self) -> usize {
        self.n_ub() + self.n_uh()
    }

    pub fn ub_range(&self) -> Range<usize> {
        0..self.n_ub()
    }

    pub fn uh_range(&self) -> Range<usize> {
        self.n_ub()..self.n_condensed()
    }

    pub fn uo_range(&self) -> Range<usize> {
        self.n_condensed()..self.n_velocity()
    }

    pub fn pb_range(&self) -> Range<usize> {
        0..self.n_pb()
    }

    pub fn po_range(&self) -> Range<usize> {
        self.n_pb()..self.n_pressure()
    }

    pub fn ub(&self, edge: usize, i: usize) -> usize {
        edge * (self.k + 1) + i
    }

    pub fn uh(&self, edge: usize, j: usize) -> usize {
        self.n_ub() + edge * self.k + j
    }

    pub fn uo(&self, t: usize, l: usize) -> usize {
        self.n_condensed() + t * (self.k * self.k - 1) + l
    }

    pub fn pb(&self, t: usize) -> usize {
        t
    }

    pub fn po(&self, t: usize, l: usize) -> usize {
        self.n_pb() + t * self.n_po_per_element() + l
    }
}

/// Element-to-global maps.
///
/// The local velocity layout of an element is `[facet BDM (3(k+1)) | û
/// (3k) | interior BDM (k²-1)]`, each facet block in local-edge order. No
/// orientation signs are needed: facet functions are defined from the
/// global vertex order and so coincide on shared edges.
#[derive(Debug, Clone)]
pub struct DofMap {
    split: SpaceSplit,
    velocity: Vec<Vec<usize>>,
    pressure: Vec<Vec<usize>>,
    geometry: Vec<ElementGeometry>,
}

impl DofMap {
    pub fn split(&self) -> &SpaceSplit {
        &self.split
    }

    pub fn element_velocity(&self, t: usize) -> &[usize] {
        &self.velocity[t]
    }

    /// `[p̄, p^o_1, …]`
    pub fn element_pressure(&self, t: usize) -> &[usize] {
        &self.pressure[t]
    }

    pub fn geometry(&self, t: usize) -> &ElementGeometry {
        &self.geometry[t]
    }

    pub fn n_elements(&self) -> usize {
        self.velocity.len()
    }

    /// Normal (u∂) and tangential (û) DOFs of an edge.
    pub fn edge_dofs(&self, edge: usize) -> (Vec<usize>, Vec<usize>) {
        let k = self.split.k;
        ((0..=k).map(|i| self.split.ub(edge, i)).collect(), (0..k).map(|j| self.split.uh(edge, j)).collect())
    }

    /// Position in the local velocity layout of reference BDM function `f`.
    pub fn local_of_bdm(&self, f: usize) -> usize {
        let nf = 3 * (self.split.k + 1);
        if f < nf {
            f
        } else {
            f + 3 * self.split.k
        }
    }

    /// Position in the local velocity layout of tangential mode `j` on
    /// local edge `e`.
    pub fn local_of_facet(&self, e: usize, j: usize) -> usize {
        3 * (self.split.k + 1) + e * self.split.k + j
    }
}

pub fn build_spaces(mesh: &Mesh, k: usize) -> Result<(SpaceSplit, DofMap)> {
    if k == 0 {
        return Err(Error::InvalidArgument("polynomial degree must be at least 1".into()));
    }
    let split = SpaceSplit::new(k, mesh.n_edges(), mesh.n_triangles());
    let mut velocity = Vec::with_capacity(split.n_elements);
    let mut pressure = Vec::with_capacity(split.n_elements);
    let mut geometry = Vec::with_capacity(split.n_elements);
    for t in 0..split.n_elements {
        let g = ElementGeometry::new(mesh, t)?;
        let mut v = Vec::with_capacity((k + 1) * (k + 2) + 3 * k);
        for e in g.edges {
            v.extend((0..=k).map(|i| split.ub(e, i)));
        }
        for e in g.edges {
            v.extend((0..k).map(|j| split.uh(e, j)));
        }
        v.extend((0..k * k - 1).map(|l| split.uo(t, l)));
        velocity.push(v);
        let mut p = vec![split.pb(t)];
        p.extend((0..split.n_po_per_element()).map(|l| split.po(t, l)));
        pressure.push(p);
        geometry.push(g);
    }
    Ok((split, DofMap { split, velocity, pressure, geometry }))
}

/// Prescribed velocity DOFs.
#[derive(Debug, Clone, Default)]
pub struct EssentialBc {
    /// sorted global velocity indices
    pub dofs: Vec<usize>,
    pub values: Vec<f64>,
    /// `mask[i]` for every velocity DOF
    pub mask: Vec<bool>,
}

impl EssentialBc {
    /// Essential values scattered into a full velocity vector.
    pub fn lift(&self) -> Vec<f64> {
        let mut g = vec![0.0; self.mask.len()];
        for (d, v) in self.dofs.iter().zip(&self.values) {
            g[*d] = *v;
        }
        g
    }

    pub fn is_essential(&self, dof: usize) -> bool {
        self.mask[dof]
    }
}

/// L2 projection of a vector field, edge by edge, onto the normal traces
/// of the facet BDM functions and onto the tangential facet modes.
#[derive(Debug, Clone)]
pub struct EdgeProjector {
    k: usize,
    tables: ElementTables,
    facet: FacetBasis,
}

impl EdgeProjector {
    pub fn new(basis: &ReferenceBasis) -> Self {
        let k = basis.k();
        Self { k, tables: ElementTables::new(basis, 2 * k + 2), facet: FacetBasis::new(k) }
    }

    /// Coefficients of the `k + 1` normal DOFs and the `k` tangential DOFs
    /// of edge `ei` for the field `g`.
    pub fn project(
        &self,
        mesh: &Mesh,
        basis: &ReferenceBasis,
        dofs: &DofMap,
        ei: usize,
        g: impl Fn(Point) -> [f64; 2],
    ) -> Result<(Vec<f64>, Vec<f64>)> {
        let k = self.k;
        let edge = &mesh.edges()[ei];
        let geom = dofs.geometry(edge.left);
        let le = geom.edges.iter().position(|&e| e == ei).expect("edge of its element");
        let ev = map_piola(&self.tables.edges[le], geom, edge.length);
        let n = edge.normal;
        let t = edge.tangent(mesh.vertices());
        let gq: Vec<[f64; 2]> = ev.points.iter().map(|x| g(*x)).collect();
        let nq = ev.weights.len();

        let fs: Vec<usize> = (0..=k).map(|i| basis.facet_index(le, i)).collect();
        let trace = |f: usize, q: usize| ev.val[f][q][0] * n[0] + ev.val[f][q][1] * n[1];
        let gram = DMatrix::from_fn(k + 1, k + 1, |i, j| {
            (0..nq).map(|q| ev.weights[q] * trace(fs[i], q) * trace(fs[j], q)).sum()
        });
        let rhs = DVector::from_fn(k + 1, |i, _| {
            (0..nq).map(|q| ev.weights[q] * (gq[q][0] * n[0] + gq[q][1] * n[1]) * trace(fs[i], q)).sum()
        });
        let c = gram.lu().solve(&rhs).ok_or(Error::SingularLocalBlock { element: edge.left })?;
        let tang = (0..k)
            .map(|j| {
                let s: f64 = (0..nq)
                    .map(|q| {
                        self.tables.edges[le].weights[q]
                            * (gq[q][0] * t[0] + gq[q][1] * t[1])
                            * self.facet.eval(j, self.tables.edge_params[q])
                    })
                    .sum();
                s / self.facet.norm_sq(j)
            })
            .collect();
        Ok((c.as_slice().to_vec(), tang))
    }
}

/// L2 projections of the boundary data onto the normal traces and the
/// tangential facet modes of every essential edge.
pub fn interpolate_essential(
    mesh: &Mesh,
    basis: &ReferenceBasis,
    dofs: &DofMap,
    problem: Problem,
) -> Result<EssentialBc> {
    let split = dofs.split();
    let proj = EdgeProjector::new(basis);
    let mut pairs: Vec<(usize, f64)> = Vec::new();
    for (ei, edge) in mesh.edges().iter().enumerate() {
        if !edge.is_boundary() || !problem.is_essential(edge.tag) {
            continue;
        }
        let (normal, tang) = proj.project(mesh, basis, dofs, ei, |x| {
            problem.boundary_value(edge.tag, x).expect("essential edge has data")
        })?;
        pairs.extend(normal.iter().enumerate().map(|(i, c)| (split.ub(ei, i), *c)));
        pairs.extend(tang.iter().enumerate().map(|(j, c)| (split.uh(ei, j), *c)));
    }
    pairs.sort_by_key(|p| p.0);
    let mut mask = vec![false; split.n_velocity()];
    for (d, _) in &pairs {
        mask[*d] = true;
    }
    Ok(EssentialBc { dofs: pairs.iter().map(|p| p.0).collect(), values: pairs.iter().map(|p| p.1).collect(), mask })
}
