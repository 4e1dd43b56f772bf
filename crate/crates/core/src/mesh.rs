//! Conforming triangulations of the benchmark domains.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{Error, Result};

pub type Point = [f64; 2];

/// Boundary classification of an edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryTag {
    Interior,
    Lid,
    Wall,
    Inlet,
    Outlet,
}

impl BoundaryTag {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundaryTag::Interior => "interior",
            BoundaryTag::Lid => "lid",
            BoundaryTag::Wall => "wall",
            BoundaryTag::Inlet => "inlet",
            BoundaryTag::Outlet => "outlet",
        }
    }

    pub fn is_boundary(self) -> bool {
        self != BoundaryTag::Interior
    }
}

impl FromStr for BoundaryTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "interior" => BoundaryTag::Interior,
            "lid" => BoundaryTag::Lid,
            "wall" => BoundaryTag::Wall,
            "inlet" => BoundaryTag::Inlet,
            "outlet" => BoundaryTag::Outlet,
            other => return Err(Error::Format(format!("unknown boundary tag '{other}'"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    /// Endpoints, sorted ascending.
    pub vertices: [usize; 2],
    pub length: f64,
    /// Unit normal pointing from `left` into `right` (outward on the boundary).
    pub normal: Point,
    /// Lower-indexed adjacent element.
    pub left: usize,
    pub right: Option<usize>,
    pub tag: BoundaryTag,
}

impl Edge {
    pub fn is_boundary(&self) -> bool {
        self.right.is_none()
    }

    /// Unit tangent from the lower to the higher endpoint.
    pub fn tangent(&self, vertices: &[Point]) -> Point {
        let [a, b] = self.vertices;
        let d = sub(vertices[b], vertices[a]);
        [d[0] / self.length, d[1] / self.length]
    }

    pub fn midpoint(&self, vertices: &[Point]) -> Point {
        let [a, b] = self.vertices;
        [0.5 * (vertices[a][0] + vertices[b][0]), 0.5 * (vertices[a][1] + vertices[b][1])]
    }
}

/// 2D simplicial mesh with edge connectivity.
#[derive(Debug, Clone)]
pub struct Mesh {
    vertices: Vec<Point>,
    /// counter-clockwise vertex triples
    triangles: Vec<[usize; 3]>,
    edges: Vec<Edge>,
    /// `tri_edges[t][i]` is the edge opposite to vertex `i` of triangle `t`
    tri_edges: Vec<[usize; 3]>,
    diameters: Vec<f64>,
    areas: Vec<f64>,
}

fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

fn dist(a: Point, b: Point) -> f64 {
    let d = sub(a, b);
    d[0].hypot(d[1])
}

fn signed_area(p: [Point; 3]) -> f64 {
    let u = sub(p[1], p[0]);
    let v = sub(p[2], p[0]);
    0.5 * (u[0] * v[1] - u[1] * v[0])
}

impl Mesh {
    /// Builds connectivity; `classify` tags each boundary edge from its
    /// endpoint indices.
    pub fn from_parts(
        vertices: Vec<Point>,
        mut triangles: Vec<[usize; 3]>,
        classify: impl Fn(&[Point], [usize; 2]) -> BoundaryTag,
    ) -> Result<Self> {
        for (t, tri) in triangles.iter_mut().enumerate() {
            if tri.iter().any(|&v| v >= vertices.len()) {
                return Err(Error::Format(format!("triangle {t} references a missing vertex")));
            }
            let a = signed_area([vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]]);
            if a == 0.0 {
                return Err(Error::DegenerateElement { element: t, det: 0.0 });
            }
            if a < 0.0 {
                tri.swap(1, 2);
            }
        }
        let mut lookup: HashMap<[usize; 2], usize> = HashMap::new();
        let mut incident: Vec<(usize, Option<usize>)> = Vec::new();
        let mut keys: Vec<[usize; 2]> = Vec::new();
        let mut tri_edges = Vec::with_capacity(triangles.len());
        for (t, tri) in triangles.iter().enumerate() {
            let mut te = [0usize; 3];
            for (i, slot) in te.iter_mut().enumerate() {
                let (a, b) = (tri[(i + 1) % 3], tri[(i + 2) % 3]);
                let key = [a.min(b), a.max(b)];
                let e = *lookup.entry(key).or_insert_with(|| {
                    keys.push(key);
                    incident.push((t, None));
                    keys.len() - 1
                });
                if incident[e].0 != t {
                    if incident[e].1.is_some() {
                        return Err(Error::Format(format!("edge {key:?} has more than two elements")));
                    }
                    incident[e].1 = Some(t);
                }
                *slot = e;
            }
            tri_edges.push(te);
        }
        let centroid = |t: usize| -> Point {
            let tri = triangles[t];
            let mut c = [0.0; 2];
            for &v in &tri {
                c[0] += vertices[v][0] / 3.0;
                c[1] += vertices[v][1] / 3.0;
            }
            c
        };
        let edges = keys
            .iter()
            .zip(&incident)
            .map(|(&key, &(t0, t1))| {
                let (left, right) = match t1 {
                    Some(t1) => (t0.min(t1), Some(t0.max(t1))),
                    None => (t0, None),
                };
                let (pa, pb) = (vertices[key[0]], vertices[key[1]]);
                let length = dist(pa, pb);
                let d = sub(pb, pa);
                let mut normal = [d[1] / length, -d[0] / length];
                // orient away from the left element
                let c = centroid(left);
                let to_edge = sub(pa, c);
                if normal[0] * to_edge[0] + normal[1] * to_edge[1] < 0.0 {
                    normal = [-normal[0], -normal[1]];
                }
                let tag = if right.is_some() {
                    BoundaryTag::Interior
                } else {
                    classify(&vertices, key)
                };
                Edge { vertices: key, length, normal, left, right, tag }
            })
            .collect();
        let mut diameters = Vec::with_capacity(triangles.len());
        let mut areas = Vec::with_capacity(triangles.len());
        for tri in &triangles {
            let p = [vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]];
            diameters.push(dist(p[0], p[1]).max(dist(p[1], p[2])).max(dist(p[2], p[0])));
            areas.push(signed_area(p));
        }
        Ok(Self { vertices, triangles, edges, tri_edges, diameters, areas })
    }

    /// `n × n` squares on `[0,1]²`, each cut along its lower-left to
    /// upper-right diagonal. Top edges are tagged `lid`, the rest `wall`.
    pub fn unit_square(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("unit_square needs n >= 1".into()));
        }
        let h = 1.0 / n as f64;
        let idx = |i: usize, j: usize| j * (n + 1) + i;
        let vertices: Vec<Point> =
            (0..=n).flat_map(|j| (0..=n).map(move |i| [i as f64 * h, j as f64 * h])).collect();
        let mut triangles = Vec::with_capacity(2 * n * n);
        for j in 0..n {
            for i in 0..n {
                let (a, b, c, d) = (idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1));
                triangles.push([a, b, c]);
                triangles.push([a, c, d]);
            }
        }
        Self::from_parts(vertices, triangles, |v, [a, b]| {
            if (v[a][1] - 1.0).abs() < 1e-12 && (v[b][1] - 1.0).abs() < 1e-12 {
                BoundaryTag::Lid
            } else {
                BoundaryTag::Wall
            }
        })
    }

    /// Backward-facing step `([0.5,4]×[0,0.5]) ∪ ([0,4]×[0.5,1])` with `n`
    /// cells per unit length; `n` must be even.
    pub fn step_domain(n: usize) -> Result<Self> {
        if n == 0 || n % 2 == 1 {
            return Err(Error::InvalidArgument(format!("step_domain needs an even n >= 2, got {n}")));
        }
        let h = 1.0 / n as f64;
        let (nx, ny) = (4 * n, n);
        let inside = |i: usize, j: usize| !(i < n / 2 && j < n / 2);
        let mut id = vec![usize::MAX; (nx + 1) * (ny + 1)];
        let mut vertices = Vec::new();
        for j in 0..=ny {
            for i in 0..=nx {
                let used = [(i, j), (i.wrapping_sub(1), j), (i, j.wrapping_sub(1)), (i.wrapping_sub(1), j.wrapping_sub(1))]
                    .iter()
                    .any(|&(ci, cj)| ci < nx && cj < ny && inside(ci, cj));
                if used {
                    id[j * (nx + 1) + i] = vertices.len();
                    vertices.push([i as f64 * h, j as f64 * h]);
                }
            }
        }
        let v = |i: usize, j: usize| id[j * (nx + 1) + i];
        let mut triangles = Vec::new();
        for j in 0..ny {
            for i in 0..nx {
                if inside(i, j) {
                    let (a, b, c, d) = (v(i, j), v(i + 1, j), v(i + 1, j + 1), v(i, j + 1));
                    triangles.push([a, b, c]);
                    triangles.push([a, c, d]);
                }
            }
        }
        Self::from_parts(vertices, triangles, |p, [a, b]| {
            let on = |f: &dyn Fn(Point) -> bool| f(p[a]) && f(p[b]);
            if on(&|q| q[0].abs() < 1e-12) {
                BoundaryTag::Inlet
            } else if on(&|q| (q[0] - 4.0).abs() < 1e-12) {
                BoundaryTag::Outlet
            } else {
                BoundaryTag::Wall
            }
        })
    }

    /// Splits every triangle into four congruent children.
    pub fn uniform_refine(&self) -> Mesh {
        let mut vertices = self.vertices.clone();
        let mid: Vec<usize> = self
            .edges
            .iter()
            .map(|e| {
                vertices.push(e.midpoint(&self.vertices));
                vertices.len() - 1
            })
            .collect();
        let mut tags: HashMap<[usize; 2], BoundaryTag> = HashMap::new();
        for (e, edge) in self.edges.iter().enumerate() {
            if edge.is_boundary() {
                for &v in &edge.vertices {
                    let m = mid[e];
                    tags.insert([v.min(m), v.max(m)], edge.tag);
                }
            }
        }
        let mut triangles = Vec::with_capacity(4 * self.triangles.len());
        for (t, tri) in self.triangles.iter().enumerate() {
            let [a, b, c] = *tri;
            // edge opposite vertex i
            let [ea, eb, ec] = self.tri_edges[t];
            let (mbc, mca, mab) = (mid[ea], mid[eb], mid[ec]);
            triangles.push([a, mab, mca]);
            triangles.push([mab, b, mbc]);
            triangles.push([mca, mbc, c]);
            triangles.push([mab, mbc, mca]);
        }
        Mesh::from_parts(vertices, triangles, |_, key| {
            tags.get(&key).copied().unwrap_or(BoundaryTag::Wall)
        })
        .expect("refinement of a valid mesh is valid")
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn tri_edges(&self) -> &[[usize; 3]] {
        &self.tri_edges
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }

    /// Element diameter `h_K`.
    pub fn diameter(&self, t: usize) -> f64 {
        self.diameters[t]
    }

    pub fn area(&self, t: usize) -> f64 {
        self.areas[t]
    }

    /// Global mesh size `h = max h_K`.
    pub fn h(&self) -> f64 {
        self.diameters.iter().copied().fold(0.0, f64::max)
    }

    pub fn total_area(&self) -> f64 {
        self.areas.iter().sum()
    }

    pub fn triangle_points(&self, t: usize) -> [Point; 3] {
        let tri = self.triangles[t];
        [self.vertices[tri[0]], self.vertices[tri[1]], self.vertices[tri[2]]]
    }

    /// True if any boundary edge carries an outlet tag.
    pub fn has_outlet(&self) -> bool {
        self.edges.iter().any(|e| e.tag == BoundaryTag::Outlet)
    }

    /// Writes the ASCII exchange format: `nv nb nt`, vertex lines, triangle
    /// lines, then boundary edge lines `v0 v1 tag`.
    pub fn to_ascii(&self) -> String {
        let boundary: Vec<&Edge> = self.edges.iter().filter(|e| e.is_boundary()).collect();
        let mut s = String::new();
        writeln!(s, "{} {} {}", self.vertices.len(), boundary.len(), self.triangles.len()).unwrap();
        for p in &self.vertices {
            writeln!(s, "{:.16e} {:.16e}", p[0], p[1]).unwrap();
        }
        for t in &self.triangles {
            writeln!(s, "{} {} {}", t[0], t[1], t[2]).unwrap();
        }
        for e in boundary {
            writeln!(s, "{} {} {}", e.vertices[0], e.vertices[1], e.tag.as_str()).unwrap();
        }
        s
    }

    pub fn from_ascii(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let mut next = || lines.next().ok_or_else(|| Error::Format("unexpected end of file".into()));
        let header: Vec<usize> = parse_fields(next()?)?;
        let [nv, nb, nt] = header[..] else {
            return Err(Error::Format("header must be 'nv nb nt'".into()));
        };
        let mut vertices = Vec::with_capacity(nv);
        for _ in 0..nv {
            let f: Vec<f64> = parse_fields(next()?)?;
            let [x, y] = f[..] else { return Err(Error::Format("vertex line needs 2 reals".into())) };
            vertices.push([x, y]);
        }
        let mut triangles = Vec::with_capacity(nt);
        for _ in 0..nt {
            let f: Vec<usize> = parse_fields(next()?)?;
            let [a, b, c] = f[..] else { return Err(Error::Format("triangle line needs 3 indices".into())) };
            triangles.push([a, b, c]);
        }
        let mut tags = HashMap::new();
        for _ in 0..nb {
            let line = next()?;
            let f: Vec<&str> = line.split_whitespace().collect();
            let [a, b, tag] = f[..] else { return Err(Error::Format("boundary line needs 'v0 v1 tag'".into())) };
            let a: usize = a.parse().map_err(|_| Error::Format(format!("bad index '{a}'")))?;
            let b: usize = b.parse().map_err(|_| Error::Format(format!("bad index '{b}'")))?;
            tags.insert([a.min(b), a.max(b)], tag.parse::<BoundaryTag>()?);
        }
        Self::from_parts(vertices, triangles, |_, key| {
            tags.get(&key).copied().unwrap_or(BoundaryTag::Wall)
        })
    }
}

fn parse_fields<T: FromStr>(line: &str) -> Result<Vec<T>> {
    line.split_whitespace()
        .map(|t| t.parse::<T>().map_err(|_| Error::Format(format!("cannot parse '{t}'"))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn count_tag(m: &Mesh, tag: BoundaryTag) -> usize {
        m.edges().iter().filter(|e| e.tag == tag).count()
    }

    #[test]
    fn unit_square_counts() {
        let m = Mesh::unit_square(1).unwrap();
        assert_eq!((m.n_vertices(), m.n_edges(), m.n_triangles()), (4, 5, 2));
        let m = Mesh::unit_square(2).unwrap();
        assert_eq!((m.n_vertices(), m.n_edges(), m.n_triangles()), (9, 16, 8));
        let m = Mesh::unit_square(8).unwrap();
        assert_eq!(m.n_triangles(), 128);
        assert_eq!(count_tag(&m, BoundaryTag::Lid), 8);
        assert!(Mesh::unit_square(0).is_err());
    }

    #[test]
    fn step_counts() {
        let m = Mesh::step_domain(2).unwrap();
        assert_eq!(m.n_triangles(), 30);
        assert!((m.total_area() - 3.75).abs() < 1e-14);
        assert_eq!(count_tag(&m, BoundaryTag::Inlet), 1);
        assert!(Mesh::step_domain(3).is_err());
        let euler = m.n_vertices() as i64 - m.n_edges() as i64 + m.n_triangles() as i64;
        assert_eq!(euler, 1);
    }

    #[test]
    fn step_corner_is_a_vertex() {
        for n in [2, 4, 6] {
            let m = Mesh::step_domain(n).unwrap();
            assert!(m.vertices().iter().any(|p| (p[0] - 0.5).abs() < 1e-14 && (p[1] - 0.5).abs() < 1e-14));
            // no triangle contains the removed quadrant
            for t in 0..m.n_triangles() {
                let p = m.triangle_points(t);
                let c = [(p[0][0] + p[1][0] + p[2][0]) / 3.0, (p[0][1] + p[1][1] + p[2][1]) / 3.0];
                assert!(!(c[0] < 0.5 && c[1] < 0.5));
            }
        }
    }

    #[test]
    fn refine_matches_structured() {
        let r = Mesh::unit_square(1).unwrap().uniform_refine();
        let s = Mesh::unit_square(2).unwrap();
        assert_eq!(r.n_triangles(), 8);
        let key = |m: &Mesh| {
            let mut v: Vec<Vec<(i64, i64)>> = (0..m.n_triangles())
                .map(|t| {
                    let mut p: Vec<(i64, i64)> = m
                        .triangle_points(t)
                        .iter()
                        .map(|q| ((q[0] * 1e6).round() as i64, (q[1] * 1e6).round() as i64))
                        .collect();
                    p.sort();
                    p
                })
                .collect();
            v.sort();
            v
        };
        assert_eq!(key(&r), key(&s));
        assert_eq!(count_tag(&r, BoundaryTag::Lid), 2);
    }

    #[test]
    fn refine_halves_h_and_keeps_area() {
        let m = Mesh::step_domain(2).unwrap();
        let r2 = m.uniform_refine().uniform_refine();
        assert_eq!(m.h() / r2.h(), 4.0);
        assert!((r2.total_area() - 3.75).abs() < 1e-14);
        assert_eq!(count_tag(&r2, BoundaryTag::Inlet), 4);
    }

    #[test]
    fn ascii_roundtrip() {
        let m = Mesh::step_domain(2).unwrap();
        let back = Mesh::from_ascii(&m.to_ascii()).unwrap();
        assert_eq!(back.vertices(), m.vertices());
        assert_eq!(back.triangles(), m.triangles());
        assert_eq!(back.edges(), m.edges());
    }
}
