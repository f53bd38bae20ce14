//! Triangulations: parsing, validation, edges and global edge frames.
//!
//! Text format: a header `nV nT`, then `nV` lines `x y`, then `nT` lines
//! `i j k` of 0-based vertex ids. `#` starts a comment.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::types::{orient, Triangle, Vec2};

#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    /// Vertex ids, lower first.
    pub endpoints: (usize, usize),
    /// Adjacent triangle ids, ascending.
    pub triangles: Vec<usize>,
    /// From the lower to the higher endpoint.
    pub tangent: Vec2,
    /// `tangent` rotated by +90°.
    pub normal: Vec2,
}

impl Edge {
    pub fn is_interior(&self) -> bool {
        self.triangles.len() == 2
    }
}

#[derive(Clone, Debug)]
pub struct TriangulationMesh {
    pub vertices: Vec<Vec2>,
    /// Counterclockwise vertex triples.
    pub triangles: Vec<[usize; 3]>,
    pub edges: Vec<Edge>,
    /// `triangle_edges[t][k]` is the edge opposite local corner `k`.
    pub triangle_edges: Vec<[usize; 3]>,
}

/// Relative area below which a triangle is degenerate.
pub const DEGENERATE_AREA: f64 = 1e-12;

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

impl TriangulationMesh {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let (hl, header) = lines.next().ok_or_else(|| parse_err(1, "missing header"))?;
        let counts = parse_fields::<usize>(hl, header, 2)?;
        let (nv, nt) = (counts[0], counts[1]);
        let mut vertices = Vec::with_capacity(nv);
        for _ in 0..nv {
            let (ln, l) = lines.next().ok_or_else(|| parse_err(hl, "fewer vertex lines than declared"))?;
            let c = parse_fields::<f64>(ln, l, 2)?;
            if !c.iter().all(|v| v.is_finite()) {
                return Err(parse_err(ln, "non-finite coordinate"));
            }
            vertices.push(Vec2::new(c[0], c[1]));
        }
        let mut triangles = Vec::with_capacity(nt);
        for _ in 0..nt {
            let (ln, l) = lines.next().ok_or_else(|| parse_err(hl, "fewer triangle lines than declared"))?;
            let c = parse_fields::<usize>(ln, l, 3)?;
            if let Some(&bad) = c.iter().find(|&&i| i >= nv) {
                return Err(parse_err(ln, format!("vertex id {bad} out of range")));
            }
            triangles.push([c[0], c[1], c[2]]);
        }
        if let Some((ln, _)) = lines.next() {
            return Err(parse_err(ln, "trailing content"));
        }
        Self::new(vertices, triangles)
    }

    /// Validates and orients a triangulation, deriving its edges.
    pub fn new(vertices: Vec<Vec2>, mut triangles: Vec<[usize; 3]>) -> Result<Self> {
        if triangles.is_empty() {
            return Err(Error::InvalidArgument("mesh has no triangles".into()));
        }
        if let Some(&bad) = triangles.iter().flatten().find(|&&i| i >= vertices.len()) {
            return Err(Error::OutOfRange { index: bad, len: vertices.len() });
        }
        let diag2 = bbox_diagonal2(&vertices);
        for (t, tri) in triangles.iter_mut().enumerate() {
            let [a, b, c] = tri.map(|i| vertices[i]);
            let area = 0.5 * orient(&a, &b, &c);
            if area.abs() < DEGENERATE_AREA * diag2 || tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(Error::DegenerateTriangle { triangle: t, area: area.abs() });
            }
            if area < 0.0 {
                tri.swap(1, 2);
            }
        }
        let mut used = vec![false; vertices.len()];
        for tri in &triangles {
            for &v in tri {
                used[v] = true;
            }
        }
        if let Some(v) = used.iter().position(|u| !u) {
            return Err(Error::NonConforming(format!("vertex {v} is not used by any triangle")));
        }

        let mut by_key: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (t, tri) in triangles.iter().enumerate() {
            for k in 0..3 {
                let (a, b) = (tri[(k + 1) % 3], tri[(k + 2) % 3]);
                by_key.entry((a.min(b), a.max(b))).or_default().push(t);
            }
        }
        let mut edges = Vec::with_capacity(by_key.len());
        let mut index = BTreeMap::new();
        for (&(a, b), ts) in &by_key {
            if ts.len() > 2 {
                return Err(Error::NonConforming(format!("edge ({a}, {b}) is shared by {} triangles", ts.len())));
            }
            let tangent = (vertices[b] - vertices[a]).normalize();
            let normal = Vec2::new(-tangent.y, tangent.x);
            index.insert((a, b), edges.len());
            edges.push(Edge { endpoints: (a, b), triangles: ts.clone(), tangent, normal });
        }
        let triangle_edges = triangles
            .iter()
            .map(|tri| {
                std::array::from_fn(|k| {
                    let (a, b) = (tri[(k + 1) % 3], tri[(k + 2) % 3]);
                    index[&(a.min(b), a.max(b))]
                })
            })
            .collect();
        let mesh = TriangulationMesh { vertices, triangles, edges, triangle_edges };
        mesh.check_conforming()?;
        Ok(mesh)
    }

    fn check_conforming(&self) -> Result<()> {
        let scale = bbox_diagonal2(&self.vertices).sqrt();
        let eps = 1e-12 * scale;
        for i in 0..self.vertices.len() {
            for j in i + 1..self.vertices.len() {
                if (self.vertices[i] - self.vertices[j]).norm() <= eps {
                    return Err(Error::NonConforming(format!("vertices {i} and {j} coincide")));
                }
            }
        }
        // neighbours must lie on opposite sides of their shared edge
        for e in self.edges.iter().filter(|e| e.is_interior()) {
            let (a, b) = (self.vertices[e.endpoints.0], self.vertices[e.endpoints.1]);
            let side = |t: usize| {
                let o = self.triangles[t].iter().find(|&&v| v != e.endpoints.0 && v != e.endpoints.1).copied();
                orient(&a, &b, &self.vertices[o.expect("triangle has a third vertex")]).signum()
            };
            if side(e.triangles[0]) == side(e.triangles[1]) {
                return Err(Error::NonConforming(format!(
                    "triangles {} and {} overlap across edge {:?}",
                    e.triangles[0], e.triangles[1], e.endpoints
                )));
            }
        }
        // no vertex inside another triangle or on the interior of an edge
        for (t, tri) in self.triangles.iter().enumerate() {
            let tr = self.triangle(t);
            let tol = 1e-12;
            for (v, x) in self.vertices.iter().enumerate() {
                if tri.contains(&v) {
                    continue;
                }
                if tr.barycentric(x).iter().all(|&b| b > -tol) {
                    return Err(Error::NonConforming(format!("vertex {v} lies in triangle {t}")));
                }
            }
        }
        // no two edges cross properly
        for i in 0..self.edges.len() {
            for j in i + 1..self.edges.len() {
                let (a, b) = self.edges[i].endpoints;
                let (c, d) = self.edges[j].endpoints;
                if a == c || a == d || b == c || b == d {
                    continue;
                }
                let (pa, pb, pc, pd) = (self.vertices[a], self.vertices[b], self.vertices[c], self.vertices[d]);
                let s1 = orient(&pa, &pb, &pc) * orient(&pa, &pb, &pd);
                let s2 = orient(&pc, &pd, &pa) * orient(&pc, &pd, &pb);
                if s1 < 0.0 && s2 < 0.0 {
                    return Err(Error::NonConforming(format!("edges ({a}, {b}) and ({c}, {d}) cross")));
                }
            }
        }
        Ok(())
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

    pub fn triangle(&self, t: usize) -> Triangle {
        let [a, b, c] = self.triangles[t].map(|i| self.vertices[i]);
        Triangle::new(a, b, c).expect("validated triangle")
    }

    /// `(unit_normal, unit_tangent)` of an edge.
    pub fn edge_frame(&self, edge: usize) -> Result<(Vec2, Vec2)> {
        let e = self.edges.get(edge).ok_or(Error::OutOfRange { index: edge, len: self.edges.len() })?;
        Ok((e.normal, e.tangent))
    }

    /// Lowest-id triangle containing `x` (barycentric slack `1e-12`).
    pub fn locate(&self, x: &Vec2) -> Option<usize> {
        (0..self.triangles.len()).find(|&t| self.triangle(t).contains(x, 1e-12))
    }

    pub fn interior_edges(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.edges.len()).filter(|&e| self.edges[e].is_interior())
    }
}

fn parse_fields<T: std::str::FromStr>(line: usize, text: &str, n: usize) -> Result<Vec<T>> {
    let parts: Vec<&str> = text.split_whitespace().collect();
    if parts.len() != n {
        return Err(parse_err(line, format!("expected {n} fields, found {}", parts.len())));
    }
    parts
        .iter()
        .map(|p| p.parse::<T>().map_err(|_| parse_err(line, format!("cannot parse {p:?}"))))
        .collect()
}

fn bbox_diagonal2(v: &[Vec2]) -> f64 {
    let (mut lo, mut hi) = (Vec2::repeat(f64::INFINITY), Vec2::repeat(f64::NEG_INFINITY));
    for p in v {
        lo = lo.inf(p);
        hi = hi.sup(p);
    }
    (hi - lo).norm_squared()
}

/// Example meshes used by checks and tests.
pub mod samples {
    use super::*;

    pub fn single(h: f64) -> TriangulationMesh {
        TriangulationMesh::new(
            vec![Vec2::new(0.0, 0.0), Vec2::new(h, 0.0), Vec2::new(0.0, h)],
            vec![[0, 1, 2]],
        )
        .expect("valid mesh")
    }

    /// Unit square split by the diagonal from `(1, 0)` to `(0, 1)`.
    pub fn square() -> TriangulationMesh {
        TriangulationMesh::new(
            vec![Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0), Vec2::new(1.0, 1.0)],
            vec![[0, 1, 2], [1, 3, 2]],
        )
        .expect("valid mesh")
    }

    /// Eight triangles around the origin with a slightly perturbed ring.
    pub fn disk_fan() -> TriangulationMesh {
        let mut v = vec![Vec2::new(0.0, 0.0)];
        for k in 0..8 {
            let a = k as f64 * std::f64::consts::FRAC_PI_4 + 0.05 * (k % 3) as f64;
            let r = 1.0 + 0.1 * ((k * 5) % 3) as f64;
            v.push(Vec2::new(r * a.cos(), r * a.sin()));
        }
        let t = (0..8).map(|k| [0, 1 + k, 1 + (k + 1) % 8]).collect();
        TriangulationMesh::new(v, t).expect("valid mesh")
    }
}
