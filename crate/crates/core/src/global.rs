//! Global C² spaces over a triangulation: shared Hermite degrees of
//! freedom, per-triangle reduced elements, evaluation and jump reports.
//!
//! Slots per vertex: value, Dx, Dy, Dxx, Dyy, Dxy. Per edge (when kept):
//! the first derivative along the global edge normal at the midpoint, then
//! the second normal derivative at the third points nearer the lower and
//! the higher endpoint id. Per triangle (full space only): the value at
//! the barycenter.

use crate::basis::BasisSet;
use crate::error::{Error, Result};
use crate::hermite::{CollocationMatrix, HermiteData};
use crate::mesh::TriangulationMesh;
use crate::par::{map_range, try_map_range, ExecMode};
use crate::reduction::{reduced_space, LocalReducedSpace, ReductionOptions, SPACE_ORDERS};
use crate::types::{Jet, Order, Vec2};

/// Dimension of a global space.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SpaceDim {
    pub m: usize,
    pub n_v: usize,
    pub n_e: usize,
    pub n_t: usize,
    pub total: usize,
}

impl SpaceDim {
    /// `6 nV + {0, nE, 3 nE, 3 nE + nT}` for `m = 18, 21, 27, 28`.
    pub fn formula(m: usize, n_v: usize, n_e: usize, n_t: usize) -> Result<usize> {
        let extra = match m {
            18 => 0,
            21 => n_e,
            27 => 3 * n_e,
            28 => 3 * n_e + n_t,
            _ => return Err(Error::InvalidArgument(format!("unsupported space order m = {m}"))),
        };
        Ok(6 * n_v + extra)
    }
}

fn edge_slots(m: usize) -> usize {
    match m {
        18 => 0,
        21 => 1,
        _ => 3,
    }
}

/// Global slot and sign of every kept local functional.
#[derive(Clone, Debug)]
pub struct GlobalDofTable {
    pub m: usize,
    pub total_dim: usize,
    edge_base: usize,
    triangle_base: usize,
    /// `maps[t][i] = (slot, sign)` with `λ_i = sign · dof[slot]` on triangle `t`.
    pub maps: Vec<Vec<(usize, f64)>>,
}

impl GlobalDofTable {
    pub fn new(mesh: &TriangulationMesh, m: usize) -> Result<Self> {
        let n_v = mesh.n_vertices();
        let total_dim = SpaceDim::formula(m, n_v, mesh.n_edges(), mesh.n_triangles())?;
        let per_edge = edge_slots(m);
        let edge_base = 6 * n_v;
        let triangle_base = edge_base + per_edge * mesh.n_edges();
        let maps = (0..mesh.n_triangles())
            .map(|t| {
                let tri = mesh.triangles[t];
                let geom = mesh.triangle(t);
                let vslot = |k: usize, s: usize| (6 * tri[k] + s, 1.0);
                let mut map = Vec::with_capacity(m);
                for k in 0..3 {
                    map.push(vslot(k, 0));
                }
                for k in 0..3 {
                    map.push(vslot(k, 1));
                    map.push(vslot(k, 2));
                }
                for k in 0..3 {
                    map.push(vslot(k, 3));
                    map.push(vslot(k, 4));
                }
                for k in 0..3 {
                    map.push(vslot(k, 5));
                }
                if m >= 21 {
                    // first normal derivatives on edges opposite corners 3, 1, 2
                    for k in [2, 0, 1] {
                        let e = mesh.triangle_edges[t][k];
                        let sign = geom.outward_normal(k).dot(&mesh.edges[e].normal).signum();
                        map.push((edge_base + per_edge * e, sign));
                    }
                }
                if m >= 27 {
                    // second normal derivatives: (edge opposite, nearer corner)
                    for (k, near) in [(2, 0), (1, 0), (0, 1), (2, 1), (1, 2), (0, 2)] {
                        let e = mesh.triangle_edges[t][k];
                        let lower = mesh.edges[e].endpoints.0 == tri[near];
                        let slot = edge_base + per_edge * e + if lower { 1 } else { 2 };
                        map.push((slot, 1.0));
                    }
                }
                if m == 28 {
                    map.push((triangle_base + t, 1.0));
                }
                map
            })
            .collect();
        Ok(GlobalDofTable { m, total_dim, edge_base, triangle_base, maps })
    }

    pub fn vertex_slot(&self, v: usize, component: usize) -> usize {
        6 * v + component
    }

    pub fn edge_slot(&self, e: usize, k: usize) -> Option<usize> {
        (k < edge_slots(self.m)).then(|| self.edge_base + edge_slots(self.m) * e + k)
    }

    pub fn triangle_slot(&self, t: usize) -> Option<usize> {
        (self.m == 28).then(|| self.triangle_base + t)
    }
}

/// One macro-triangle of a global space.
#[derive(Clone, Debug)]
pub struct LocalElement {
    pub basis: BasisSet,
    pub collocation: CollocationMatrix,
    pub space: LocalReducedSpace,
}

#[derive(Clone, Debug)]
pub struct GlobalSpace {
    pub mesh: TriangulationMesh,
    pub dofs: GlobalDofTable,
    pub elements: Vec<LocalElement>,
    pub options: ReductionOptions,
    pub mode: ExecMode,
}

impl GlobalSpace {
    pub fn build(mesh: TriangulationMesh, m: usize, options: ReductionOptions, mode: ExecMode) -> Result<Self> {
        if !SPACE_ORDERS.contains(&m) {
            return Err(Error::InvalidArgument(format!("unsupported space order m = {m}")));
        }
        let dofs = GlobalDofTable::new(&mesh, m)?;
        let elements = try_map_range(mode, mesh.n_triangles(), |t| {
            let basis = BasisSet::new(mesh.triangle(t))?;
            let collocation = CollocationMatrix::new(&basis)?;
            let space = reduced_space(&collocation, m, &options)?;
            Ok::<_, Error>(LocalElement { basis, collocation, space })
        })?;
        Ok(GlobalSpace { mesh, dofs, elements, options, mode })
    }

    pub fn m(&self) -> usize {
        self.dofs.m
    }

    pub fn dim(&self) -> SpaceDim {
        SpaceDim {
            m: self.m(),
            n_v: self.mesh.n_vertices(),
            n_e: self.mesh.n_edges(),
            n_t: self.mesh.n_triangles(),
            total: self.dofs.total_dim,
        }
    }

    /// Global degrees of freedom of `f`.
    pub fn dof_values<F>(&self, f: F) -> Vec<f64>
    where
        F: Fn(&Vec2) -> Jet + Sync,
    {
        let mut d = vec![0.0; self.dofs.total_dim];
        for (v, x) in self.mesh.vertices.iter().enumerate() {
            let j = f(x);
            let c = j.components();
            // value, Dx, Dy, Dxx, Dyy, Dxy
            for (s, val) in [c[0], c[1], c[2], c[3], c[5], c[4]].into_iter().enumerate() {
                d[self.dofs.vertex_slot(v, s)] = val;
            }
        }
        for (e, edge) in self.mesh.edges.iter().enumerate() {
            let (a, b) = (self.mesh.vertices[edge.endpoints.0], self.mesh.vertices[edge.endpoints.1]);
            let n = edge.normal;
            if let Some(s) = self.dofs.edge_slot(e, 0) {
                d[s] = f(&((a + b) / 2.0)).directional(&n);
            }
            for (k, x) in [(1, (a * 2.0 + b) / 3.0), (2, (a + b * 2.0) / 3.0)] {
                if let Some(s) = self.dofs.edge_slot(e, k) {
                    d[s] = f(&x).second_directional(&n, &n);
                }
            }
        }
        for t in 0..self.mesh.n_triangles() {
            if let Some(s) = self.dofs.triangle_slot(t) {
                d[s] = f(&self.mesh.triangle(t).centroid()).value;
            }
        }
        d
    }

    /// Interpolant of `f` from its global degrees of freedom.
    pub fn interpolate<F>(&self, f: F) -> Result<GlobalSpline<'_>>
    where
        F: Fn(&Vec2) -> Jet + Sync,
    {
        self.spline(self.dof_values(f))
    }

    /// The spline with the given global degrees of freedom.
    pub fn spline(&self, dofs: Vec<f64>) -> Result<GlobalSpline<'_>> {
        if dofs.len() != self.dofs.total_dim {
            return Err(Error::InvalidArgument(format!(
                "expected {} degrees of freedom, got {}",
                self.dofs.total_dim,
                dofs.len()
            )));
        }
        let coefficients = try_map_range(self.mode, self.elements.len(), |t| self.local_coefficients(t, &dofs))?;
        Ok(GlobalSpline { space: self, dofs, coefficients })
    }

    /// Procedure: kept local data → full Hermite data → simplex coefficients.
    fn local_coefficients(&self, t: usize, dofs: &[f64]) -> Result<[f64; 28]> {
        let el = &self.elements[t];
        let kept: Vec<f64> = self.dofs.maps[t].iter().map(|&(s, sign)| sign * dofs[s]).collect();
        let data: HermiteData = el.space.expand(&kept)?;
        el.collocation.solve(&data)
    }
}

#[derive(Clone, Debug)]
pub struct GlobalSpline<'a> {
    pub space: &'a GlobalSpace,
    pub dofs: Vec<f64>,
    /// Simplex coefficients per triangle.
    pub coefficients: Vec<[f64; 28]>,
}

/// Largest jumps across one interior edge.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeJump {
    pub edge: usize,
    pub endpoints: (usize, usize),
    /// `[value, sx, sy, sxx, sxy, syy]`.
    pub jumps: [f64; 6],
    /// Largest component magnitude seen on either side.
    pub magnitude: f64,
}

impl EdgeJump {
    pub fn max_jump(&self) -> f64 {
        self.jumps.iter().copied().fold(0.0, f64::max)
    }

    /// Jump relative to `max(1, magnitude)`.
    pub fn relative(&self) -> f64 {
        self.max_jump() / self.magnitude.max(1.0)
    }
}

impl GlobalSpline<'_> {
    pub fn eval_on(&self, t: usize, x: &Vec2, order: Order) -> Result<Jet> {
        self.space.elements[t].basis.combine(&self.coefficients[t], x, order)
    }

    pub fn eval(&self, x: &Vec2, order: Order) -> Result<Jet> {
        let t = self.space.mesh.locate(x).ok_or(Error::OutsideDomain { x: x.x, y: x.y })?;
        self.eval_on(t, x, order)
    }

    /// Values on a list of points, in order.
    pub fn eval_many(&self, xs: &[Vec2], order: Order) -> Result<Vec<Jet>> {
        map_range(self.space.mode, xs.len(), |i| self.eval(&xs[i], order)).into_iter().collect()
    }

    /// Jumps across every interior edge at `samples` equispaced points
    /// including the endpoints.
    pub fn c2_report(&self, samples: usize) -> Result<Vec<EdgeJump>> {
        let mesh = &self.space.mesh;
        let edges: Vec<usize> = mesh.interior_edges().collect();
        try_map_range(self.space.mode, edges.len(), |i| {
            let e = edges[i];
            let edge = &mesh.edges[e];
            let (a, b) = (mesh.vertices[edge.endpoints.0], mesh.vertices[edge.endpoints.1]);
            let (t0, t1) = (edge.triangles[0], edge.triangles[1]);
            let mut out = EdgeJump { edge: e, endpoints: edge.endpoints, jumps: [0.0; 6], magnitude: 0.0 };
            let n = samples.max(2);
            for k in 0..n {
                let s = k as f64 / (n - 1) as f64;
                let x = a + (b - a) * s;
                let l = self.eval_on(t0, &x, Order::Second)?.components();
                let r = self.eval_on(t1, &x, Order::Second)?.components();
                for c in 0..6 {
                    out.jumps[c] = out.jumps[c].max((l[c] - r[c]).abs());
                    out.magnitude = out.magnitude.max(l[c].abs()).max(r[c].abs());
                }
            }
            Ok(out)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::TestFunction;
    use crate::mesh::samples;

    #[test]
    fn dimensions() {
        let s = samples::single(1.0);
        assert_eq!(GlobalDofTable::new(&s, 28).unwrap().total_dim, 28);
        let q = samples::square();
        assert_eq!(GlobalDofTable::new(&q, 27).unwrap().total_dim, 39);
        assert_eq!(GlobalDofTable::new(&q, 18).unwrap().total_dim, 24);
        assert!(GlobalDofTable::new(&q, 19).is_err());
    }

    #[test]
    fn every_slot_is_used() {
        let mesh = samples::disk_fan();
        for m in SPACE_ORDERS {
            let t = GlobalDofTable::new(&mesh, m).unwrap();
            let mut used = vec![false; t.total_dim];
            for map in &t.maps {
                assert_eq!(map.len(), m);
                for &(s, _) in map {
                    used[s] = true;
                }
            }
            assert!(used.iter().all(|u| *u), "m = {m}");
        }
    }

    #[test]
    fn shared_edges_have_opposite_local_signs() {
        let mesh = samples::square();
        let t = GlobalDofTable::new(&mesh, 21).unwrap();
        let e = mesh.interior_edges().next().unwrap();
        let slot = t.edge_slot(e, 0).unwrap();
        let signs: Vec<f64> = t.maps.iter().flat_map(|m| m.iter().filter(|p| p.0 == slot).map(|p| p.1)).collect();
        assert_eq!(signs.len(), 2);
        assert_eq!(signs[0], -signs[1]);
    }

    #[test]
    fn constant_interpolant() {
        let space = GlobalSpace::build(samples::square(), 21, Default::default(), ExecMode::Sequential).unwrap();
        let s = space.interpolate(|_| Jet::constant(2.5)).unwrap();
        for v in 0..4 {
            assert_eq!(s.dofs[6 * v], 2.5);
            assert!(s.dofs[6 * v + 1..6 * v + 6].iter().all(|d| *d == 0.0));
        }
        let j = s.eval(&Vec2::new(0.3, 0.6), Order::Second).unwrap();
        assert!((j.value - 2.5).abs() < 1e-12 && j.gradient.norm() < 1e-10);
    }

    #[test]
    fn franke_is_c2_on_fan() {
        let space = GlobalSpace::build(samples::disk_fan(), 18, Default::default(), ExecMode::Parallel).unwrap();
        let f = TestFunction::Franke;
        let s = space.interpolate(|x| f.jet(x)).unwrap();
        for j in s.c2_report(7).unwrap() {
            assert!(j.relative() < 1e-8, "{j:?}");
        }
    }

    #[test]
    fn corrupted_coefficient_is_detected() {
        let space = GlobalSpace::build(samples::square(), 27, Default::default(), ExecMode::Sequential).unwrap();
        let mut s = space.interpolate(|x| TestFunction::SinCos.jet(x)).unwrap();
        // B17 has a double knot at p2 and touches the edge p2p3
        s.coefficients[0][16] += 1.0;
        let worst = s.c2_report(5).unwrap().iter().map(|j| j.max_jump()).fold(0.0, f64::max);
        assert!(worst > 1e-3);
    }

    #[test]
    fn single_triangle_has_no_jumps() {
        let space = GlobalSpace::build(samples::single(1.0), 28, Default::default(), ExecMode::Sequential).unwrap();
        let s = space.interpolate(|x| TestFunction::SinCos.jet(x)).unwrap();
        assert!(s.c2_report(5).unwrap().is_empty());
        assert!(s.eval(&Vec2::new(2.0, 2.0), Order::Value).is_err());
    }
}
