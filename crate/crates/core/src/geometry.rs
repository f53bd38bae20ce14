//! The cubic Wang–Shi split of a triangle.
//!
//! The nine boundary points (corners and edge thirds) are joined by their
//! complete graph; the 18 interior segments cut the triangle into 75
//! convex cells. The arrangement is computed once, exactly, in reference
//! coordinates `(u, v)` with `x = p1 + u (p2 − p1) + v (p3 − p1)`, where all
//! boundary points have coordinates in `{0, 1/3, 2/3, 1}`. Every triangle
//! is an affine image of it, so combinatorics are shared by all triangles.

use std::collections::{BTreeMap, HashMap};
use std::sync::OnceLock;

use num_rational::Ratio;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::types::{Triangle, Vec2};

type Q = Ratio<i64>;
type QPoint = [Q; 2];

/// The nine boundary points of the split. `PKL` is the third point on the
/// edge opposite `PK` that lies closer to `PL`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BoundaryPoint {
    P1,
    P2,
    P3,
    P12,
    P13,
    P21,
    P23,
    P31,
    P32,
}

impl BoundaryPoint {
    pub const ALL: [BoundaryPoint; 9] = [
        BoundaryPoint::P1,
        BoundaryPoint::P2,
        BoundaryPoint::P3,
        BoundaryPoint::P12,
        BoundaryPoint::P13,
        BoundaryPoint::P21,
        BoundaryPoint::P23,
        BoundaryPoint::P31,
        BoundaryPoint::P32,
    ];

    /// Barycentric coordinates times three.
    pub fn bary3(self) -> [i64; 3] {
        use BoundaryPoint::*;
        match self {
            P1 => [3, 0, 0],
            P2 => [0, 3, 0],
            P3 => [0, 0, 3],
            P12 => [0, 2, 1],
            P13 => [0, 1, 2],
            P21 => [2, 0, 1],
            P23 => [1, 0, 2],
            P31 => [2, 1, 0],
            P32 => [1, 2, 0],
        }
    }

    pub fn bary(self) -> [f64; 3] {
        self.bary3().map(|b| b as f64 / 3.0)
    }

    pub fn name(self) -> &'static str {
        use BoundaryPoint::*;
        match self {
            P1 => "p1",
            P2 => "p2",
            P3 => "p3",
            P12 => "p12",
            P13 => "p13",
            P21 => "p21",
            P23 => "p23",
            P31 => "p31",
            P32 => "p32",
        }
    }

    fn reference(self) -> QPoint {
        let b = self.bary3();
        [Q::new(b[1], 3), Q::new(b[2], 3)]
    }

    /// True when both points lie on a common edge of the triangle.
    pub fn shares_edge(self, other: BoundaryPoint) -> bool {
        let (a, b) = (self.bary3(), other.bary3());
        (0..3).any(|k| a[k] == 0 && b[k] == 0)
    }
}

/// One cell of the reference arrangement.
#[derive(Clone, Debug)]
pub struct ReferenceCell {
    /// Counterclockwise corners, collinear points removed.
    pub vertices: Vec<QPoint>,
    pub area: Q,
    interior: [f64; 2],
    // inward half-planes: a·u + b·v + c ≥ 0, unit (a, b)
    planes: Vec<[f64; 3]>,
}

#[derive(Debug)]
pub struct ReferenceArrangement {
    pub cells: Vec<ReferenceCell>,
    pub interior_lines: Vec<(BoundaryPoint, BoundaryPoint)>,
    /// Pairs of cells sharing a boundary segment, `i < j`, sorted.
    pub adjacency: Vec<(usize, usize)>,
    pub vertex_count: usize,
}

fn cross(o: &QPoint, a: &QPoint, b: &QPoint) -> Q {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn to_f64(q: &Q) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

/// Parameters `(s, t)` of the intersection `a + s (b − a) = c + t (d − c)`,
/// or `None` for parallel segments.
fn intersect(a: &QPoint, b: &QPoint, c: &QPoint, d: &QPoint) -> Option<(Q, Q)> {
    let r = [b[0] - a[0], b[1] - a[1]];
    let s = [d[0] - c[0], d[1] - c[1]];
    let den = r[0] * s[1] - r[1] * s[0];
    if den.is_zero() {
        return None;
    }
    let ac = [c[0] - a[0], c[1] - a[1]];
    let t_ab = (ac[0] * s[1] - ac[1] * s[0]) / den;
    let t_cd = (ac[0] * r[1] - ac[1] * r[0]) / den;
    Some((t_ab, t_cd))
}

/// Counterclockwise angular order of direction vectors, starting at +x.
fn angle_cmp(a: &QPoint, b: &QPoint) -> std::cmp::Ordering {
    let half = |p: &QPoint| {
        if p[1] > Q::zero() || (p[1].is_zero() && p[0] > Q::zero()) {
            0
        } else {
            1
        }
    };
    let (ha, hb) = (half(a), half(b));
    if ha != hb {
        return ha.cmp(&hb);
    }
    let c = a[0] * b[1] - a[1] * b[0];
    Q::zero().cmp(&c)
}

fn build_reference() -> ReferenceArrangement {
    let mut interior_lines = Vec::new();
    for (i, &a) in BoundaryPoint::ALL.iter().enumerate() {
        for &b in &BoundaryPoint::ALL[i + 1..] {
            if !a.shares_edge(b) {
                interior_lines.push((a, b));
            }
        }
    }
    use BoundaryPoint::*;
    let mut segments: Vec<(QPoint, QPoint)> = vec![
        (P1.reference(), P2.reference()),
        (P2.reference(), P3.reference()),
        (P3.reference(), P1.reference()),
    ];
    segments.extend(interior_lines.iter().map(|&(a, b)| (a.reference(), b.reference())));

    // split every segment at all crossings with the others
    let mut vertex_ids: HashMap<QPoint, usize> = HashMap::new();
    let mut vertices: Vec<QPoint> = Vec::new();
    let mut id_of = |p: QPoint, vertices: &mut Vec<QPoint>| -> usize {
        *vertex_ids.entry(p).or_insert_with(|| {
            vertices.push(p);
            vertices.len() - 1
        })
    };
    let zero = Q::zero();
    let one = Q::from_integer(1);
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for (i, (a, b)) in segments.iter().enumerate() {
        let mut params: Vec<Q> = vec![zero, one];
        for (j, (c, d)) in segments.iter().enumerate() {
            if i == j {
                continue;
            }
            if let Some((s, t)) = intersect(a, b, c, d) {
                if s >= zero && s <= one && t >= zero && t <= one {
                    params.push(s);
                }
            } else if cross(a, b, c).is_zero() {
                // collinear: only boundary points lying on a boundary edge
                for p in [c, d] {
                    let dir = [b[0] - a[0], b[1] - a[1]];
                    let s = if !dir[0].is_zero() {
                        (p[0] - a[0]) / dir[0]
                    } else {
                        (p[1] - a[1]) / dir[1]
                    };
                    if s >= zero && s <= one {
                        params.push(s);
                    }
                }
            }
        }
        params.sort();
        params.dedup();
        let pts: Vec<usize> = params
            .iter()
            .map(|s| {
                let p = [a[0] + *s * (b[0] - a[0]), a[1] + *s * (b[1] - a[1])];
                id_of(p, &mut vertices)
            })
            .collect();
        for w in pts.windows(2) {
            let e = (w[0].min(w[1]), w[0].max(w[1]));
            edges.push(e);
        }
    }
    edges.sort();
    edges.dedup();

    // counterclockwise neighbor lists
    let n = vertices.len();
    let mut nbrs: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(a, b) in &edges {
        nbrs[a].push(b);
        nbrs[b].push(a);
    }
    for (v, list) in nbrs.iter_mut().enumerate() {
        let o = vertices[v];
        list.sort_by(|&x, &y| {
            let dx = [vertices[x][0] - o[0], vertices[x][1] - o[1]];
            let dy = [vertices[y][0] - o[0], vertices[y][1] - o[1]];
            angle_cmp(&dx, &dy)
        });
    }

    // trace faces keeping the face on the left
    let mut used: HashMap<(usize, usize), bool> = HashMap::new();
    let mut faces: Vec<Vec<usize>> = Vec::new();
    for &(a, b) in &edges {
        for (s, t) in [(a, b), (b, a)] {
            if used.contains_key(&(s, t)) {
                continue;
            }
            let mut loop_ = Vec::new();
            let (mut u, mut v) = (s, t);
            loop {
                used.insert((u, v), true);
                loop_.push(u);
                let list = &nbrs[v];
                let pos = list.iter().position(|&w| w == u).expect("neighbor present");
                let w = list[(pos + list.len() - 1) % list.len()];
                u = v;
                v = w;
                if (u, v) == (s, t) {
                    break;
                }
            }
            faces.push(loop_);
        }
    }

    let mut cells: Vec<ReferenceCell> = Vec::new();
    for face in faces {
        let pts: Vec<QPoint> = face.iter().map(|&i| vertices[i]).collect();
        let mut area2 = Q::zero();
        for i in 0..pts.len() {
            let (p, q) = (&pts[i], &pts[(i + 1) % pts.len()]);
            area2 += p[0] * q[1] - p[1] * q[0];
        }
        if area2 <= Q::zero() {
            continue; // outer face
        }
        let k = pts.len();
        let corners: Vec<QPoint> = (0..k)
            .filter(|&i| !cross(&pts[(i + k - 1) % k], &pts[i], &pts[(i + 1) % k]).is_zero())
            .map(|i| pts[i])
            .collect();
        cells.push(make_cell(corners, area2 / 2));
    }
    cells.sort_by(|a, b| {
        let ka = (a.interior[1], a.interior[0]);
        let kb = (b.interior[1], b.interior[0]);
        ka.partial_cmp(&kb).expect("finite")
    });

    // cells may also share a sub-segment of a longer side, so compare
    // sides by overlap instead of by identical endpoints
    let mut adjacency = Vec::new();
    for i in 0..cells.len() {
        for j in i + 1..cells.len() {
            if cells_share_side(&cells[i], &cells[j]) {
                adjacency.push((i, j));
            }
        }
    }

    ReferenceArrangement {
        cells,
        interior_lines,
        adjacency,
        vertex_count: n,
    }
}

fn cells_share_side(a: &ReferenceCell, b: &ReferenceCell) -> bool {
    let ka = a.vertices.len();
    let kb = b.vertices.len();
    for i in 0..ka {
        let (p, q) = (&a.vertices[i], &a.vertices[(i + 1) % ka]);
        for j in 0..kb {
            let (r, s) = (&b.vertices[j], &b.vertices[(j + 1) % kb]);
            if !cross(p, q, r).is_zero() || !cross(p, q, s).is_zero() {
                continue;
            }
            // collinear sides: positive-length overlap along the line
            let dir = [q[0] - p[0], q[1] - p[1]];
            let proj = |x: &QPoint| (x[0] - p[0]) * dir[0] + (x[1] - p[1]) * dir[1];
            let len = proj(q);
            let (lo, hi) = {
                let (x, y) = (proj(r), proj(s));
                if x < y {
                    (x, y)
                } else {
                    (y, x)
                }
            };
            let olo = if lo > Q::zero() { lo } else { Q::zero() };
            let ohi = if hi < len { hi } else { len };
            if ohi > olo {
                return true;
            }
        }
    }
    false
}

fn make_cell(vertices: Vec<QPoint>, area: Q) -> ReferenceCell {
    let k = vertices.len();
    let f: Vec<[f64; 2]> = vertices.iter().map(|p| [to_f64(&p[0]), to_f64(&p[1])]).collect();
    let interior = [
        f.iter().map(|p| p[0]).sum::<f64>() / k as f64,
        f.iter().map(|p| p[1]).sum::<f64>() / k as f64,
    ];
    let planes = (0..k)
        .map(|i| {
            let (a, b) = (f[i], f[(i + 1) % k]);
            let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
            let len = (dx * dx + dy * dy).sqrt();
            // left normal of a->b points inside a counterclockwise polygon
            let (nx, ny) = (-dy / len, dx / len);
            [nx, ny, -(nx * a[0] + ny * a[1])]
        })
        .collect();
    ReferenceCell {
        vertices,
        area: area.abs(),
        interior,
        planes,
    }
}

/// The shared reference arrangement (built on first use).
pub fn reference() -> &'static ReferenceArrangement {
    static REF: OnceLock<ReferenceArrangement> = OnceLock::new();
    REF.get_or_init(build_reference)
}

/// Where a point falls in the split.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CellLocation {
    /// Strictly inside one cell.
    Interior(usize),
    /// On one or more knot lines; all incident cells, ascending.
    Boundary(Vec<usize>),
}

impl CellLocation {
    /// The cell used for evaluation: the unique one, or the lowest id.
    pub fn primary(&self) -> usize {
        match self {
            CellLocation::Interior(c) => *c,
            CellLocation::Boundary(cs) => cs[0],
        }
    }

    pub fn cells(&self) -> Vec<usize> {
        match self {
            CellLocation::Interior(c) => vec![*c],
            CellLocation::Boundary(cs) => cs.clone(),
        }
    }
}

/// Slack, in reference coordinates, for on-line and containment decisions.
pub const LOCATE_TOL: f64 = 1e-12;

impl ReferenceArrangement {
    /// Locates reference coordinates `(u, v)`; `None` outside the triangle.
    pub fn locate(&self, u: f64, v: f64) -> Option<CellLocation> {
        let tol = LOCATE_TOL;
        if u < -tol || v < -tol || u + v > 1.0 + tol {
            return None;
        }
        let mut hits = Vec::new();
        let mut best = (f64::NEG_INFINITY, 0usize);
        for (ci, cell) in self.cells.iter().enumerate() {
            let d = cell
                .planes
                .iter()
                .map(|p| p[0] * u + p[1] * v + p[2])
                .fold(f64::INFINITY, f64::min);
            if d > tol {
                return Some(CellLocation::Interior(ci));
            }
            if d >= -tol {
                hits.push(ci);
            }
            if d > best.0 {
                best = (d, ci);
            }
        }
        if hits.is_empty() {
            hits.push(best.1);
        }
        Some(if hits.len() == 1 {
            CellLocation::Interior(hits[0])
        } else {
            CellLocation::Boundary(hits)
        })
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    /// Number of cells with 3, 4, 5, ... corners.
    pub fn polygon_histogram(&self) -> BTreeMap<usize, usize> {
        let mut h = BTreeMap::new();
        for c in &self.cells {
            *h.entry(c.vertices.len()).or_insert(0) += 1;
        }
        h
    }

    pub fn total_area(&self) -> Q {
        self.cells.iter().map(|c| c.area).sum()
    }
}

/// The split of one concrete triangle.
#[derive(Clone, Debug)]
pub struct MacroTriangleGeometry {
    pub triangle: Triangle,
    /// Edge-third points in the order `p12, p13, p21, p23, p31, p32`.
    pub edge_thirds: [Vec2; 6],
    /// Edge midpoints `q1, q2, q3` (`qk` on the edge opposite `pk`).
    pub midpoints: [Vec2; 3],
    pub barycenter: Vec2,
    pub interior_lines: Vec<(Vec2, Vec2)>,
    /// Cell polygons, counterclockwise.
    pub cells: Vec<Vec<Vec2>>,
    /// A point strictly inside each cell.
    pub cell_interior: Vec<Vec2>,
    inverse: [[f64; 2]; 2],
}

impl MacroTriangleGeometry {
    pub fn new(triangle: Triangle) -> Self {
        let r = reference();
        let [p1, p2, p3] = triangle.corners;
        let map = |u: f64, v: f64| p1 + (p2 - p1) * u + (p3 - p1) * v;
        let mapq = |p: &QPoint| map(to_f64(&p[0]), to_f64(&p[1]));
        use BoundaryPoint::*;
        let edge_thirds = [P12, P13, P21, P23, P31, P32].map(|b| triangle.point(b.bary()));
        let midpoints = [(p2 + p3) / 2.0, (p1 + p3) / 2.0, (p1 + p2) / 2.0];
        let interior_lines = r
            .interior_lines
            .iter()
            .map(|(a, b)| (triangle.point(a.bary()), triangle.point(b.bary())))
            .collect();
        let cells = r
            .cells
            .iter()
            .map(|c| {
                let mut poly: Vec<Vec2> = c.vertices.iter().map(mapq).collect();
                if triangle.signed_area < 0.0 {
                    poly.reverse();
                }
                poly
            })
            .collect();
        let cell_interior = r.cells.iter().map(|c| map(c.interior[0], c.interior[1])).collect();
        let (e1, e2) = (p2 - p1, p3 - p1);
        let det = e1.x * e2.y - e1.y * e2.x;
        let inverse = [[e2.y / det, -e2.x / det], [-e1.y / det, e1.x / det]];
        MacroTriangleGeometry {
            edge_thirds,
            midpoints,
            barycenter: triangle.centroid(),
            interior_lines,
            cells,
            cell_interior,
            inverse,
            triangle,
        }
    }

    pub fn from_corners(p1: Vec2, p2: Vec2, p3: Vec2) -> Result<Self> {
        Ok(MacroTriangleGeometry::new(Triangle::new(p1, p2, p3)?))
    }

    pub fn reference_coords(&self, x: &Vec2) -> (f64, f64) {
        let d = x - self.triangle.corners[0];
        let m = &self.inverse;
        (m[0][0] * d.x + m[0][1] * d.y, m[1][0] * d.x + m[1][1] * d.y)
    }

    pub fn locate_cell(&self, x: &Vec2) -> Result<CellLocation> {
        let (u, v) = self.reference_coords(x);
        reference()
            .locate(u, v)
            .ok_or(Error::OutsideDomain { x: x.x, y: x.y })
    }

    pub fn boundary_point(&self, b: BoundaryPoint) -> Vec2 {
        self.triangle.point(b.bary())
    }

    pub fn cell_area(&self, i: usize) -> f64 {
        let poly = &self.cells[i];
        let k = poly.len();
        0.5 * (0..k)
            .map(|j| {
                let (a, b) = (poly[j], poly[(j + 1) % k]);
                a.x * b.y - a.y * b.x
            })
            .sum::<f64>()
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    pub fn interior_line_count(&self) -> usize {
        self.interior_lines.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> MacroTriangleGeometry {
        MacroTriangleGeometry::from_corners(
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(0.0, 1.0),
        )
        .unwrap()
    }

    #[test]
    fn counts_on_reference_triangle() {
        let g = unit();
        assert_eq!(g.cell_count(), 75);
        assert_eq!(g.interior_line_count(), 18);
        assert_eq!(reference().total_area(), Q::new(1, 2));
    }

    #[test]
    fn polygon_types_are_triangles_quads_pentagons() {
        let h = reference().polygon_histogram();
        assert!(h.keys().all(|k| (3..=5).contains(k)), "{h:?}");
        assert_eq!(h.values().sum::<usize>(), 75);
    }

    #[test]
    fn edge_third_points() {
        let g = unit();
        // p31 = 2/3 p1 + 1/3 p2
        assert_eq!(g.edge_thirds[4], Vec2::new(1.0 / 3.0, 0.0));
        assert_eq!(g.boundary_point(BoundaryPoint::P13), Vec2::new(1.0 / 3.0, 2.0 / 3.0));
    }

    #[test]
    fn collinear_corners_rejected() {
        let r = MacroTriangleGeometry::from_corners(
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 1.0),
            Vec2::new(2.0, 2.0),
        );
        assert!(matches!(r, Err(Error::CollinearCorners)));
    }

    #[test]
    fn barycenter_is_a_vertex_of_six_cells() {
        // three interior lines (p31-p13, p32-p23, p21-p12) cross at q
        let g = unit();
        match g.locate_cell(&g.barycenter).unwrap() {
            CellLocation::Boundary(cs) => assert_eq!(cs.len(), 6),
            other => panic!("expected a vertex, got {other:?}"),
        }
    }

    #[test]
    fn corner_is_incident_to_three_cells() {
        let g = unit();
        let loc = g.locate_cell(&Vec2::new(0.0, 0.0)).unwrap();
        assert_eq!(loc.cells().len(), 3);
    }

    #[test]
    fn outside_point_is_rejected() {
        assert!(unit().locate_cell(&Vec2::new(0.7, 0.7)).is_err());
    }

    #[test]
    fn cell_areas_are_positive() {
        let g = MacroTriangleGeometry::from_corners(
            Vec2::new(1.0, 2.0),
            Vec2::new(-3.0, 0.5),
            Vec2::new(0.25, -1.0),
        )
        .unwrap();
        let total: f64 = (0..75).map(|i| g.cell_area(i)).sum();
        assert!((0..75).all(|i| g.cell_area(i) > 0.0));
        assert!((total - g.triangle.area()).abs() <= 1e-12 * g.triangle.area());
    }
}
