//! The 28 scaled simplex splines spanning the cubic C² space on a split
//! triangle, and their dual polynomials.

use crate::error::{Error, Result};
use crate::geometry::{BoundaryPoint, MacroTriangleGeometry};
use crate::hermite::{apply_functionals, CollocationMatrix};
use crate::poly::{bezier_domain_points, Cubic};
use crate::simplex::{KnotMultiset, Region, SimplexSpline};
use crate::types::{Jet, Order, Triangle, Vec2};

use BoundaryPoint::*;

/// Knot configurations, one row per basis function.
pub const KNOT_TABLE: [[BoundaryPoint; 6]; 28] = [
    [P1, P1, P1, P1, P21, P31],
    [P2, P2, P2, P2, P12, P32],
    [P3, P3, P3, P3, P13, P23],
    [P1, P1, P1, P21, P31, P32],
    [P1, P1, P1, P21, P23, P31],
    [P2, P2, P2, P12, P13, P32],
    [P2, P2, P2, P12, P31, P32],
    [P3, P3, P3, P13, P21, P23],
    [P3, P3, P3, P12, P13, P23],
    [P1, P1, P2, P21, P31, P32],
    [P1, P1, P3, P21, P23, P31],
    [P2, P2, P3, P12, P13, P32],
    [P1, P2, P2, P12, P31, P32],
    [P1, P3, P3, P13, P21, P23],
    [P2, P3, P3, P12, P13, P23],
    [P1, P1, P21, P23, P31, P32],
    [P2, P2, P12, P13, P31, P32],
    [P3, P3, P12, P13, P21, P23],
    [P1, P2, P12, P21, P31, P32],
    [P2, P3, P12, P13, P23, P32],
    [P1, P3, P13, P21, P23, P31],
    [P1, P12, P21, P23, P31, P32],
    [P1, P13, P21, P23, P31, P32],
    [P2, P12, P13, P23, P31, P32],
    [P2, P12, P13, P21, P31, P32],
    [P3, P12, P13, P21, P23, P31],
    [P3, P12, P13, P21, P23, P32],
    [P12, P13, P21, P23, P31, P32],
];

/// Index ranges (0-based, half-open) of the groups permuted among
/// themselves by the symmetries of the triangle.
pub const SYMMETRY_GROUPS: [(usize, usize); 7] =
    [(0, 3), (3, 9), (9, 15), (15, 18), (18, 21), (21, 27), (27, 28)];

/// Weight of each group before scaling by `|Δ| / 15`.
pub const GROUP_WEIGHTS: [f64; 7] = [1.0 / 6.0, 1.0 / 3.0, 0.5, 2.0 / 3.0, 5.0 / 6.0, 2.0 / 3.0, 1.0];

pub fn group_of(j: usize) -> usize {
    SYMMETRY_GROUPS.iter().position(|&(a, b)| (a..b).contains(&j)).expect("index below 28")
}

/// Scaled weights for a triangle of area `area`.
pub fn weights(area: f64) -> [f64; 28] {
    std::array::from_fn(|j| GROUP_WEIGHTS[group_of(j)] * area / 15.0)
}

fn image(b: BoundaryPoint, sigma: [usize; 3]) -> BoundaryPoint {
    let src = b.bary3();
    let mut dst = [0; 3];
    for k in 0..3 {
        dst[sigma[k]] = src[k];
    }
    *BoundaryPoint::ALL.iter().find(|p| p.bary3() == dst).expect("boundary points are closed under symmetry")
}

fn sorted(mut k: [BoundaryPoint; 6]) -> [BoundaryPoint; 6] {
    k.sort();
    k
}

/// For the triangle with corners `(p_σ(1), p_σ(2), p_σ(3))`, basis function
/// `j` coincides with basis function `perm[j]` of the original triangle.
pub fn symmetry_permutation(sigma: [usize; 3]) -> [usize; 28] {
    std::array::from_fn(|j| {
        let target = sorted(KNOT_TABLE[j].map(|b| image(b, sigma)));
        KNOT_TABLE
            .iter()
            .position(|k| sorted(*k) == target)
            .expect("knot table is closed under symmetry")
    })
}

/// Basis on one triangle.
#[derive(Clone, Debug)]
pub struct BasisSet {
    geometry: MacroTriangleGeometry,
    splines: Vec<SimplexSpline>,
    weights: [f64; 28],
}

impl BasisSet {
    pub fn new(triangle: Triangle) -> Result<Self> {
        let geometry = MacroTriangleGeometry::new(triangle);
        let splines = KNOT_TABLE
            .iter()
            .map(|k| {
                let knots = k.map(|b| geometry.boundary_point(b));
                Ok(SimplexSpline::new(KnotMultiset::new(knots)?))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(BasisSet { weights: weights(triangle.area()), geometry, splines })
    }

    pub fn from_corners(p1: Vec2, p2: Vec2, p3: Vec2) -> Result<Self> {
        BasisSet::new(Triangle::new(p1, p2, p3)?)
    }

    pub fn triangle(&self) -> &Triangle {
        &self.geometry.triangle
    }

    pub fn geometry(&self) -> &MacroTriangleGeometry {
        &self.geometry
    }

    pub fn weights(&self) -> &[f64; 28] {
        &self.weights
    }

    pub fn spline(&self, j: usize) -> &SimplexSpline {
        &self.splines[j]
    }

    /// A point inside the cell used to evaluate at `x` (lowest incident
    /// cell id on knot lines).
    pub fn probe(&self, x: &Vec2) -> Result<Vec2> {
        let cell = self.geometry.locate_cell(x)?.primary();
        Ok(self.geometry.cell_interior[cell])
    }

    /// All 28 scaled functions at `x` in the closed triangle.
    pub fn eval(&self, x: &Vec2, order: Order) -> Result<[Jet; 28]> {
        let probe = self.probe(x)?;
        Ok(self.eval_with_probe(x, &probe, order))
    }

    /// All 28 functions, using the polynomial pieces of the cell containing
    /// `probe`.
    pub fn eval_with_probe(&self, x: &Vec2, probe: &Vec2, order: Order) -> [Jet; 28] {
        let region = Region::Probe(*probe);
        std::array::from_fn(|j| self.splines[j].eval_region(x, &region, order).scaled(self.weights[j]))
    }

    pub fn eval_in_cell(&self, x: &Vec2, cell: usize, order: Order) -> Result<[Jet; 28]> {
        let probe = self
            .geometry
            .cell_interior
            .get(cell)
            .ok_or(Error::OutOfRange { index: cell, len: self.geometry.cell_count() })?;
        Ok(self.eval_with_probe(x, probe, order))
    }

    /// `Σ c_j B_j` at `x`.
    pub fn combine(&self, coef: &[f64], x: &Vec2, order: Order) -> Result<Jet> {
        if coef.len() != 28 {
            return Err(Error::InvalidArgument(format!("expected 28 coefficients, got {}", coef.len())));
        }
        let b = self.eval(x, order)?;
        let mut out = Jet::ZERO;
        for (bj, c) in b.iter().zip(coef) {
            out.add_scaled(bj, *c);
        }
        Ok(out)
    }
}

/// Jet of `x ↦ (1 + y·x)³`.
pub fn marsden_kernel(y: &Vec2, x: &Vec2) -> Jet {
    let t = 1.0 + y.dot(x);
    Jet { value: t * t * t, gradient: y * (3.0 * t * t), hessian: y * y.transpose() * (6.0 * t) }
}

/// Cubic dual polynomials `ψ_j` with `(1 + yᵀx)³ = Σ ψ_j(y) B_j(x)`.
#[derive(Clone, Debug)]
pub struct DualPolynomialTable {
    pub psi: Vec<Cubic>,
    pub nodes: [Vec2; 10],
}

impl DualPolynomialTable {
    pub fn eval(&self, y: &Vec2) -> [f64; 28] {
        std::array::from_fn(|j| self.psi[j].eval(y))
    }

    /// `ψ(y)` directly from the collocation solve, without the cubic fit.
    pub fn exact(c: &CollocationMatrix, y: &Vec2) -> Result<[f64; 28]> {
        let data = apply_functionals(c.functionals(), |x, _| Ok(marsden_kernel(y, x)))?;
        c.solve(&data)
    }
}

/// Fits the dual polynomials at the Bézier domain points of the triangle.
pub fn dual_polynomials(basis: &BasisSet, c: &CollocationMatrix) -> Result<DualPolynomialTable> {
    let tri = basis.triangle();
    let nodes = bezier_domain_points(&tri.corners);
    let mut samples = vec![[0.0; 10]; 28];
    for (k, y) in nodes.iter().enumerate() {
        let psi = DualPolynomialTable::exact(c, y)?;
        for j in 0..28 {
            samples[j][k] = psi[j];
        }
    }
    let psi = Cubic::fit_many(&nodes, &samples, tri.centroid(), tri.diameter())?;
    Ok(DualPolynomialTable { psi, nodes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{quasi_random_in_triangle, random_triangle, rng};

    fn reference() -> BasisSet {
        BasisSet::from_corners(Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)).unwrap()
    }

    #[test]
    fn unit_area_weights() {
        let w = weights(1.0);
        assert!((w[0] - 1.0 / 90.0).abs() < 1e-17);
        assert!((w[27] - 1.0 / 15.0).abs() < 1e-17);
    }

    #[test]
    fn corner_interpolation() {
        let b = reference();
        let v = b.eval(&Vec2::new(0.0, 0.0), Order::Value).unwrap();
        assert!((v[0].value - 1.0).abs() < 1e-14);
        for j in 1..28 {
            assert!(v[j].value.abs() < 1e-14);
        }
    }

    #[test]
    fn partition_of_unity_on_random_triangle() {
        let t = random_triangle(&mut rng(5));
        let b = BasisSet::new(t).unwrap();
        for x in quasi_random_in_triangle(&t, 300) {
            let v = b.eval(&x, Order::Second).unwrap();
            let mut s = Jet::ZERO;
            for j in &v {
                s.add_scaled(j, 1.0);
                assert!(j.value >= -1e-12);
            }
            assert!((s.value - 1.0).abs() < 1e-12);
            assert!(s.gradient.norm() < 1e-9);
            assert!(s.hessian.norm() < 1e-7);
        }
    }

    #[test]
    fn outside_point_is_rejected() {
        assert!(reference().eval(&Vec2::new(0.8, 0.8), Order::Value).is_err());
    }

    #[test]
    fn symmetry_permutations_preserve_groups() {
        for sigma in [[1, 2, 0], [1, 0, 2], [0, 2, 1]] {
            let perm = symmetry_permutation(sigma);
            let mut seen = perm;
            seen.sort();
            assert_eq!(seen, std::array::from_fn::<usize, 28, _>(|j| j));
            for j in 0..28 {
                assert_eq!(group_of(j), group_of(perm[j]));
            }
        }
    }

    #[test]
    fn symmetric_images_agree_pointwise() {
        let t = Triangle::new(Vec2::new(0.1, 0.2), Vec2::new(1.3, -0.1), Vec2::new(0.4, 1.1)).unwrap();
        let b = BasisSet::new(t).unwrap();
        let sigma = [2, 0, 1];
        let c = t.corners;
        let b2 = BasisSet::from_corners(c[sigma[0]], c[sigma[1]], c[sigma[2]]).unwrap();
        let perm = symmetry_permutation(sigma);
        for x in quasi_random_in_triangle(&t, 50) {
            let v = b.eval(&x, Order::Value).unwrap();
            let w = b2.eval(&x, Order::Value).unwrap();
            for j in 0..28 {
                assert!((w[j].value - v[perm[j]].value).abs() < 1e-10);
            }
        }
    }
}
