use proptest::prelude::*;
use ws3_core::basis::{dual_polynomials, marsden_kernel, symmetry_permutation, DualPolynomialTable};
use ws3_core::geometry::{reference, BoundaryPoint, MacroTriangleGeometry};
use ws3_core::{BasisSet, CellLocation, CollocationMatrix, Order, Triangle, Vec2};

fn v(x: f64, y: f64) -> Vec2 {
    Vec2::new(x, y)
}

fn unit() -> MacroTriangleGeometry {
    MacroTriangleGeometry::from_corners(v(0.0, 0.0), v(1.0, 0.0), v(0.0, 1.0)).unwrap()
}

/// Side of every interior line, the brute-force cell signature.
fn signature(g: &MacroTriangleGeometry, x: &Vec2) -> Vec<i8> {
    g.interior_lines
        .iter()
        .map(|(a, b)| {
            let d = ws3_core::types::orient(a, b, x);
            if d.abs() < 1e-13 {
                0
            } else {
                d.signum() as i8
            }
        })
        .collect()
}

#[test]
fn point_near_bottom_edge_agrees_with_signature() {
    let g = unit();
    let x = v(0.49, 0.02);
    let cell = g.locate_cell(&x).unwrap();
    let CellLocation::Interior(c) = cell else { panic!("{cell:?}") };
    assert!(signature(&g, &x).iter().all(|s| *s != 0));
    assert_eq!(signature(&g, &x), signature(&g, &g.cell_interior[c]));
}

#[test]
fn corner_is_on_the_boundary_of_several_cells() {
    let g = unit();
    let loc = g.locate_cell(&g.boundary_point(BoundaryPoint::P1)).unwrap();
    assert!(matches!(loc, CellLocation::Boundary(ref cs) if cs.len() == 3), "{loc:?}");
}

#[test]
fn reference_area_is_one_half() {
    let r = reference();
    assert_eq!(r.total_area(), num_rational::Ratio::new(1, 2));
    assert_eq!(r.cell_count(), 75);
    assert_eq!(r.interior_lines.len(), 18);
}

#[test]
fn cells_partition_the_triangle() {
    let g = MacroTriangleGeometry::from_corners(v(-1.0, 0.3), v(2.0, -0.5), v(0.4, 1.7)).unwrap();
    let total: f64 = (0..g.cell_count()).map(|i| g.cell_area(i)).sum();
    assert!((total - g.triangle.area()).abs() < 1e-12);
}

#[test]
fn duals_are_one_at_the_origin() {
    let b = BasisSet::from_corners(v(0.3, -0.2), v(1.4, 0.1), v(0.2, 0.9)).unwrap();
    let c = CollocationMatrix::new(&b).unwrap();
    let d = dual_polynomials(&b, &c).unwrap();
    for (j, p) in d.eval(&v(0.0, 0.0)).iter().enumerate() {
        assert!((p - 1.0).abs() < 1e-10, "ψ{}(0) = {p}", j + 1);
    }
}

#[test]
fn marsden_identity_holds_with_fitted_duals() {
    let b = BasisSet::from_corners(v(0.0, 0.0), v(2.0, 0.0), v(0.5, 1.5)).unwrap();
    let c = CollocationMatrix::new(&b).unwrap();
    let d = dual_polynomials(&b, &c).unwrap();
    for (y, x) in [(v(0.3, -0.7), v(0.6, 0.4)), (v(-1.1, 0.2), v(1.2, 0.2))] {
        let psi = d.eval(&y);
        let s: f64 = b.eval(&x, Order::Value).unwrap().iter().zip(psi).map(|(j, p)| j.value * p).sum();
        assert!((s - marsden_kernel(&y, &x).value).abs() < 1e-10);
    }
}

#[test]
fn dual_polynomials_are_cubic_in_y() {
    let b = BasisSet::from_corners(v(0.2, 0.1), v(1.1, 0.0), v(0.5, 0.8)).unwrap();
    let c = CollocationMatrix::new(&b).unwrap();
    let h = 0.05;
    let y0 = v(0.31, 0.27);
    for dir in [v(1.0, 0.0), v(0.0, 1.0), v(0.6, -0.8)] {
        let f = |k: f64| DualPolynomialTable::exact(&c, &(y0 + dir * (k * h))).unwrap();
        let vals: Vec<[f64; 28]> = (0..5).map(|k| f(k as f64)).collect();
        for j in 0..28 {
            let d4 = vals[0][j] - 4.0 * vals[1][j] + 6.0 * vals[2][j] - 4.0 * vals[3][j] + vals[4][j];
            let scale = vals.iter().map(|r| r[j].abs()).fold(1.0, f64::max);
            assert!(d4.abs() < 1e-9 * scale, "ψ{} fourth difference {d4}", j + 1);
        }
    }
}

#[test]
fn symmetry_permutation_preserves_values() {
    let b = BasisSet::from_corners(v(0.0, 0.0), v(1.0, 0.0), v(0.0, 1.0)).unwrap();
    // x↔y swaps p2 and p3
    let perm = symmetry_permutation([0, 2, 1]);
    for x in [v(0.1, 0.2), v(0.3, 0.05), v(0.45, 0.41)] {
        let a = b.eval(&x, Order::Value).unwrap();
        let m = b.eval(&v(x.y, x.x), Order::Value).unwrap();
        for j in 0..28 {
            assert!((a[j].value - m[perm[j]].value).abs() < 1e-12, "B{}", j + 1);
        }
    }
}

fn triangle_strategy() -> impl Strategy<Value = Triangle> {
    prop::array::uniform6(-2.0f64..2.0)
        .prop_filter_map("degenerate", |c| Triangle::from_coords(c).ok().filter(|t| t.area() > 0.05))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn cell_ids_are_affine_invariant(t in triangle_strategy(), a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let (a, b) = if a + b > 1.0 { (1.0 - a, 1.0 - b) } else { (a, b) };
        let bary = [1.0 - a - b, a, b];
        let g = MacroTriangleGeometry::new(t);
        let r = unit();
        let x = t.point(bary);
        let y = r.triangle.point(bary);
        prop_assert_eq!(g.locate_cell(&x).unwrap().primary(), r.locate_cell(&y).unwrap().primary());
    }

    #[test]
    fn located_cell_matches_signature(a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let g = unit();
        let x = v(a, b);
        if a + b < 1.0 {
            if let CellLocation::Interior(c) = g.locate_cell(&x).unwrap() {
                let s = signature(&g, &x);
                if s.iter().all(|v| *v != 0) {
                    prop_assert_eq!(s, signature(&g, &g.cell_interior[c]));
                }
            }
        }
    }

    #[test]
    fn partition_of_unity_and_positivity(t in triangle_strategy(), a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let (a, b) = if a + b > 1.0 { (1.0 - a, 1.0 - b) } else { (a, b) };
        let basis = BasisSet::new(t).unwrap();
        let x = t.point([1.0 - a - b, a, b]);
        let vals = basis.eval(&x, Order::Second).unwrap();
        let mut sum = ws3_core::Jet::ZERO;
        for j in &vals {
            prop_assert!(j.value >= -1e-12);
            sum.add_scaled(j, 1.0);
        }
        let scale = 1.0 / t.area();
        prop_assert!((sum.value - 1.0).abs() < 1e-12);
        prop_assert!(sum.gradient.norm() < 1e-9 * scale);
        prop_assert!(sum.hessian.norm() < 1e-8 * scale * scale);
    }
}
