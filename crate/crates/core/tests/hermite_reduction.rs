use proptest::prelude::*;
use ws3_core::basis::{dual_polynomials, symmetry_permutation};
use ws3_core::hermite::apply_functionals;
use ws3_core::poly::Cubic;
use ws3_core::reduction::{
    convert_bases, reduced_space, verify_poly_reproduction, InteriorFamilyPoint, InteriorPreset, ReductionMatrix,
    ReductionOptions, Side, SPACE_ORDERS,
};
use ws3_core::table2::table2_matrix;
use ws3_core::{BasisSet, CollocationMatrix, HermiteData, Jet, Order, Vec2};

fn v(x: f64, y: f64) -> Vec2 {
    Vec2::new(x, y)
}

fn setup() -> (BasisSet, CollocationMatrix) {
    let b = BasisSet::from_corners(v(0.0, 0.1), v(1.3, -0.2), v(0.4, 1.1)).unwrap();
    let c = CollocationMatrix::new(&b).unwrap();
    (b, c)
}

fn data_of(c: &CollocationMatrix, f: impl Fn(&Vec2) -> Jet) -> HermiteData {
    apply_functionals(c.functionals(), |x, _| Ok(f(x))).unwrap()
}

fn sincos(x: &Vec2) -> Jet {
    let (s, cs) = (x.x.sin(), x.y.cos());
    let (c, sn) = (x.x.cos(), x.y.sin());
    Jet {
        value: s * cs,
        gradient: Vec2::new(c * cs, -s * sn),
        hessian: ws3_core::types::Mat2::new(-s * cs, -c * sn, -c * sn, -s * cs),
    }
}

#[test]
fn cubic_is_interpolated_exactly() {
    let (b, c) = setup();
    let p = Cubic::from_monomials([0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0]);
    let coef = c.solve(&data_of(&c, |x| p.jet(x))).unwrap();
    for x in [v(0.3, 0.2), v(0.9, 0.0), v(0.4, 0.9)] {
        let s = b.combine(&coef, &x, Order::Second).unwrap();
        assert!((s.value - p.eval(&x)).abs() < 1e-12);
        assert!((s.hessian - p.jet(&x).hessian).norm() < 1e-10);
    }
}

#[test]
fn hermite_basis_is_biorthogonal() {
    let (b, c) = setup();
    let inv = c.inverse().unwrap();
    for j in [0, 4, 11, 19, 25, 27] {
        let coef: Vec<f64> = (0..28).map(|i| inv[(i, j)]).collect();
        let data = apply_functionals(c.functionals(), |x, probe| {
            let jets = b.eval_with_probe(x, probe, Order::Second);
            let mut s = Jet::ZERO;
            for (k, jet) in jets.iter().enumerate() {
                s.add_scaled(jet, coef[k]);
            }
            Ok(s)
        })
        .unwrap();
        for i in 0..28 {
            let expect = if i == j { 1.0 } else { 0.0 };
            assert!((data.values[i] - expect).abs() < 1e-10, "λ{}(H{})", i + 1, j + 1);
        }
    }
}

#[test]
fn smooth_data_round_trips() {
    let (b, c) = setup();
    let data = data_of(&c, sincos);
    let coef = c.solve(&data).unwrap();
    let back = apply_functionals(c.functionals(), |x, probe| {
        let jets = b.eval_with_probe(x, probe, Order::Second);
        let mut s = Jet::ZERO;
        for (k, jet) in jets.iter().enumerate() {
            s.add_scaled(jet, coef[k]);
        }
        Ok(s)
    })
    .unwrap();
    for i in 0..28 {
        assert!((back.values[i] - data.values[i]).abs() < 1e-12);
    }
}

#[test]
fn interior_second_derivative_row_mirrors_its_partner() {
    // reflection x↔y maps λ24 to λ27 on the unit triangle
    let b = BasisSet::from_corners(v(0.0, 0.0), v(1.0, 0.0), v(0.0, 1.0)).unwrap();
    let c = CollocationMatrix::new(&b).unwrap();
    let perm = symmetry_permutation([0, 2, 1]);
    let m = c.matrix();
    let printed = table2_matrix(1.0);
    for j in 0..28 {
        assert!((m[(26, perm[j])] - m[(23, j)]).abs() < 1e-10, "column {}", j + 1);
        assert!((m[(26, j)] - printed[(26, j)] / 2.0).abs() < 1e-10, "column {}", j + 1);
    }
}

#[test]
fn perturbed_family_point_leaves_a_proportional_residual() {
    let (b, c) = setup();
    let d = dual_polynomials(&b, &c).unwrap();
    let mut r = InteriorFamilyPoint::preset(InteriorPreset::Eq10).reduction();
    assert!(verify_poly_reproduction(&r, &d).unwrap() < 1e-10);
    r.r21[(0, 0)] += 1e-3;
    let res = verify_poly_reproduction(&r, &d).unwrap();
    let psi1 = d.nodes.iter().map(|y| d.eval(y)[0].abs()).fold(0.0, f64::max);
    assert!((res / (1e-3 * psi1) - 1.0).abs() < 1e-6, "{res} vs {}", 1e-3 * psi1);
}

#[test]
fn zero_reduction_misses_cubics() {
    let (b, c) = setup();
    let d = dual_polynomials(&b, &c).unwrap();
    let r = ReductionMatrix::new(27, Side::Simplex, nalgebra::DMatrix::zeros(1, 27)).unwrap();
    let psi28 = d.nodes.iter().map(|y| d.eval(y)[27].abs()).fold(0.0, f64::max);
    assert!((verify_poly_reproduction(&r, &d).unwrap() - psi28).abs() < 1e-12);
}

#[test]
fn eq9_preset_round_trips_between_bases() {
    let (_, c) = setup();
    let r = InteriorFamilyPoint::preset(InteriorPreset::Eq9).reduction();
    let back = convert_bases(&c, &convert_bases(&c, &r).unwrap()).unwrap();
    assert!((back.r21 - r.r21).abs().max() < 1e-12);
}

#[test]
fn reduced_basis_matches_hermite_side() {
    // B^m = Ĥ^m C11 as functions: compare at sample points
    let (b, c) = setup();
    let inv = c.inverse().unwrap();
    for m in [18, 21, 27] {
        let s = reduced_space(&c, m, &ReductionOptions::default()).unwrap();
        let (c11, _, _) = c.blocks(m).unwrap();
        let bm = s.simplex.full();
        let hm = &inv * s.hermite.full();
        // simplex coefficients of B^m_j and of Σ_i Ĥ^m_i (C11)_ij
        let lhs = {
            let mut full = nalgebra::DMatrix::identity(28, 28);
            full.view_mut((0, 0), (28, m)).copy_from(&bm);
            full.columns(0, m).into_owned()
        };
        let rhs = &hm * &c11;
        for x in [v(0.2, 0.3), v(0.9, 0.0)] {
            let jets = b.eval(&x, Order::Value).unwrap();
            for j in 0..m {
                let a: f64 = (0..28).map(|k| lhs[(k, j)] * jets[k].value).sum();
                let r: f64 = (0..28).map(|k| rhs[(k, j)] * jets[k].value).sum();
                assert!((a - r).abs() < 1e-9 * (1.0 + a.abs()), "m = {m}, j = {}", j + 1);
            }
        }
    }
}

#[test]
fn reduced_spaces_reproduce_cubics() {
    let (b, c) = setup();
    let p = Cubic::from_monomials([0.3, -1.0, 0.5, 0.2, 0.7, -0.4, 1.1, 0.0, -0.6, 0.9]);
    let data = data_of(&c, |x| p.jet(x));
    for m in SPACE_ORDERS {
        let s = reduced_space(&c, m, &ReductionOptions::default()).unwrap();
        let coef = s.interpolate(&c, &data).unwrap();
        let x = v(0.5, 0.4);
        assert!((b.combine(&coef, &x, Order::Value).unwrap().value - p.eval(&x)).abs() < 1e-11, "m = {m}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn family_members_satisfy_the_equations(r2 in -2.0f64..2.0, r3 in -2.0f64..2.0, r5 in -2.0f64..2.0) {
        let p = InteriorFamilyPoint::from_params(r2, r3, r5);
        prop_assert!(p.family_residual() < 1e-12);
        prop_assert!(p.min_coefficient() < 0.0);
    }

    #[test]
    fn family_reproduces_cubics(r2 in -1.0f64..1.0, r3 in -1.0f64..1.0, r5 in -1.0f64..1.0) {
        let (b, c) = setup();
        let d = dual_polynomials(&b, &c).unwrap();
        let r = InteriorFamilyPoint::from_params(r2, r3, r5).reduction();
        prop_assert!(verify_poly_reproduction(&r, &d).unwrap() < 1e-9);
    }

    #[test]
    fn conversion_round_trips(r2 in -1.0f64..1.0, r3 in -1.0f64..1.0, r5 in -1.0f64..1.0) {
        let (_, c) = setup();
        let r = InteriorFamilyPoint::from_params(r2, r3, r5).reduction();
        let back = convert_bases(&c, &convert_bases(&c, &r).unwrap()).unwrap();
        let scale = 1.0 + r.r21.abs().max();
        prop_assert!((back.r21 - r.r21).abs().max() < 1e-11 * scale);
    }
}
