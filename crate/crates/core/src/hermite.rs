//! The 28 Hermite functionals of the split triangle and the collocation
//! matrix `c_ij = λ_i(B_j)`.

use nalgebra::{DMatrix, DVector};

use crate::basis::BasisSet;
use crate::error::{Error, Result};
use crate::linalg::{condition_number, DenseLu};
use crate::types::{Jet, Order, Vec2};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FunctionalKind {
    Value,
    Dx,
    Dy,
    Dxx,
    Dyy,
    Dxy,
    /// First derivative along an edge normal.
    Normal,
    /// Second derivative along an edge normal.
    NormalSecond,
}

#[derive(Clone, Debug)]
pub struct HermiteFunctional {
    pub kind: FunctionalKind,
    pub anchor: Vec2,
    pub anchor_name: &'static str,
    /// Edge (0-based index of the opposite corner) for normal functionals.
    pub edge: Option<usize>,
    /// Normal used for differentiation (zero for axis functionals).
    pub direction: Vec2,
    /// `direction · n` for the outward normal `n` of the edge; `1` when the
    /// outward normal is used directly.
    pub sign: f64,
    /// A point inside the cell whose polynomial piece is differentiated.
    pub probe: Vec2,
}

impl HermiteFunctional {
    pub fn apply(&self, j: &Jet) -> f64 {
        match self.kind {
            FunctionalKind::Value => j.value,
            FunctionalKind::Dx => j.gradient.x,
            FunctionalKind::Dy => j.gradient.y,
            FunctionalKind::Dxx => j.hessian[(0, 0)],
            FunctionalKind::Dyy => j.hessian[(1, 1)],
            FunctionalKind::Dxy => j.hessian[(0, 1)],
            FunctionalKind::Normal => j.directional(&self.direction),
            FunctionalKind::NormalSecond => j.second_directional(&self.direction, &self.direction),
        }
    }

    pub fn order(&self) -> Order {
        match self.kind {
            FunctionalKind::Value => Order::Value,
            FunctionalKind::Dx | FunctionalKind::Dy | FunctionalKind::Normal => Order::First,
            _ => Order::Second,
        }
    }

    pub fn label(&self) -> String {
        let k = match self.kind {
            FunctionalKind::Value => "f",
            FunctionalKind::Dx => "Dx",
            FunctionalKind::Dy => "Dy",
            FunctionalKind::Dxx => "Dxx",
            FunctionalKind::Dyy => "Dyy",
            FunctionalKind::Dxy => "Dxy",
            FunctionalKind::Normal => "Dn",
            FunctionalKind::NormalSecond => "Dnn",
        };
        format!("{k}({})", self.anchor_name)
    }
}

/// The functionals on `basis`'s triangle. `normals[k]`, when given,
/// replaces the outward normal of the edge opposite corner `k`; it must be
/// a unit vector parallel to it.
pub fn functionals(basis: &BasisSet, normals: Option<&[Vec2; 3]>) -> Result<Vec<HermiteFunctional>> {
    use crate::geometry::BoundaryPoint as B;
    use FunctionalKind::*;
    let g = basis.geometry();
    let t = &g.triangle;
    let p = t.corners;
    let [q1, q2, q3] = g.midpoints;
    let outward: [Vec2; 3] = std::array::from_fn(|k| t.outward_normal(k));
    let dir: [Vec2; 3] = match normals {
        Some(n) => *n,
        None => outward,
    };
    for k in 0..3 {
        let s = dir[k].dot(&outward[k]);
        if (s.abs() - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!("normal {k} is not a unit normal of its edge")));
        }
    }
    let mut out = Vec::with_capacity(28);
    let mut push = |kind, anchor: Vec2, name: &'static str, edge: Option<usize>| -> Result<()> {
        let (direction, sign) = match edge {
            Some(k) => (dir[k], dir[k].dot(&outward[k]).signum()),
            None => (Vec2::zeros(), 1.0),
        };
        out.push(HermiteFunctional { kind, anchor, anchor_name: name, edge, direction, sign, probe: basis.probe(&anchor)? });
        Ok(())
    };
    let names = ["p1", "p2", "p3"];
    for k in 0..3 {
        push(Value, p[k], names[k], None)?;
    }
    for k in 0..3 {
        push(Dx, p[k], names[k], None)?;
        push(Dy, p[k], names[k], None)?;
    }
    for k in 0..3 {
        push(Dxx, p[k], names[k], None)?;
        push(Dyy, p[k], names[k], None)?;
    }
    for k in 0..3 {
        push(Dxy, p[k], names[k], None)?;
    }
    push(Normal, q3, "q3", Some(2))?;
    push(Normal, q1, "q1", Some(0))?;
    push(Normal, q2, "q2", Some(1))?;
    for (b, name, edge) in [
        (B::P31, "p31", 2),
        (B::P21, "p21", 1),
        (B::P12, "p12", 0),
        (B::P32, "p32", 2),
        (B::P23, "p23", 1),
        (B::P13, "p13", 0),
    ] {
        push(NormalSecond, g.boundary_point(b), name, Some(edge))?;
    }
    push(Value, g.barycenter, "q", None)?;
    Ok(out)
}

/// The 28 values `λ_i(f)`.
#[derive(Clone, Debug, PartialEq)]
pub struct HermiteData {
    pub values: [f64; 28],
}

impl HermiteData {
    pub fn to_vector(&self) -> DVector<f64> {
        DVector::from_row_slice(&self.values)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

/// Applies the functionals to `f`, which maps `(point, probe)` to the jet
/// of the function at the point (the probe selects a piece for piecewise
/// functions and may be ignored otherwise).
pub fn apply_functionals<F>(funcs: &[HermiteFunctional], mut f: F) -> Result<HermiteData>
where
    F: FnMut(&Vec2, &Vec2) -> Result<Jet>,
{
    if funcs.len() != 28 {
        return Err(Error::InvalidArgument(format!("expected 28 functionals, got {}", funcs.len())));
    }
    let mut values = [0.0; 28];
    for (v, l) in values.iter_mut().zip(funcs) {
        let jet = f(&l.anchor, &l.probe)?;
        if !jet.is_finite() {
            return Err(Error::Evaluator(format!("non-finite jet at {}", l.label())));
        }
        *v = l.apply(&jet);
    }
    Ok(HermiteData { values })
}

/// Orders at which the matrix is block lower triangular.
pub const BLOCK_SPLITS: [usize; 5] = [3, 9, 18, 21, 27];

#[derive(Clone, Debug)]
pub struct CollocationMatrix {
    matrix: DMatrix<f64>,
    functionals: Vec<HermiteFunctional>,
    lu: DenseLu,
}

impl CollocationMatrix {
    /// Collocation with outward edge normals.
    pub fn new(basis: &BasisSet) -> Result<Self> {
        Self::with_functionals(basis, functionals(basis, None)?)
    }

    /// Collocation with the given edge normals (see [`functionals`]).
    pub fn with_normals(basis: &BasisSet, normals: &[Vec2; 3]) -> Result<Self> {
        Self::with_functionals(basis, functionals(basis, Some(normals))?)
    }

    fn with_functionals(basis: &BasisSet, functionals: Vec<HermiteFunctional>) -> Result<Self> {
        let mut matrix = DMatrix::zeros(28, 28);
        for (i, l) in functionals.iter().enumerate() {
            let b = basis.eval_with_probe(&l.anchor, &l.probe, l.order());
            for (j, bj) in b.iter().enumerate() {
                matrix[(i, j)] = l.apply(bj);
            }
        }
        let lu = DenseLu::new(&matrix, "collocation matrix")?;
        Ok(CollocationMatrix { matrix, functionals, lu })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn functionals(&self) -> &[HermiteFunctional] {
        &self.functionals
    }

    /// Largest entry of the upper-right `m × (28 − m)` block.
    pub fn upper_block_max(&self, m: usize) -> f64 {
        self.matrix.view((0, m), (m, 28 - m)).amax()
    }

    /// `(C11, C21, C22)` for the split at `m`.
    pub fn blocks(&self, m: usize) -> Result<(DMatrix<f64>, DMatrix<f64>, DMatrix<f64>)> {
        if m == 0 || m >= 28 {
            return Err(Error::InvalidArgument(format!("block split {m} out of range")));
        }
        let c11 = self.matrix.view((0, 0), (m, m)).into_owned();
        let c21 = self.matrix.view((m, 0), (28 - m, m)).into_owned();
        let c22 = self.matrix.view((m, m), (28 - m, 28 - m)).into_owned();
        Ok((c11, c21, c22))
    }

    /// Condition numbers of the two diagonal blocks at split `m`.
    pub fn diagonal_conditions(&self, m: usize) -> Result<(f64, f64)> {
        let (c11, _, c22) = self.blocks(m)?;
        Ok((condition_number(&c11), condition_number(&c22)))
    }

    /// Simplex coefficients `c` with `C c = data`.
    pub fn solve(&self, data: &HermiteData) -> Result<[f64; 28]> {
        let c = self.lu.solve_vec(&data.to_vector())?;
        Ok(std::array::from_fn(|j| c[j]))
    }

    pub fn inverse(&self) -> Result<DMatrix<f64>> {
        self.lu.inverse()
    }
}

/// Coefficients of the unique spline with the given Hermite data.
pub fn hermite_interpolate(c: &CollocationMatrix, data: &HermiteData) -> Result<[f64; 28]> {
    c.solve(data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::table2::table2_matrix;

    fn reference(h: f64) -> BasisSet {
        BasisSet::from_corners(Vec2::new(0.0, 0.0), Vec2::new(h, 0.0), Vec2::new(0.0, h)).unwrap()
    }

    #[test]
    fn constant_data() {
        let b = reference(1.0);
        let f = functionals(&b, None).unwrap();
        let d = apply_functionals(&f, |_, _| Ok(Jet::constant(1.0))).unwrap();
        for (i, v) in d.values.iter().enumerate() {
            let want = if i < 3 || i == 27 { 1.0 } else { 0.0 };
            assert_eq!(*v, want);
        }
    }

    #[test]
    fn linear_data() {
        let b = reference(1.0);
        let f = functionals(&b, None).unwrap();
        let d = apply_functionals(&f, |x, _| {
            Ok(Jet { value: x.x, gradient: Vec2::new(1.0, 0.0), ..Jet::ZERO })
        })
        .unwrap();
        assert_eq!(d.values[3], 1.0);
        assert_eq!(d.values[4], 0.0);
        assert!(d.values[18].abs() < 1e-15);
    }

    #[test]
    fn entry_scaling_with_h() {
        let c = CollocationMatrix::new(&reference(2.0)).unwrap();
        assert!((c.matrix()[(9, 0)] - 13.5).abs() < 1e-12);
        assert!((c.matrix()[(27, 21)] - 1.0 / 12.0).abs() < 1e-14);
    }

    #[test]
    fn rows_agree_with_printed_values_except_one() {
        // all printed rows match; the last second-normal-derivative row is
        // printed at twice its value
        let c = CollocationMatrix::new(&reference(1.0)).unwrap();
        let t = table2_matrix(1.0);
        for i in 0..28 {
            for j in 0..28 {
                let want = if i == 26 { t[(i, j)] / 2.0 } else { t[(i, j)] };
                assert!((c.matrix()[(i, j)] - want).abs() < 1e-11 * (1.0 + want.abs()), "({i},{j})");
            }
        }
    }

    #[test]
    fn flipped_normals_flip_only_first_derivative_rows() {
        let b = reference(1.0);
        let t = b.triangle();
        let flipped: [Vec2; 3] = std::array::from_fn(|k| -t.outward_normal(k));
        let c = CollocationMatrix::new(&b).unwrap();
        let f = CollocationMatrix::with_normals(&b, &flipped).unwrap();
        for i in 0..28 {
            let s = if (18..21).contains(&i) { -1.0 } else { 1.0 };
            for j in 0..28 {
                assert!((f.matrix()[(i, j)] - s * c.matrix()[(i, j)]).abs() < 1e-12);
            }
        }
        assert!(f.functionals()[19].sign < 0.0);
    }

    #[test]
    fn unit_data_gives_biorthogonal_functions() {
        let c = CollocationMatrix::new(&reference(1.0)).unwrap();
        let h = c.inverse().unwrap();
        let prod = c.matrix() * &h;
        let err = (prod - DMatrix::<f64>::identity(28, 28)).amax();
        assert!(err < 1e-9, "{err}");
    }
}
