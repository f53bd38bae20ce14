//! Bivariate cubic polynomials in a centered, scaled monomial basis.

use nalgebra::{DMatrix, DVector};

use crate::error::Result;
use crate::linalg::DenseLu;
use crate::types::{Jet, Mat2, Vec2};

/// Exponents `(i, j)` of the monomials `u^i v^j`, in storage order.
pub const CUBIC_EXPONENTS: [(i32, i32); 10] = [
    (0, 0),
    (1, 0),
    (0, 1),
    (2, 0),
    (1, 1),
    (0, 2),
    (3, 0),
    (2, 1),
    (1, 2),
    (0, 3),
];

/// `p(x) = Σ coef_k · m_k((x − center) / scale)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Cubic {
    pub center: Vec2,
    pub scale: f64,
    pub coef: [f64; 10],
}

fn monomials(u: f64, v: f64) -> [f64; 10] {
    [1.0, u, v, u * u, u * v, v * v, u * u * u, u * u * v, u * v * v, v * v * v]
}

impl Cubic {
    pub fn from_monomials(coef: [f64; 10]) -> Self {
        Cubic { center: Vec2::zeros(), scale: 1.0, coef }
    }

    pub fn eval(&self, x: &Vec2) -> f64 {
        let u = (x - self.center) / self.scale;
        monomials(u.x, u.y).iter().zip(&self.coef).map(|(m, c)| m * c).sum()
    }

    pub fn jet(&self, x: &Vec2) -> Jet {
        let s = self.scale;
        let u = (x - self.center) / s;
        let mut jet = Jet::ZERO;
        for (&(i, j), &c) in CUBIC_EXPONENTS.iter().zip(&self.coef) {
            if c == 0.0 {
                continue;
            }
            let p = |e: i32| if e < 0 { 0.0 } else { 1.0 };
            let pw = |b: f64, e: i32| if e <= 0 { 1.0 } else { b.powi(e) };
            let (fi, fj) = (i as f64, j as f64);
            jet.value += c * pw(u.x, i) * pw(u.y, j);
            jet.gradient.x += c * fi * p(i - 1) * pw(u.x, i - 1) * pw(u.y, j) / s;
            jet.gradient.y += c * fj * p(j - 1) * pw(u.x, i) * pw(u.y, j - 1) / s;
            let hxx = c * fi * (fi - 1.0) * p(i - 2) * pw(u.x, i - 2) * pw(u.y, j) / (s * s);
            let hyy = c * fj * (fj - 1.0) * p(j - 2) * pw(u.x, i) * pw(u.y, j - 2) / (s * s);
            let hxy = c * fi * fj * p(i - 1) * p(j - 1) * pw(u.x, i - 1) * pw(u.y, j - 1) / (s * s);
            jet.hessian += Mat2::new(hxx, hxy, hxy, hyy);
        }
        jet
    }

    /// Interpolates ten samples; fails when the nodes are not unisolvent.
    pub fn fit(nodes: &[Vec2; 10], values: &[f64; 10], center: Vec2, scale: f64) -> Result<Cubic> {
        let lu = DenseLu::new(&vandermonde(nodes, center, scale), "cubic interpolation")?;
        let c = lu.solve_vec(&DVector::from_row_slice(values))?;
        let mut coef = [0.0; 10];
        coef.copy_from_slice(c.as_slice());
        Ok(Cubic { center, scale, coef })
    }

    /// Fits several value vectors on the same nodes with one factorization.
    pub fn fit_many(
        nodes: &[Vec2; 10],
        values: &[[f64; 10]],
        center: Vec2,
        scale: f64,
    ) -> Result<Vec<Cubic>> {
        let lu = DenseLu::new(&vandermonde(nodes, center, scale), "cubic interpolation")?;
        values
            .iter()
            .map(|v| {
                let c = lu.solve_vec(&DVector::from_row_slice(v))?;
                let mut coef = [0.0; 10];
                coef.copy_from_slice(c.as_slice());
                Ok(Cubic { center, scale, coef })
            })
            .collect()
    }
}

fn vandermonde(nodes: &[Vec2; 10], center: Vec2, scale: f64) -> DMatrix<f64> {
    DMatrix::from_fn(10, 10, |r, c| {
        let u = (nodes[r] - center) / scale;
        monomials(u.x, u.y)[c]
    })
}

/// The ten cubic Bézier domain points `(i p1 + j p2 + k p3) / 3`, `i + j + k = 3`.
pub fn bezier_domain_points(p: &[Vec2; 3]) -> [Vec2; 10] {
    let mut out = [Vec2::zeros(); 10];
    let mut n = 0;
    for i in (0..=3).rev() {
        for j in (0..=(3 - i)).rev() {
            let k = 3 - i - j;
            out[n] = (p[0] * i as f64 + p[1] * j as f64 + p[2] * k as f64) / 3.0;
            n += 1;
        }
    }
    out
}
