//! Smooth test functions with exact derivatives.

use std::str::FromStr;

use crate::error::{Error, Result};
use crate::poly::Cubic;
use crate::types::{Jet, Mat2, Vec2};

#[derive(Clone, Debug, PartialEq)]
pub enum TestFunction {
    /// Cubic with monomial coefficients `c00, c10, c01, c20, c11, c02, c30, c21, c12, c03`.
    Poly(Cubic),
    Franke,
    /// `sin(x) cos(y)`.
    SinCos,
}

/// `c · exp(q)` with `q = −(ka (9x − α)² + kb (9y − β)² + l (9y + 1))`.
struct Gauss {
    c: f64,
    ka: f64,
    alpha: f64,
    kb: f64,
    beta: f64,
    l: f64,
}

impl Gauss {
    fn jet(&self, x: &Vec2) -> Jet {
        let (u, v) = (9.0 * x.x - self.alpha, 9.0 * x.y - self.beta);
        let q = -(self.ka * u * u + self.kb * v * v + self.l * (9.0 * x.y + 1.0));
        let e = self.c * q.exp();
        let g = Vec2::new(-18.0 * self.ka * u, -18.0 * self.kb * v - 9.0 * self.l);
        let h = g * g.transpose() + Mat2::new(-162.0 * self.ka, 0.0, 0.0, -162.0 * self.kb);
        Jet { value: e, gradient: g * e, hessian: h * e }
    }
}

const FRANKE: [Gauss; 4] = [
    Gauss { c: 0.75, ka: 0.25, alpha: 2.0, kb: 0.25, beta: 2.0, l: 0.0 },
    Gauss { c: 0.75, ka: 1.0 / 49.0, alpha: -1.0, kb: 0.0, beta: 0.0, l: 0.1 },
    Gauss { c: 0.5, ka: 0.25, alpha: 7.0, kb: 0.25, beta: 3.0, l: 0.0 },
    Gauss { c: -0.2, ka: 1.0, alpha: 4.0, kb: 1.0, beta: 7.0, l: 0.0 },
];

impl TestFunction {
    pub fn jet(&self, x: &Vec2) -> Jet {
        match self {
            TestFunction::Poly(c) => c.jet(x),
            TestFunction::Franke => {
                let mut j = Jet::ZERO;
                for g in &FRANKE {
                    j.add_scaled(&g.jet(x), 1.0);
                }
                j
            }
            TestFunction::SinCos => {
                let (s, c) = x.x.sin_cos();
                let (sy, cy) = x.y.sin_cos();
                Jet {
                    value: s * cy,
                    gradient: Vec2::new(c * cy, -s * sy),
                    hessian: Mat2::new(-s * cy, -c * sy, -c * sy, -s * cy),
                }
            }
        }
    }
}

impl FromStr for TestFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "franke" => Ok(TestFunction::Franke),
            "sincos" => Ok(TestFunction::SinCos),
            _ => {
                let rest = s
                    .strip_prefix("poly:")
                    .ok_or_else(|| Error::InvalidArgument(format!("unknown function {s:?}")))?;
                let c: Vec<f64> = rest
                    .split(',')
                    .map(|p| p.trim().parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|e| Error::InvalidArgument(format!("bad coefficient in {s:?}: {e}")))?;
                if c.is_empty() || c.len() > 10 {
                    return Err(Error::InvalidArgument("poly takes 1 to 10 coefficients".into()));
                }
                let mut coef = [0.0; 10];
                coef[..c.len()].copy_from_slice(&c);
                Ok(TestFunction::Poly(Cubic::from_monomials(coef)))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_derivatives(f: &TestFunction, x: Vec2) {
        let h = 1e-5;
        let j = f.jet(&x);
        for (k, e) in [Vec2::new(h, 0.0), Vec2::new(0.0, h)].iter().enumerate() {
            let (p, m) = (f.jet(&(x + e)), f.jet(&(x - e)));
            let g = (p.value - m.value) / (2.0 * h);
            assert!((g - j.gradient[k]).abs() < 1e-6 * (1.0 + g.abs()));
            let hc = (p.gradient - m.gradient) / (2.0 * h);
            for r in 0..2 {
                assert!((hc[r] - j.hessian[(r, k)]).abs() < 1e-5 * (1.0 + hc[r].abs()));
            }
        }
    }

    #[test]
    fn derivatives_match_differences() {
        for f in ["franke", "sincos", "poly:1,2,3,4,5,6,7,8,9,10"] {
            check_derivatives(&f.parse().unwrap(), Vec2::new(0.31, 0.42));
        }
    }

    #[test]
    fn franke_value() {
        let v = TestFunction::Franke.jet(&Vec2::new(0.0, 0.0)).value;
        assert!((v - 0.766_420_591_284_923).abs() < 1e-14, "{v}");
    }

    #[test]
    fn bad_specs() {
        assert!("poly:".parse::<TestFunction>().is_err());
        assert!("cosh".parse::<TestFunction>().is_err());
    }
}
