use nalgebra::{Matrix2, Vector2};

use crate::error::{Error, Result};

pub type Vec2 = Vector2<f64>;
pub type Mat2 = Matrix2<f64>;

/// Value, gradient and Hessian of a function at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub gradient: Vec2,
    pub hessian: Mat2,
}

impl Jet {
    pub const ZERO: Jet = Jet {
        value: 0.0,
        gradient: Vec2::new(0.0, 0.0),
        hessian: Mat2::new(0.0, 0.0, 0.0, 0.0),
    };

    pub fn constant(value: f64) -> Self {
        Jet { value, ..Jet::ZERO }
    }

    pub fn scaled(&self, s: f64) -> Jet {
        Jet {
            value: self.value * s,
            gradient: self.gradient * s,
            hessian: self.hessian * s,
        }
    }

    pub fn add_scaled(&mut self, other: &Jet, s: f64) {
        self.value += s * other.value;
        self.gradient += other.gradient * s;
        self.hessian += other.hessian * s;
    }

    pub fn directional(&self, u: &Vec2) -> f64 {
        self.gradient.dot(u)
    }

    pub fn second_directional(&self, u: &Vec2, v: &Vec2) -> f64 {
        u.dot(&(self.hessian * v))
    }

    /// Components `[s, sx, sy, sxx, sxy, syy]`.
    pub fn components(&self) -> [f64; 6] {
        [
            self.value,
            self.gradient.x,
            self.gradient.y,
            self.hessian[(0, 0)],
            self.hessian[(0, 1)],
            self.hessian[(1, 1)],
        ]
    }

    pub fn is_finite(&self) -> bool {
        self.components().iter().all(|c| c.is_finite())
    }
}

/// Derivative order requested from an evaluator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Order {
    Value = 0,
    First = 1,
    Second = 2,
}

impl TryFrom<u8> for Order {
    type Error = Error;

    fn try_from(v: u8) -> Result<Self> {
        match v {
            0 => Ok(Order::Value),
            1 => Ok(Order::First),
            2 => Ok(Order::Second),
            _ => Err(Error::InvalidArgument(format!("derivative order {v} not in 0..=2"))),
        }
    }
}

/// Twice the signed area of `(a, b, c)`.
#[inline]
pub fn orient(a: &Vec2, b: &Vec2, c: &Vec2) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

/// A nondegenerate triangle with cached affine data.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Triangle {
    pub corners: [Vec2; 3],
    /// Signed area (positive for counterclockwise corners).
    pub signed_area: f64,
}

impl Triangle {
    /// Fails when the corners are collinear up to `1e-14 * diameter²`.
    pub fn new(p1: Vec2, p2: Vec2, p3: Vec2) -> Result<Self> {
        let a2 = orient(&p1, &p2, &p3);
        let diam2 = (p2 - p1)
            .norm_squared()
            .max((p3 - p1).norm_squared())
            .max((p3 - p2).norm_squared());
        if !a2.is_finite() || a2.abs() <= 1e-14 * diam2 || diam2 == 0.0 {
            return Err(Error::CollinearCorners);
        }
        Ok(Triangle {
            corners: [p1, p2, p3],
            signed_area: 0.5 * a2,
        })
    }

    pub fn from_coords(c: [f64; 6]) -> Result<Self> {
        Triangle::new(
            Vec2::new(c[0], c[1]),
            Vec2::new(c[2], c[3]),
            Vec2::new(c[4], c[5]),
        )
    }

    pub fn area(&self) -> f64 {
        self.signed_area.abs()
    }

    /// Maps barycentric coordinates to a Cartesian point.
    pub fn point(&self, b: [f64; 3]) -> Vec2 {
        self.corners[0] * b[0] + self.corners[1] * b[1] + self.corners[2] * b[2]
    }

    pub fn barycentric(&self, x: &Vec2) -> [f64; 3] {
        let [a, b, c] = &self.corners;
        let d = 2.0 * self.signed_area;
        [orient(x, b, c) / d, orient(a, x, c) / d, orient(a, b, x) / d]
    }

    pub fn centroid(&self) -> Vec2 {
        (self.corners[0] + self.corners[1] + self.corners[2]) / 3.0
    }

    /// Longest edge length.
    pub fn diameter(&self) -> f64 {
        let [a, b, c] = &self.corners;
        (b - a).norm().max((c - a).norm()).max((c - b).norm())
    }

    /// Outward unit normal of the edge opposite corner `k` (0-based).
    pub fn outward_normal(&self, k: usize) -> Vec2 {
        let a = self.corners[(k + 1) % 3];
        let b = self.corners[(k + 2) % 3];
        let t = (b - a).normalize();
        // for counterclockwise corners the outward side is to the right of a->b
        let n = Vec2::new(t.y, -t.x);
        if self.signed_area > 0.0 {
            n
        } else {
            -n
        }
    }

    /// Closed containment with barycentric slack `tol`.
    pub fn contains(&self, x: &Vec2, tol: f64) -> bool {
        self.barycentric(x).iter().all(|&b| b >= -tol)
    }
}
