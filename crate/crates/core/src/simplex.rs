//! Bivariate cubic simplex splines with six knots.
//!
//! `M(x | K)` is normalized to unit integral and evaluated with the
//! knot-removal recurrence
//!
//! ```text
//! M(x | K) = n / (n − 2) · Σ_j λ_j(x) M(x | K \ k_j),   Σ λ_j k_j = x, Σ λ_j = 1,
//! D_u M(x | K) = n · Σ_j μ_j M(x | K \ k_j),           Σ μ_j k_j = u, Σ μ_j = 0,
//! ```
//!
//! where `n + 1` is the number of knots and the sums run over a pivot
//! triple of knots. The recurrence bottoms out at three knots, where `M` is
//! the indicator of their triangle divided by its area. Sub-multisets whose
//! knots are collinear are line measures; they vanish off their line and
//! are dropped.
//!
//! A simplex spline is a different polynomial on each cell of its knot-line
//! arrangement, so evaluation needs a region. [`Region::Probe`] names a
//! point strictly inside the wanted cell; [`Region::Limit`] takes the limit
//! `x + ε d` for a fixed generic direction `d`, which makes evaluation on
//! knot lines deterministic without any geometry.

use crate::error::{Error, Result};
use crate::types::{orient, Jet, Mat2, Order, Vec2};

const FULL: usize = 0b11_1111;

/// Relative threshold on `|det| / diam²` below which a knot triple is
/// treated as collinear.
pub const INDEPENDENCE_TOL: f64 = 1e-10;

/// Six planar knots, repetitions encoding multiplicity.
#[derive(Clone, Debug, PartialEq)]
pub struct KnotMultiset {
    knots: [Vec2; 6],
    diameter: f64,
}

impl KnotMultiset {
    pub fn new(knots: [Vec2; 6]) -> Result<Self> {
        if knots.iter().any(|k| !k.x.is_finite() || !k.y.is_finite()) {
            return Err(Error::DegenerateKnots("non-finite knot".into()));
        }
        let mut diameter: f64 = 0.0;
        for i in 0..6 {
            for j in i + 1..6 {
                diameter = diameter.max((knots[i] - knots[j]).norm());
            }
        }
        let ks = KnotMultiset { knots, diameter };
        if ks.pivot(FULL).is_none() {
            return Err(Error::DegenerateKnots("knots are collinear".into()));
        }
        Ok(ks)
    }

    pub fn knots(&self) -> &[Vec2; 6] {
        &self.knots
    }

    pub fn hull_diameter(&self) -> f64 {
        self.diameter
    }

    /// Lexicographically first knot triple (by position) of largest
    /// `|det|` among the knots in `mask`; `None` if all are collinear.
    fn pivot(&self, mask: usize) -> Option<[usize; 3]> {
        let idx: Vec<usize> = (0..6).filter(|i| mask & (1 << i) != 0).collect();
        let tol = INDEPENDENCE_TOL * self.diameter * self.diameter;
        let mut best: Option<(f64, [usize; 3])> = None;
        for a in 0..idx.len() {
            for b in a + 1..idx.len() {
                for c in b + 1..idx.len() {
                    let t = [idx[a], idx[b], idx[c]];
                    let d = orient(&self.knots[t[0]], &self.knots[t[1]], &self.knots[t[2]]).abs();
                    if d > tol && best.is_none_or(|(bd, _)| d > bd * (1.0 + 1e-12)) {
                        best = Some((d, t));
                    }
                }
            }
        }
        best.map(|(_, t)| t)
    }
}

/// Pivot triple and barycentric weights of `x` used at the top level of
/// the recurrence.
pub fn recurrence_weights(k: &KnotMultiset, x: &Vec2) -> Result<([usize; 3], [f64; 3])> {
    let t = k
        .pivot(FULL)
        .ok_or_else(|| Error::DegenerateKnots("no affinely independent triple".into()))?;
    Ok((t, barycentric(&k.knots, &t, x)))
}

fn barycentric(knots: &[Vec2; 6], t: &[usize; 3], x: &Vec2) -> [f64; 3] {
    let (a, b, c) = (&knots[t[0]], &knots[t[1]], &knots[t[2]]);
    let d = orient(a, b, c);
    let l1 = orient(x, b, c) / d;
    let l2 = orient(a, x, c) / d;
    [l1, l2, 1.0 - l1 - l2]
}

/// Selects the polynomial piece used for evaluation.
#[derive(Clone, Copy, Debug)]
pub enum Region {
    /// The piece of the cell containing this point (must not lie on a
    /// knot line).
    Probe(Vec2),
    /// The piece containing `x + ε d1 (+ ε² d2)` for small `ε > 0`.
    Limit { d1: Vec2, d2: Vec2 },
}

impl Region {
    /// Generic directions, not parallel to any line through points with
    /// rational coordinates of small height.
    pub fn generic() -> Self {
        Region::Limit {
            d1: Vec2::new(1.0, 0.618_033_988_749_894_9),
            d2: Vec2::new(-0.414_213_562_373_095_1, 1.0),
        }
    }

    fn inside(&self, x: &Vec2, tri: &[Vec2; 3]) -> bool {
        let [a, b, c] = tri;
        let d = orient(a, b, c);
        match self {
            Region::Probe(p) => {
                orient(p, b, c) / d > 0.0 && orient(a, p, c) / d > 0.0 && orient(a, b, p) / d > 0.0
            }
            Region::Limit { d1, d2 } => {
                let bary = [orient(x, b, c) / d, orient(a, x, c) / d, orient(a, b, x) / d];
                // gradients of the barycentric coordinates
                let grads = [
                    Vec2::new(b.y - c.y, c.x - b.x) / d,
                    Vec2::new(c.y - a.y, a.x - c.x) / d,
                    Vec2::new(a.y - b.y, b.x - a.x) / d,
                ];
                (0..3).all(|i| {
                    if bary[i].abs() > 1e-12 {
                        return bary[i] > 0.0;
                    }
                    let g = grads[i];
                    let gn = g.norm();
                    let s1 = g.dot(d1);
                    if s1.abs() > 1e-9 * gn * d1.norm() {
                        return s1 > 0.0;
                    }
                    g.dot(d2) > 0.0
                })
            }
        }
    }
}

#[derive(Clone, Debug)]
enum Node {
    Degenerate,
    Base { tri: [Vec2; 3], inv_area: f64 },
    Inner { pivot: [usize; 3], mu_x: [f64; 3], mu_y: [f64; 3] },
}

/// A simplex spline with its recurrence pre-planned for every
/// sub-multiset.
#[derive(Clone, Debug)]
pub struct SimplexSpline {
    knots: KnotMultiset,
    nodes: Vec<Node>,
}

/// Masks with at least three knots, by increasing size.
fn mask_order() -> &'static [usize] {
    use std::sync::OnceLock;
    static ORDER: OnceLock<Vec<usize>> = OnceLock::new();
    ORDER.get_or_init(|| {
        let mut m: Vec<usize> = (0..64).filter(|m: &usize| m.count_ones() >= 3).collect();
        m.sort_by_key(|m| (m.count_ones(), *m));
        m
    })
}

impl SimplexSpline {
    pub fn new(knots: KnotMultiset) -> Self {
        let mut nodes = vec![Node::Degenerate; 64];
        for &mask in mask_order() {
            let Some(p) = knots.pivot(mask) else { continue };
            nodes[mask] = if mask.count_ones() == 3 {
                let tri = p.map(|i| knots.knots[i]);
                Node::Base { tri, inv_area: 2.0 / orient(&tri[0], &tri[1], &tri[2]).abs() }
            } else {
                let base = knots.knots[p[0]];
                let l0 = barycentric(&knots.knots, &p, &base);
                let lx = barycentric(&knots.knots, &p, &(base + Vec2::new(1.0, 0.0)));
                let ly = barycentric(&knots.knots, &p, &(base + Vec2::new(0.0, 1.0)));
                Node::Inner {
                    pivot: p,
                    mu_x: std::array::from_fn(|i| lx[i] - l0[i]),
                    mu_y: std::array::from_fn(|i| ly[i] - l0[i]),
                }
            };
        }
        SimplexSpline { knots, nodes }
    }

    pub fn from_knots(knots: [Vec2; 6]) -> Result<Self> {
        Ok(SimplexSpline::new(KnotMultiset::new(knots)?))
    }

    pub fn knots(&self) -> &KnotMultiset {
        &self.knots
    }

    /// Values of `M(x | K_mask)` for all masks.
    fn values(&self, x: &Vec2, region: &Region) -> [f64; 64] {
        let mut val = [0.0; 64];
        for &mask in mask_order() {
            val[mask] = match &self.nodes[mask] {
                Node::Degenerate => 0.0,
                Node::Base { tri, inv_area } => {
                    if region.inside(x, tri) {
                        *inv_area
                    } else {
                        0.0
                    }
                }
                Node::Inner { pivot, .. } => {
                    let n = mask.count_ones() as f64 - 1.0;
                    let lam = barycentric(&self.knots.knots, pivot, x);
                    let s: f64 = (0..3).map(|i| lam[i] * val[mask & !(1 << pivot[i])]).sum();
                    n / (n - 2.0) * s
                }
            };
        }
        val
    }

    /// `D_u M(x | K_mask)` from child values, for `u` given by the
    /// per-node direction weights.
    fn first_derivative(&self, mask: usize, val: &[f64; 64], dir: Vec2) -> f64 {
        match &self.nodes[mask] {
            Node::Inner { pivot, mu_x, mu_y } => {
                let n = mask.count_ones() as f64 - 1.0;
                let mu = combine(dir, mu_x, mu_y);
                n * (0..3).map(|i| mu[i] * val[mask & !(1 << pivot[i])]).sum::<f64>()
            }
            _ => 0.0,
        }
    }

    /// Value and derivatives up to `order` of the piece selected by `region`.
    pub fn eval_region(&self, x: &Vec2, region: &Region, order: Order) -> Jet {
        let val = self.values(x, region);
        let mut jet = Jet::constant(val[FULL]);
        if order == Order::Value {
            return jet;
        }
        jet.gradient = Vec2::new(
            self.first_derivative(FULL, &val, Vec2::x()),
            self.first_derivative(FULL, &val, Vec2::y()),
        );
        if order == Order::First {
            return jet;
        }
        let Node::Inner { pivot, mu_x, mu_y } = &self.nodes[FULL] else {
            return jet;
        };
        // first derivatives of the five-knot children
        let mut gx = [0.0; 3];
        let mut gy = [0.0; 3];
        for i in 0..3 {
            let child = FULL & !(1 << pivot[i]);
            gx[i] = self.first_derivative(child, &val, Vec2::x());
            gy[i] = self.first_derivative(child, &val, Vec2::y());
        }
        let n = 5.0;
        let hxx = n * (0..3).map(|i| mu_x[i] * gx[i]).sum::<f64>();
        let hxy = n * (0..3).map(|i| mu_x[i] * gy[i]).sum::<f64>();
        let hyy = n * (0..3).map(|i| mu_y[i] * gy[i]).sum::<f64>();
        jet.hessian = Mat2::new(hxx, hxy, hxy, hyy);
        jet
    }

    /// Evaluation with the generic directional-limit convention.
    pub fn eval(&self, x: &Vec2, order: Order) -> Jet {
        self.eval_region(x, &Region::generic(), order)
    }

    /// Evaluation of the piece of the cell containing `probe`.
    pub fn eval_in_region(&self, x: &Vec2, probe: &Vec2, order: Order) -> Jet {
        self.eval_region(x, &Region::Probe(*probe), order)
    }

    /// Mixed directional derivative `D_{d1} … D_{dk} M(x)`, `k ≤ 3`.
    pub fn directional(&self, x: &Vec2, region: &Region, dirs: &[Vec2]) -> Result<f64> {
        if dirs.len() > 3 {
            return Err(Error::InvalidArgument(format!(
                "derivative of order {} exceeds the degree",
                dirs.len()
            )));
        }
        let val = self.values(x, region);
        Ok(self.directional_rec(FULL, &val, dirs))
    }

    fn directional_rec(&self, mask: usize, val: &[f64; 64], dirs: &[Vec2]) -> f64 {
        let Some((u, rest)) = dirs.split_first() else {
            return val[mask];
        };
        match &self.nodes[mask] {
            Node::Inner { pivot, mu_x, mu_y } => {
                let n = mask.count_ones() as f64 - 1.0;
                let mu = combine(*u, mu_x, mu_y);
                n * (0..3)
                    .map(|i| mu[i] * self.directional_rec(mask & !(1 << pivot[i]), val, rest))
                    .sum::<f64>()
            }
            _ => 0.0,
        }
    }
}

fn combine(u: Vec2, mu_x: &[f64; 3], mu_y: &[f64; 3]) -> [f64; 3] {
    std::array::from_fn(|i| u.x * mu_x[i] + u.y * mu_y[i])
}
