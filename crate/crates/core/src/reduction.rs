//! Reduced local spaces: subspaces of the 28-dimensional macro-element
//! space cut out by expressing some Hermite functionals through the others
//! while keeping all cubics.
//!
//! A subspace of dimension `m` is written either as `Ĥ^m = H R_H` in the
//! Hermite basis or as `B^m = B R_B` in the simplex basis, with
//! `R = [I_m; R21]`. The two descriptions agree when
//! `R_H21 C11 = C22 R_B21 + C21` for the blocks of the collocation matrix
//! split at `m`.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::Rng;

use crate::basis::{group_of, DualPolynomialTable};
use crate::error::{Error, Result};
use crate::hermite::{CollocationMatrix, HermiteData};
use crate::linalg::{right_divide, DenseLu};
use crate::types::Vec2;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Hermite,
    Simplex,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReductionMatrix {
    pub m: usize,
    pub side: Side,
    /// `(28 − m) × m` lower block.
    pub r21: DMatrix<f64>,
}

impl ReductionMatrix {
    pub fn new(m: usize, side: Side, r21: DMatrix<f64>) -> Result<Self> {
        if m == 0 || m > 28 || r21.shape() != (28 - m, m) {
            return Err(Error::InvalidArgument(format!(
                "reduction block for m = {m} has shape {:?}",
                r21.shape()
            )));
        }
        Ok(ReductionMatrix { m, side, r21 })
    }

    /// The full `28 × m` matrix `[I; R21]`.
    pub fn full(&self) -> DMatrix<f64> {
        let mut r = DMatrix::zeros(28, self.m);
        r.view_mut((0, 0), (self.m, self.m)).fill_with_identity();
        r.view_mut((self.m, 0), (28 - self.m, self.m)).copy_from(&self.r21);
        r
    }
}

/// Converts a reduction matrix to the other basis.
pub fn convert_bases(c: &CollocationMatrix, known: &ReductionMatrix) -> Result<ReductionMatrix> {
    let m = known.m;
    let (c11, c21, c22) = c.blocks(m)?;
    match known.side {
        Side::Simplex => {
            // R_H21 = (C22 R_B21 + C21) C11⁻¹
            let rhs = &c22 * &known.r21 + &c21;
            ReductionMatrix::new(m, Side::Hermite, right_divide(&rhs, &c11, "block C11")?)
        }
        Side::Hermite => {
            // R_B21 = C22⁻¹ (R_H21 C11 − C21)
            let lu = DenseLu::new(&c22, "block C22")?;
            ReductionMatrix::new(m, Side::Simplex, lu.solve(&(&known.r21 * &c11 - &c21))?)
        }
    }
}

/// Coefficients `(r̂1, …, r̂6)`, one per symmetry group of the first 27
/// basis functions, of `B_j^27 = B_j + r_j B_28`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InteriorFamilyPoint {
    pub r: [f64; 6],
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InteriorPreset {
    /// Many vanishing coefficients.
    Eq9,
    /// Least negative coefficients (the default).
    Eq10,
    /// Nonzero only on twelve of the eighteen vertex functions.
    Vertex12,
    /// Nonzero only on functions without vertex knots of multiplicity > 1.
    InteriorOnly,
}

impl InteriorPreset {
    pub const ALL: [InteriorPreset; 4] =
        [InteriorPreset::Eq9, InteriorPreset::Eq10, InteriorPreset::Vertex12, InteriorPreset::InteriorOnly];

    /// The printed coefficients.
    pub fn printed(self) -> [f64; 6] {
        match self {
            InteriorPreset::Eq9 => [-4.0 / 9.0, 0.0, 0.0, 67.0 / 54.0, -25.0 / 54.0, 0.0],
            InteriorPreset::Eq10 => {
                let a = -1.0 / 29.0;
                [14.0 / 435.0, a, a, a, a, 221.0 / 870.0]
            }
            InteriorPreset::Vertex12 => [-2.0 / 27.0, -5.0 / 27.0, 0.0, 7.0 / 9.0, 0.0, 0.0],
            InteriorPreset::InteriorOnly => [0.0, 0.0, 0.0, -1.0 / 18.0, -5.0 / 18.0, 1.0 / 3.0],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            InteriorPreset::Eq9 => "eq9",
            InteriorPreset::Eq10 => "eq10",
            InteriorPreset::Vertex12 => "vertex12",
            InteriorPreset::InteriorOnly => "interior-only",
        }
    }
}

impl InteriorFamilyPoint {
    /// The family member with free parameters `r̂2, r̂3, r̂5`.
    pub fn from_params(r2: f64, r3: f64, r5: f64) -> Self {
        let r1 = 4.0 * r2 + 12.0 * r3 + 12.0 / 5.0 * r5 + 2.0 / 3.0;
        let r4 = -15.0 * r2 - 35.0 * r3 - 7.0 * r5 - 2.0;
        let r6 = 4.5 * r2 + 10.5 * r3 + 1.8 * r5 + 5.0 / 6.0;
        InteriorFamilyPoint { r: [r1, r2, r3, r4, r5, r6] }
    }

    /// The preset recomputed from its free parameters.
    pub fn preset(p: InteriorPreset) -> Self {
        let r = p.printed();
        InteriorFamilyPoint::from_params(r[1], r[2], r[4])
    }

    /// Largest violation of the three family equations.
    pub fn family_residual(&self) -> f64 {
        let f = InteriorFamilyPoint::from_params(self.r[1], self.r[2], self.r[4]);
        (0..6).map(|i| (f.r[i] - self.r[i]).abs()).fold(0.0, f64::max)
    }

    pub fn min_coefficient(&self) -> f64 {
        self.r.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `r_j` for the 27 functions.
    pub fn expand(&self) -> [f64; 27] {
        std::array::from_fn(|j| self.r[group_of(j)])
    }

    /// The simplex-side reduction at `m = 27`.
    pub fn reduction(&self) -> ReductionMatrix {
        ReductionMatrix {
            m: 27,
            side: Side::Simplex,
            r21: DMatrix::from_row_slice(1, 27, &self.expand()),
        }
    }
}

impl fmt::Display for InteriorFamilyPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.r.iter().map(|v| format!("{v}")).collect();
        write!(f, "[{}]", s.join(", "))
    }
}

/// `interior_reduction(r̂2, r̂3, r̂5)`.
pub fn interior_reduction(r2: f64, r3: f64, r5: f64) -> ReductionMatrix {
    InteriorFamilyPoint::from_params(r2, r3, r5).reduction()
}

/// Outcome of sampling the family for nonnegative members.
#[derive(Clone, Copy, Debug)]
pub struct FamilySearch {
    pub draws: usize,
    pub nonnegative: usize,
    /// Largest `min_j r̂_j` seen.
    pub best_min: f64,
}

/// Draws `(r̂2, r̂3, r̂5)`: half uniformly from `[-half_width, half_width]³`,
/// half from a box of width `0.04` around the least negative solution.
pub fn sample_family<R: Rng>(rng: &mut R, draws: usize, half_width: f64) -> FamilySearch {
    let c = InteriorPreset::Eq10.printed();
    let center = [c[1], c[2], c[4]];
    let mut out = FamilySearch { draws, nonnegative: 0, best_min: f64::NEG_INFINITY };
    for k in 0..draws {
        let q: [f64; 3] = if k % 2 == 0 {
            std::array::from_fn(|_| rng.random_range(-half_width..half_width))
        } else {
            std::array::from_fn(|i| center[i] + rng.random_range(-0.02..0.02))
        };
        let p = InteriorFamilyPoint::from_params(q[0], q[1], q[2]);
        let m = p.min_coefficient();
        if m >= -1e-12 {
            out.nonnegative += 1;
        }
        out.best_min = out.best_min.max(m);
    }
    out
}

/// Max over removed rows `i` and the fitting nodes of
/// `|Σ_j ψ_j(y) r_ij − ψ_i(y)|`; zero iff the subspace contains cubics.
pub fn verify_poly_reproduction(r: &ReductionMatrix, duals: &DualPolynomialTable) -> Result<f64> {
    if r.side != Side::Simplex {
        return Err(Error::InvalidArgument("polynomial reproduction is checked on the simplex side".into()));
    }
    let mut worst: f64 = 0.0;
    for y in &duals.nodes {
        let psi = duals.eval(y);
        for i in 0..28 - r.m {
            let s: f64 = (0..r.m).map(|j| psi[j] * r.r21[(i, j)]).sum();
            worst = worst.max((s - psi[r.m + i]).abs());
        }
    }
    Ok(worst)
}

/// How the first normal derivative at an edge midpoint is predicted from
/// vertex data.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum EdgeStrategy {
    /// Average of the two quadratics each using one end slope.
    #[default]
    QuadAverage,
    /// Average of the two C¹ piecewise quadratics with a break at one
    /// third and two thirds.
    PwQuadAverage,
}

impl EdgeStrategy {
    pub const ALL: [EdgeStrategy; 2] = [EdgeStrategy::QuadAverage, EdgeStrategy::PwQuadAverage];

    pub fn name(self) -> &'static str {
        match self {
            EdgeStrategy::QuadAverage => "quad-average",
            EdgeStrategy::PwQuadAverage => "pw-quad-average",
        }
    }

    /// Weights of `(g(0), g(1), g'(0), g'(1))` giving the predicted `g(1/2)`
    /// for a function `g` on `[0, 1]`.
    pub fn midpoint_weights(self) -> [f64; 4] {
        let unit: [[f64; 4]; 4] = std::array::from_fn(|k| std::array::from_fn(|i| (i == k) as u8 as f64));
        unit.map(|d| match self {
            EdgeStrategy::QuadAverage => 0.5 * (quad_left(d) + quad_right(d)),
            EdgeStrategy::PwQuadAverage => 0.5 * (pw_quad(d, 1.0 / 3.0) + pw_quad(d, 2.0 / 3.0)),
        })
    }
}

impl FromStr for EdgeStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        EdgeStrategy::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown edge strategy {s:?}")))
    }
}

/// Quadratic through `g(0), g(1)` with slope `g'(0)`, at `1/2`.
fn quad_left([a, b, da, _]: [f64; 4]) -> f64 {
    a + 0.5 * da + 0.25 * (b - a - da)
}

/// Quadratic through `g(0), g(1)` with slope `g'(1)`, at `1/2`.
fn quad_right([a, b, _, db]: [f64; 4]) -> f64 {
    b - 0.5 * db + 0.25 * (a - b + db)
}

/// C¹ piecewise quadratic with break `xi` matching values and slopes at
/// both ends, at `1/2`.
fn pw_quad([a, b, da, db]: [f64; 4], xi: f64) -> f64 {
    // P(s) = a + da s + c1 s², Q(s) = b + db (s − 1) + c2 (s − 1)²
    let e = xi - 1.0;
    // c1 xi² − c2 e² = b + db e − a − da xi,  2 c1 xi − 2 c2 e = db − da
    let (r1, r2) = (b + db * e - a - da * xi, db - da);
    let det = xi * xi * (-2.0 * e) + e * e * 2.0 * xi;
    let c1 = (r1 * (-2.0 * e) + e * e * r2) / det;
    let c2 = (xi * xi * r2 - 2.0 * xi * r1) / det;
    if 0.5 <= xi {
        a + da * 0.5 + c1 * 0.25
    } else {
        b - db * 0.5 + c2 * 0.25
    }
}

// 0-based functional indices of vertex data.
fn dx(v: usize) -> usize {
    3 + 2 * v
}
fn dy(v: usize) -> usize {
    4 + 2 * v
}
fn dxx(v: usize) -> usize {
    9 + 2 * v
}
fn dyy(v: usize) -> usize {
    10 + 2 * v
}
fn dxy(v: usize) -> usize {
    15 + v
}

/// Row (over the first 18 functionals) of `D_u D_w s(p_v)`.
fn second_row(v: usize, u: &Vec2, w: &Vec2) -> [f64; 18] {
    let mut row = [0.0; 18];
    row[dxx(v)] = u.x * w.x;
    row[dyy(v)] = u.y * w.y;
    row[dxy(v)] = u.x * w.y + u.y * w.x;
    row
}

/// Row of `D_u s(p_v)`.
fn first_row(v: usize, u: &Vec2) -> [f64; 18] {
    let mut row = [0.0; 18];
    row[dx(v)] = u.x;
    row[dy(v)] = u.y;
    row
}

/// Edge endpoints (corner indices) of the edge opposite corner `k`.
fn edge_ends(k: usize) -> (usize, usize) {
    match k {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    }
}

/// Rows expressing `λ22..λ27` through `λ1..λ18` by linear interpolation
/// of the second normal derivative between the edge's end points.
pub fn peel_edge_second_derivatives(c: &CollocationMatrix) -> DMatrix<f64> {
    let f = c.functionals();
    let corners = f[0..3].iter().map(|l| l.anchor).collect::<Vec<_>>();
    let mut out = DMatrix::zeros(6, 18);
    for i in 21..27 {
        let l = &f[i];
        let k = l.edge.expect("edge functional");
        let (a, b) = edge_ends(k);
        let n = l.direction;
        // position of the anchor along a→b
        let s = (l.anchor - corners[a]).norm() / (corners[b] - corners[a]).norm();
        let (ra, rb) = (second_row(a, &n, &n), second_row(b, &n, &n));
        for j in 0..18 {
            out[(i - 21, j)] = (1.0 - s) * ra[j] + s * rb[j];
        }
    }
    out
}

/// Rows expressing `λ19..λ21` through `λ1..λ18`.
pub fn peel_edge_first_derivatives(c: &CollocationMatrix, strategy: EdgeStrategy) -> DMatrix<f64> {
    let f = c.functionals();
    let corners = f[0..3].iter().map(|l| l.anchor).collect::<Vec<_>>();
    let w = strategy.midpoint_weights();
    let mut out = DMatrix::zeros(3, 18);
    for i in 18..21 {
        let l = &f[i];
        let (a, b) = edge_ends(l.edge.expect("edge functional"));
        let n = l.direction;
        let e = corners[b] - corners[a];
        let len = e.norm();
        let t = e / len;
        let rows = [first_row(a, &n), first_row(b, &n), second_row(a, &t, &n), second_row(b, &t, &n)];
        let scale = [1.0, 1.0, len, len];
        for j in 0..18 {
            out[(i - 18, j)] = (0..4).map(|q| w[q] * scale[q] * rows[q][j]).sum();
        }
    }
    out
}

/// A reduced local space in both representations.
#[derive(Clone, Debug)]
pub struct LocalReducedSpace {
    pub m: usize,
    pub hermite: ReductionMatrix,
    pub simplex: ReductionMatrix,
}

/// Options fixing a reduced space.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReductionOptions {
    pub interior: InteriorFamilyPoint,
    pub edge_strategy: EdgeStrategy,
}

impl Default for ReductionOptions {
    fn default() -> Self {
        ReductionOptions {
            interior: InteriorFamilyPoint::preset(InteriorPreset::Eq10),
            edge_strategy: EdgeStrategy::default(),
        }
    }
}

pub const SPACE_ORDERS: [usize; 4] = [18, 21, 27, 28];

/// Builds the reduced space of dimension `m ∈ {18, 21, 27, 28}`: the
/// interior value is removed through the simplex-side family, then edge
/// functionals are peeled on the Hermite side and the interior row is
/// rewritten in the surviving functionals.
pub fn reduced_space(c: &CollocationMatrix, m: usize, opts: &ReductionOptions) -> Result<LocalReducedSpace> {
    if m == 28 {
        let id = ReductionMatrix::new(28, Side::Hermite, DMatrix::zeros(0, 28))?;
        let simplex = ReductionMatrix { side: Side::Simplex, ..id.clone() };
        return Ok(LocalReducedSpace { m, hermite: id, simplex });
    }
    if !SPACE_ORDERS.contains(&m) {
        return Err(Error::InvalidArgument(format!("unsupported space order m = {m}")));
    }
    let h27 = convert_bases(c, &opts.interior.reduction())?;
    if m == 27 {
        let simplex = convert_bases(c, &h27)?;
        return Ok(LocalReducedSpace { m, hermite: h27, simplex });
    }
    // express λ1..λ27 through the first m functionals, then compose λ28
    let mut expr = DMatrix::zeros(27, m);
    expr.view_mut((0, 0), (m, m)).fill_with_identity();
    let second = peel_edge_second_derivatives(c);
    expr.view_mut((21, 0), (6, 18)).copy_from(&second);
    if m == 18 {
        let first = peel_edge_first_derivatives(c, opts.edge_strategy);
        expr.view_mut((18, 0), (3, 18)).copy_from(&first);
    }
    let row28 = &h27.r21 * &expr;
    let mut r21 = DMatrix::zeros(28 - m, m);
    r21.view_mut((0, 0), (27 - m, m)).copy_from(&expr.view((m, 0), (27 - m, m)));
    r21.view_mut((27 - m, 0), (1, m)).copy_from(&row28);
    let hermite = ReductionMatrix::new(m, Side::Hermite, r21)?;
    let simplex = convert_bases(c, &hermite)?;
    Ok(LocalReducedSpace { m, hermite, simplex })
}

impl LocalReducedSpace {
    /// Full Hermite data from the `m` kept functionals.
    pub fn expand(&self, kept: &[f64]) -> Result<HermiteData> {
        if kept.len() != self.m {
            return Err(Error::InvalidArgument(format!("expected {} values, got {}", self.m, kept.len())));
        }
        let full = self.hermite.full() * nalgebra::DVector::from_column_slice(kept);
        Ok(HermiteData { values: std::array::from_fn(|i| full[i]) })
    }

    /// Simplex coefficients of the reduced interpolant of `data`'s first
    /// `m` values.
    pub fn interpolate(&self, c: &CollocationMatrix, data: &HermiteData) -> Result<[f64; 28]> {
        c.solve(&self.expand(&data.values[..self.m])?)
    }
}
