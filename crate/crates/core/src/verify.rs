//! Verification checks with line-oriented failure reports.

use std::fmt;
use std::time::Instant;

use nalgebra::DMatrix;
use rand::Rng;

use crate::basis::{dual_polynomials, marsden_kernel, BasisSet};
use crate::error::{Error, Result};
use crate::functions::TestFunction;
use crate::geometry::MacroTriangleGeometry;
use crate::global::{GlobalSpace, SpaceDim};
use crate::hermite::{apply_functionals, CollocationMatrix, BLOCK_SPLITS};
use crate::mesh::{samples, TriangulationMesh};
use crate::par::{map_range, ExecMode};
use crate::poly::Cubic;
use crate::reduction::{
    convert_bases, reduced_space, sample_family, verify_poly_reproduction, EdgeStrategy, InteriorFamilyPoint,
    InteriorPreset, ReductionMatrix, ReductionOptions, Side, SPACE_ORDERS,
};
use crate::sampling::{quasi_random_in_triangle, random_in_triangle, random_triangle, rng};
use crate::table2::{table1_marked, table2_matrix, TABLE1};
use crate::types::{Order, Triangle, Vec2};

/// Tolerances of all checks.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub table2: f64,
    pub table1: f64,
    pub arrangement: f64,
    pub partition: f64,
    pub marsden: f64,
    pub family: f64,
    pub roundtrip: f64,
    pub reproduction: f64,
    pub c2: f64,
    pub gradient: f64,
    pub hessian: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            table2: 1e-12,
            table1: 1e-12,
            arrangement: 1e-12,
            partition: 1e-12,
            marsden: 1e-10,
            family: 1e-10,
            roundtrip: 1e-12,
            reproduction: 1e-9,
            c2: 1e-8,
            gradient: 1e-6,
            hessian: 1e-4,
        }
    }
}

impl Tolerances {
    const NAMES: [&'static str; 11] = [
        "table2",
        "table1",
        "arrangement",
        "partition",
        "marsden",
        "family",
        "roundtrip",
        "reproduction",
        "c2",
        "gradient",
        "hessian",
    ];

    fn slot(&mut self, name: &str) -> Option<&mut f64> {
        Some(match name {
            "table2" => &mut self.table2,
            "table1" => &mut self.table1,
            "arrangement" => &mut self.arrangement,
            "partition" => &mut self.partition,
            "marsden" => &mut self.marsden,
            "family" => &mut self.family,
            "roundtrip" => &mut self.roundtrip,
            "reproduction" => &mut self.reproduction,
            "c2" => &mut self.c2,
            "gradient" => &mut self.gradient,
            "hessian" => &mut self.hessian,
            _ => return None,
        })
    }

    /// Applies an override: either one number for every tolerance or a
    /// comma-separated list of `name=value`.
    pub fn with_override(mut self, spec: &str) -> Result<Self> {
        let positive = |s: &str| -> Result<f64> {
            match s.trim().parse::<f64>() {
                Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
                _ => Err(Error::InvalidArgument(format!("tolerance {s:?} is not a positive number"))),
            }
        };
        if !spec.contains('=') {
            let v = positive(spec)?;
            for n in Self::NAMES {
                *self.slot(n).expect("known name") = v;
            }
            return Ok(self);
        }
        for part in spec.split(',').filter(|p| !p.trim().is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::InvalidArgument(format!("bad tolerance entry {part:?}")))?;
            let v = positive(v)?;
            *self
                .slot(k.trim())
                .ok_or_else(|| Error::InvalidArgument(format!("unknown tolerance {k:?}")))? = v;
        }
        Ok(self)
    }

    /// Defaults, overridden by `WS3_TOL` when set.
    pub fn from_env() -> Result<Self> {
        match std::env::var("WS3_TOL") {
            Ok(s) => Tolerances::default().with_override(&s),
            Err(_) => Ok(Tolerances::default()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Failure {
    pub check: String,
    pub observed: f64,
    pub expected: f64,
    pub tol: f64,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FAIL {} {:e} {:e} {:e}", self.check, self.observed, self.expected, self.tol)
    }
}

#[derive(Clone, Debug)]
pub struct CheckReport {
    pub name: String,
    pub summary: String,
    pub failures: Vec<Failure>,
    pub seconds: f64,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

struct Collector {
    failures: Vec<Failure>,
}

impl Collector {
    fn new() -> Self {
        Collector { failures: Vec::new() }
    }

    /// Records a failure unless `ok`.
    fn expect(&mut self, ok: bool, check: impl Into<String>, observed: f64, expected: f64, tol: f64) {
        if !ok {
            self.failures.push(Failure { check: check.into(), observed, expected, tol });
        }
    }
}

fn timed(name: &str, f: impl FnOnce(&mut Collector) -> Result<String>) -> Result<CheckReport> {
    let start = Instant::now();
    let mut c = Collector::new();
    let summary = f(&mut c)?;
    Ok(CheckReport { name: name.into(), summary, failures: c.failures, seconds: start.elapsed().as_secs_f64() })
}

fn right_triangle(h: f64) -> Triangle {
    Triangle::new(Vec2::new(0.0, 0.0), Vec2::new(h, 0.0), Vec2::new(0.0, h)).expect("valid triangle")
}

fn random_triangles(seed: u64, n: usize) -> Vec<Triangle> {
    let mut r = rng(seed);
    (0..n).map(|_| random_triangle(&mut r)).collect()
}

/// Printed collocation values on `(0,0), (h,0), (0,h)`.
pub fn check_table2(hs: &[f64], tol: &Tolerances) -> Result<CheckReport> {
    timed("table2", |c| {
        let mut matched = 0;
        for &h in hs {
            let basis = BasisSet::new(right_triangle(h))?;
            let computed = CollocationMatrix::new(&basis)?;
            let printed = table2_matrix(h);
            for i in 0..28 {
                for j in 0..28 {
                    let (got, want) = (computed.matrix()[(i, j)], printed[(i, j)]);
                    let ok = if want == 0.0 {
                        got.abs() < tol.table2
                    } else {
                        (got - want).abs() <= tol.table2 * want.abs()
                    };
                    c.expect(ok, format!("table2[h={h},l{},B{}]", i + 1, j + 1), got, want, tol.table2);
                    matched += ok as usize;
                }
            }
        }
        Ok(format!("{matched} of {} entries matched (28x28 per h, h in {hs:?})", 784 * hs.len()))
    })
}

/// General sparsity pattern and block splits on a random triangle.
pub fn check_table1(seed: u64, tol: &Tolerances) -> Result<CheckReport> {
    timed("table1", |c| {
        let t = random_triangles(seed, 1)[0];
        let cm = CollocationMatrix::new(&BasisSet::new(t)?)?;
        let mut blanks = 0;
        for i in 0..28 {
            for j in 0..28 {
                if !table1_marked(i, j) {
                    let v = cm.matrix()[(i, j)].abs();
                    c.expect(v < tol.table1, format!("table1[l{},B{}]", i + 1, j + 1), v, 0.0, tol.table1);
                    blanks += 1;
                }
            }
        }
        for m in BLOCK_SPLITS {
            let marked = (0..m).any(|i| (m..28).any(|j| table1_marked(i, j)));
            c.expect(!marked, format!("table1-pattern-split[m={m}]"), 1.0, 0.0, 0.0);
            let v = cm.upper_block_max(m);
            c.expect(v < tol.table1, format!("table1-split[m={m}]"), v, 0.0, tol.table1);
        }
        debug_assert_eq!(TABLE1.len(), 28);
        Ok(format!("{blanks} blank entries vanish; block splits at {BLOCK_SPLITS:?} hold"))
    })
}

/// Cell and line counts and area partition.
pub fn check_arrangement(seed: u64, n: usize, tol: &Tolerances) -> Result<CheckReport> {
    timed("arrangement", |c| {
        let mut tris = vec![right_triangle(1.0)];
        tris.extend(random_triangles(seed, n));
        for (k, t) in tris.iter().enumerate() {
            let g = MacroTriangleGeometry::new(*t);
            c.expect(g.cell_count() == 75, format!("arrangement-cells[{k}]"), g.cell_count() as f64, 75.0, 0.0);
            let lines = g.interior_line_count();
            c.expect(lines == 18, format!("arrangement-lines[{k}]"), lines as f64, 18.0, 0.0);
            let area: f64 = (0..g.cell_count()).map(|i| g.cell_area(i)).sum();
            let rel = (area - t.area()).abs() / t.area();
            c.expect(rel < tol.arrangement, format!("arrangement-area[{k}]"), area, t.area(), tol.arrangement);
            for i in 0..g.cell_count() {
                let a = g.cell_area(i);
                c.expect(a > 0.0, format!("arrangement-cell-area[{k},{i}]"), a, 0.0, 0.0);
            }
        }
        let hist = crate::geometry::reference().polygon_histogram();
        Ok(format!("75 cells / 18 interior lines on {} triangles; polygon histogram {hist:?}", tris.len()))
    })
}

/// Partition of unity and nonnegativity at quasi-random points.
pub fn check_partition(seed: u64, triangles: usize, points: usize, tol: &Tolerances, mode: ExecMode) -> Result<CheckReport> {
    timed("partition", |c| {
        let mut worst_sum: f64 = 0.0;
        let mut worst_min = f64::INFINITY;
        for (k, t) in random_triangles(seed, triangles).iter().enumerate() {
            let basis = BasisSet::new(*t)?;
            let xs = quasi_random_in_triangle(t, points);
            let res: Vec<Result<(f64, f64)>> = map_range(mode, xs.len(), |i| {
                let b = basis.eval(&xs[i], Order::Value)?;
                let sum: f64 = b.iter().map(|j| j.value).sum();
                let min = b.iter().map(|j| j.value).fold(f64::INFINITY, f64::min);
                Ok(((sum - 1.0).abs(), min))
            });
            for r in res {
                let (dev, min) = r?;
                worst_sum = worst_sum.max(dev);
                worst_min = worst_min.min(min);
            }
            c.expect(worst_sum < tol.partition, format!("partition-sum[{k}]"), worst_sum, 0.0, tol.partition);
            c.expect(worst_min >= -tol.partition, format!("partition-min[{k}]"), worst_min, 0.0, tol.partition);
        }
        Ok(format!(
            "max |sum B - 1| = {worst_sum:e}, min B = {worst_min:e} over {} points",
            triangles * points
        ))
    })
}

/// Marsden identity through the fitted dual polynomials.
pub fn check_marsden(seed: u64, pairs: usize, tol: &Tolerances) -> Result<CheckReport> {
    timed("marsden", |c| {
        let mut r = rng(seed);
        let t = random_triangle(&mut r);
        let basis = BasisSet::new(t)?;
        let cm = CollocationMatrix::new(&basis)?;
        let duals = dual_polynomials(&basis, &cm)?;
        let mut worst: f64 = 0.0;
        for _ in 0..pairs {
            let y = Vec2::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0));
            let x = random_in_triangle(&mut r, &t);
            let psi = duals.eval(&y);
            let b = basis.eval(&x, Order::Value)?;
            let s: f64 = (0..28).map(|j| psi[j] * b[j].value).sum();
            worst = worst.max((s - marsden_kernel(&y, &x).value).abs());
        }
        c.expect(worst < tol.marsden, "marsden", worst, 0.0, tol.marsden);
        let psi0 = duals.eval(&Vec2::zeros());
        let dev0 = psi0.iter().map(|p| (p - 1.0).abs()).fold(0.0, f64::max);
        c.expect(dev0 < tol.marsden, "marsden-psi0", dev0, 0.0, tol.marsden);
        Ok(format!("max residual {worst:e} at {pairs} pairs; max |psi_j(0) - 1| = {dev0:e}"))
    })
}

/// Printed interior solutions, and the sign structure of the family.
pub fn check_family(seed: u64, draws: usize, tol: &Tolerances) -> Result<CheckReport> {
    timed("family", |c| {
        let mut worst: f64 = 0.0;
        for t in [right_triangle(1.0), random_triangles(seed, 1)[0]] {
            let basis = BasisSet::new(t)?;
            let cm = CollocationMatrix::new(&basis)?;
            let duals = dual_polynomials(&basis, &cm)?;
            for p in InteriorPreset::ALL {
                let pt = InteriorFamilyPoint { r: p.printed() };
                let res = verify_poly_reproduction(&pt.reduction(), &duals)?;
                worst = worst.max(res);
                c.expect(res < tol.family, format!("family-residual[{}]", p.name()), res, 0.0, tol.family);
            }
        }
        let s = sample_family(&mut rng(seed), draws, 2.0);
        c.expect(s.nonnegative == 0, "family-nonnegative", s.nonnegative as f64, 0.0, 0.0);
        let bound = -1.0 / 29.0;
        c.expect(s.best_min <= bound + 1e-12, "family-min-bound", s.best_min, bound, 1e-12);
        let eq10 = InteriorFamilyPoint { r: InteriorPreset::Eq10.printed() }.min_coefficient();
        c.expect((eq10 - bound).abs() < 1e-15, "family-eq10-min", eq10, bound, 1e-15);
        Ok(format!(
            "preset residual {worst:e}; {} draws, {} nonnegative, best min coefficient {:.6}",
            s.draws, s.nonnegative, s.best_min
        ))
    })
}

/// Simplex → Hermite → simplex conversion is the identity.
pub fn check_roundtrip(seed: u64, triangles: usize, tol: &Tolerances) -> Result<CheckReport> {
    timed("roundtrip", |c| {
        let mut r = rng(seed ^ 0x5eed);
        let mut worst: f64 = 0.0;
        for (k, t) in random_triangles(seed, triangles).iter().enumerate() {
            let cm = CollocationMatrix::new(&BasisSet::new(*t)?)?;
            for m in BLOCK_SPLITS {
                let rb = DMatrix::from_fn(28 - m, m, |_, _| r.random_range(-1.0..1.0));
                let known = ReductionMatrix::new(m, Side::Simplex, rb)?;
                let back = convert_bases(&cm, &convert_bases(&cm, &known)?)?;
                let err = (&back.r21 - &known.r21).amax();
                worst = worst.max(err);
                c.expect(err < tol.roundtrip, format!("roundtrip[{k},m={m}]"), err, 0.0, tol.roundtrip);
            }
        }
        Ok(format!("max round-trip error {worst:e}"))
    })
}

fn random_cubic<R: Rng>(r: &mut R) -> TestFunction {
    TestFunction::Poly(Cubic::from_monomials(std::array::from_fn(|_| r.random_range(-1.0..1.0))))
}

/// Local Hermite interpolation of random cubics in every space.
pub fn check_local_reproduction(
    seed: u64,
    cubics: usize,
    points: usize,
    tol: &Tolerances,
    mode: ExecMode,
) -> Result<CheckReport> {
    timed("reproduction", |c| {
        let mut r = rng(seed);
        let t = random_triangle(&mut r);
        let basis = BasisSet::new(t)?;
        let cm = CollocationMatrix::new(&basis)?;
        let xs: Vec<Vec2> = (0..points).map(|_| random_in_triangle(&mut r, &t)).collect();
        // basis values at the sample points, shared by all interpolants
        let bx: Vec<[crate::types::Jet; 28]> =
            map_range(mode, xs.len(), |i| basis.eval(&xs[i], Order::Value)).into_iter().collect::<Result<_>>()?;
        let fs: Vec<TestFunction> = (0..cubics).map(|_| random_cubic(&mut r)).collect();
        let mut worst: f64 = 0.0;
        for m in SPACE_ORDERS {
            for strategy in EdgeStrategy::ALL {
                if m != 18 && strategy != EdgeStrategy::default() {
                    continue;
                }
                let opts = ReductionOptions { edge_strategy: strategy, ..Default::default() };
                let space = reduced_space(&cm, m, &opts)?;
                for (k, f) in fs.iter().enumerate() {
                    let data = apply_functionals(cm.functionals(), |x, _| Ok(f.jet(x)))?;
                    let coef = space.interpolate(&cm, &data)?;
                    let mut scale: f64 = 1.0;
                    let mut err: f64 = 0.0;
                    for (x, b) in xs.iter().zip(&bx) {
                        let s: f64 = (0..28).map(|j| coef[j] * b[j].value).sum();
                        let v = f.jet(x).value;
                        scale = scale.max(v.abs());
                        err = err.max((s - v).abs());
                    }
                    let rel = err / scale;
                    worst = worst.max(rel);
                    c.expect(
                        rel < tol.reproduction,
                        format!("reproduction[m={m},{},f{k}]", strategy.name()),
                        rel,
                        0.0,
                        tol.reproduction,
                    );
                }
            }
        }
        Ok(format!("max relative error {worst:e} ({cubics} cubics, {points} points, m in {SPACE_ORDERS:?})"))
    })
}

/// Dimensions, global cubic reproduction and C² jumps on sample meshes.
pub fn check_global(seed: u64, tol: &Tolerances, mode: ExecMode) -> Result<CheckReport> {
    timed("global", |c| {
        let meshes: [(&str, TriangulationMesh); 3] =
            [("single", samples::single(1.0)), ("square", samples::square()), ("fan", samples::disk_fan())];
        let mut r = rng(seed);
        let mut worst_rep: f64 = 0.0;
        let mut worst_c2: f64 = 0.0;
        for (name, mesh) in &meshes {
            let pts: Vec<Vec2> = (0..mesh.n_triangles())
                .flat_map(|t| quasi_random_in_triangle(&mesh.triangle(t), 20))
                .collect();
            for m in SPACE_ORDERS {
                for strategy in EdgeStrategy::ALL {
                    if m != 18 && strategy != EdgeStrategy::default() {
                        continue;
                    }
                    let opts = ReductionOptions { edge_strategy: strategy, ..Default::default() };
                    let space = GlobalSpace::build(mesh.clone(), m, opts, mode)?;
                    let SpaceDim { n_v, n_e, n_t, total, .. } = space.dim();
                    let want = SpaceDim::formula(m, n_v, n_e, n_t)?;
                    c.expect(total == want, format!("global-dim[{name},m={m}]"), total as f64, want as f64, 0.0);
                    let f = random_cubic(&mut r);
                    let s = space.interpolate(|x| f.jet(x))?;
                    let vals = s.eval_many(&pts, Order::Value)?;
                    let mut scale: f64 = 1.0;
                    let mut err: f64 = 0.0;
                    for (x, v) in pts.iter().zip(&vals) {
                        let w = f.jet(x).value;
                        scale = scale.max(w.abs());
                        err = err.max((v.value - w).abs());
                    }
                    let rel = err / scale;
                    worst_rep = worst_rep.max(rel);
                    let tag = format!("{name},m={m},{}", strategy.name());
                    c.expect(rel < tol.reproduction, format!("global-cubic[{tag}]"), rel, 0.0, tol.reproduction);
                    let franke = TestFunction::Franke;
                    let s = space.interpolate(|x| franke.jet(x))?;
                    for j in s.c2_report(9)? {
                        worst_c2 = worst_c2.max(j.relative());
                        c.expect(j.relative() < tol.c2, format!("global-c2[{tag},edge={}]", j.edge), j.relative(), 0.0, tol.c2);
                    }
                }
            }
        }
        Ok(format!("max cubic error {worst_rep:e}; max relative C2 jump {worst_c2:e}"))
    })
}

fn distance_to_lines(g: &MacroTriangleGeometry, x: &Vec2) -> f64 {
    let [p1, p2, p3] = g.triangle.corners;
    let mut lines = g.interior_lines.clone();
    lines.extend([(p1, p2), (p2, p3), (p3, p1)]);
    lines
        .iter()
        .map(|(a, b)| {
            let d = b - a;
            ((x - a).perp(&d)).abs() / d.norm()
        })
        .fold(f64::INFINITY, f64::min)
}

/// Recurrence derivatives of the 28 basis functions against central
/// differences.
pub fn check_derivatives(seed: u64, points: usize, tol: &Tolerances) -> Result<CheckReport> {
    timed("derivatives", |c| {
        let mut r = rng(seed);
        let t = random_triangle(&mut r);
        let basis = BasisSet::new(t)?;
        let g = basis.geometry();
        let h = 1e-5 * t.diameter();
        let mut xs = Vec::new();
        while xs.len() < points {
            let x = random_in_triangle(&mut r, &t);
            if distance_to_lines(g, &x) > 1e3 * h {
                xs.push(x);
            }
        }
        let (mut wg, mut wh): (f64, f64) = (0.0, 0.0);
        for x in &xs {
            let probe = basis.probe(x)?;
            let at = |p: &Vec2| basis.eval_with_probe(p, &probe, Order::First);
            let b = basis.eval_with_probe(x, &probe, Order::Second);
            let e = [Vec2::new(h, 0.0), Vec2::new(0.0, h)];
            for (k, ek) in e.iter().enumerate() {
                let (p, m) = (at(&(x + ek)), at(&(x - ek)));
                for j in 0..28 {
                    let fd = (p[j].value - m[j].value) / (2.0 * h);
                    wg = wg.max((fd - b[j].gradient[k]).abs());
                    for row in 0..2 {
                        let fd2 = (p[j].gradient[row] - m[j].gradient[row]) / (2.0 * h);
                        wh = wh.max((fd2 - b[j].hessian[(row, k)]).abs());
                    }
                }
            }
        }
        c.expect(wg < tol.gradient, "derivatives-gradient", wg, 0.0, tol.gradient);
        c.expect(wh < tol.hessian, "derivatives-hessian", wh, 0.0, tol.hessian);
        Ok(format!("max gradient error {wg:e}, max hessian error {wh:e} at {points} points"))
    })
}

/// The acceptance criteria, numbered 1 to 10.
pub fn run_criterion(n: usize, tol: &Tolerances, mode: ExecMode) -> Result<CheckReport> {
    let mut rep = match n {
        1 => check_table2(&[1.0, 0.5, 3.0], tol),
        2 => check_table1(11, tol),
        3 => check_arrangement(13, 5, tol),
        4 => check_partition(17, 5, 10_000, tol, mode),
        5 => check_marsden(19, 200, tol),
        6 => check_family(23, 100_000, tol),
        7 => check_roundtrip(29, 3, tol),
        8 => check_local_reproduction(31, 20, 200, tol, mode),
        9 => check_global(37, tol, mode),
        10 => check_derivatives(41, 100, tol),
        _ => Err(Error::InvalidArgument(format!("no criterion {n}"))),
    }?;
    rep.name = format!("criterion-{n}-{}", rep.name);
    Ok(rep)
}

/// Runtime budget of each criterion in seconds.
pub const CRITERION_BUDGET: [f64; 10] = [1.0, 1.0, 5.0, 10.0, 5.0, 10.0, 2.0, 30.0, 60.0, 10.0];
