//! `ws3`: command-line front end for the WS3 spline library.
//!
//! Exit codes: 0 on success, 1 when a verification fails (with
//! `FAIL <check> <observed> <expected> <tol>` lines), 2 on usage or input
//! errors.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use ws3_core::basis::{dual_polynomials, GROUP_WEIGHTS, KNOT_TABLE, SYMMETRY_GROUPS};
use ws3_core::functions::TestFunction;
use ws3_core::mesh::samples;
use ws3_core::reduction::{reduced_space, verify_poly_reproduction, SPACE_ORDERS};
use ws3_core::sampling::triangle_grid;
use ws3_core::verify::{self, CheckReport, Failure, Tolerances};
use ws3_core::{
    BasisSet, CollocationMatrix, EdgeStrategy, ExecMode, GlobalSpace, InteriorFamilyPoint, InteriorPreset,
    MacroTriangleGeometry, Order, ReductionMatrix, ReductionOptions, Triangle, TriangulationMesh,
};

#[derive(Parser, Debug)]
#[command(name = "ws3", version, about = "C2 cubic splines on WS3-refined triangulations")]
struct Cli {
    /// Run per-triangle and per-point work on one thread.
    #[arg(long, global = true)]
    sequential: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Weights, symmetry groups and knot configurations of the 28 basis functions.
    BasisInfo {
        #[arg(long, value_parser = parse_triangle, default_value = "0,0,1,0,0,1")]
        triangle: Triangle,
    },
    /// Samples B1..B28 on a barycentric grid (CSV).
    EvalBasis {
        #[arg(long, default_value_t = 10)]
        grid: usize,
        #[arg(long, value_parser = parse_triangle, default_value = "0,0,1,0,0,1")]
        triangle: Triangle,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The 28x28 collocation matrix lambda_i(B_j).
    Collocation {
        #[arg(long, value_parser = parse_triangle, default_value = "0,0,1,0,0,1")]
        triangle: Triangle,
        /// Emit CSV instead of an aligned table.
        #[arg(long)]
        csv: bool,
    },
    /// Cells of the split as polygon vertex loops (CSV).
    DumpArrangement {
        #[arg(long, value_parser = parse_triangle, default_value = "0,0,1,0,0,1")]
        triangle: Triangle,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reduction matrices of a reduced local space.
    Reduce {
        #[arg(long, default_value_t = 27)]
        m: usize,
        /// eq9, eq10, vertex12, interior-only or custom:r2,r3,r5.
        #[arg(long, value_parser = parse_interior, default_value = "eq10")]
        interior: InteriorFamilyPoint,
        #[arg(long, value_parser = parse_edge_strategy, default_value = "quad-average")]
        edge_strategy: EdgeStrategy,
        #[arg(long, value_parser = parse_triangle, default_value = "0,0,1,0,0,1")]
        triangle: Triangle,
    },
    /// Global interpolant of a test function sampled on each triangle (CSV).
    Interpolate {
        #[command(flatten)]
        space: SpaceArgs,
        /// Grid resolution per triangle.
        #[arg(long, default_value_t = 10)]
        grid: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Jumps of value, gradient and Hessian across interior edges (CSV).
    C2Check {
        #[command(flatten)]
        space: SpaceArgs,
        /// Samples per edge, endpoints included.
        #[arg(long, default_value_t = 9)]
        samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verification checks.
    Check {
        #[arg(value_enum)]
        which: CheckKind,
        /// Triangle sizes for table2.
        #[arg(long, value_delimiter = ',', default_values_t = [1.0, 0.5, 3.0])]
        h: Vec<f64>,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

#[derive(clap::Args, Debug)]
struct SpaceArgs {
    /// Mesh file, or sample:single, sample:square, sample:fan.
    #[arg(long)]
    mesh: String,
    #[arg(long, default_value_t = 21)]
    m: usize,
    /// franke, sincos or poly:c00,c10,c01,c20,c11,c02,c30,c21,c12,c03.
    #[arg(long = "fn", default_value = "franke")]
    function: TestFunction,
    #[arg(long, value_parser = parse_interior, default_value = "eq10")]
    interior: InteriorFamilyPoint,
    #[arg(long, value_parser = parse_edge_strategy, default_value = "quad-average")]
    edge_strategy: EdgeStrategy,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CheckKind {
    Table2,
    Table1,
    Arrangement,
    Partition,
    Marsden,
    Family,
    Roundtrip,
    Reproduction,
    Global,
    Derivatives,
    All,
}

/// Error categories mapped to exit codes.
enum Failed {
    /// `FAIL` lines, and whether stdout already carries CSV.
    Verification(Vec<String>, bool),
    Usage(anyhow::Error),
}

impl From<anyhow::Error> for Failed {
    fn from(e: anyhow::Error) -> Self {
        Failed::Usage(e)
    }
}

impl From<ws3_core::Error> for Failed {
    fn from(e: ws3_core::Error) -> Self {
        Failed::Usage(e.into())
    }
}

impl From<std::io::Error> for Failed {
    fn from(e: std::io::Error) -> Self {
        Failed::Usage(e.into())
    }
}

fn parse_triangle(s: &str) -> anyhow::Result<Triangle> {
    let c: Vec<f64> = s.split(',').map(|v| v.trim().parse::<f64>()).collect::<Result<_, _>>()?;
    let Ok(c): Result<[f64; 6], _> = c.try_into() else {
        bail!("expected six comma-separated coordinates x1,y1,x2,y2,x3,y3");
    };
    Ok(Triangle::from_coords(c)?)
}

fn parse_interior(s: &str) -> anyhow::Result<InteriorFamilyPoint> {
    if let Some(rest) = s.strip_prefix("custom:") {
        let p: Vec<f64> = rest.split(',').map(|v| v.trim().parse::<f64>()).collect::<Result<_, _>>()?;
        let [r2, r3, r5] = p[..] else {
            bail!("custom interior point takes three parameters r2,r3,r5");
        };
        return Ok(InteriorFamilyPoint::from_params(r2, r3, r5));
    }
    InteriorPreset::ALL
        .into_iter()
        .find(|p| p.name() == s)
        .map(InteriorFamilyPoint::preset)
        .with_context(|| format!("unknown interior preset {s:?}"))
}

fn parse_edge_strategy(s: &str) -> anyhow::Result<EdgeStrategy> {
    Ok(s.parse()?)
}

fn load_mesh(spec: &str) -> anyhow::Result<TriangulationMesh> {
    Ok(match spec {
        "sample:single" => samples::single(1.0),
        "sample:square" => samples::square(),
        "sample:fan" => samples::disk_fan(),
        path => TriangulationMesh::load(path).with_context(|| format!("reading mesh {path}"))?,
    })
}

fn check_order(m: usize) -> anyhow::Result<()> {
    if !SPACE_ORDERS.contains(&m) {
        bail!("--m must be one of {SPACE_ORDERS:?}, got {m}");
    }
    Ok(())
}

/// Writes to `out` or stdout.
fn emit(out: Option<&Path>, text: &str) -> std::io::Result<()> {
    match out {
        Some(p) => std::fs::write(p, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    }
}

fn fmt_row(values: impl IntoIterator<Item = f64>) -> String {
    values.into_iter().map(|v| format!("{v:e}")).collect::<Vec<_>>().join(",")
}

fn basis_info(t: Triangle) -> Result<(), Failed> {
    let basis = BasisSet::new(t)?;
    let mut s = String::from("j,group,group_weight,weight,knots\n");
    for (j, knots) in KNOT_TABLE.iter().enumerate() {
        let g = SYMMETRY_GROUPS.iter().position(|&(a, b)| (a..b).contains(&j)).expect("grouped");
        let names: Vec<&str> = knots.iter().map(|k| k.name()).collect();
        writeln!(s, "{},{},{:e},{:e},{}", j + 1, g + 1, GROUP_WEIGHTS[g], basis.weights()[j], names.join(" ")).unwrap();
    }
    emit(None, &s)?;
    Ok(())
}

fn eval_basis(grid: usize, t: Triangle, out: Option<&Path>, mode: ExecMode) -> Result<(), Failed> {
    let basis = BasisSet::new(t)?;
    let pts = triangle_grid(&t, grid);
    let rows = ws3_core::par::try_map_range(mode, pts.len(), |i| {
        let b = basis.eval(&pts[i], Order::Value)?;
        Ok::<_, ws3_core::Error>(format!("{:e},{:e},{}\n", pts[i].x, pts[i].y, fmt_row(b.iter().map(|j| j.value))))
    })?;
    let mut s = String::from("x,y");
    for j in 1..=28 {
        write!(s, ",B{j}").unwrap();
    }
    s.push('\n');
    s.extend(rows);
    emit(out, &s)?;
    Ok(())
}

fn collocation(t: Triangle, csv: bool) -> Result<(), Failed> {
    let c = CollocationMatrix::new(&BasisSet::new(t)?)?;
    let mut s = String::new();
    if csv {
        s.push_str("functional");
        for j in 1..=28 {
            write!(s, ",B{j}").unwrap();
        }
        s.push('\n');
    }
    for (i, f) in c.functionals().iter().enumerate() {
        let row = c.matrix().row(i);
        if csv {
            writeln!(s, "{},{}", f.label(), fmt_row(row.iter().copied())).unwrap();
        } else {
            let cells: Vec<String> = row.iter().map(|v| if v.abs() < 1e-13 { ".".into() } else { format!("{v:.4}") }).collect();
            writeln!(s, "l{:<2} {:<10} {}", i + 1, f.label(), cells.iter().map(|c| format!("{c:>9}")).collect::<String>())
                .unwrap();
        }
    }
    emit(None, &s)?;
    Ok(())
}

fn dump_arrangement(t: Triangle, out: Option<&Path>) -> Result<(), Failed> {
    let g = MacroTriangleGeometry::new(t);
    let mut s = String::from("cell,vertex,x,y\n");
    for (c, poly) in g.cells.iter().enumerate() {
        for (k, p) in poly.iter().enumerate() {
            writeln!(s, "{c},{k},{:e},{:e}", p.x, p.y).unwrap();
        }
    }
    emit(out, &s)?;
    Ok(())
}

fn write_matrix(s: &mut String, title: &str, r: &ReductionMatrix) {
    writeln!(s, "# {title}: rows {}..28, columns 1..{}", r.m + 1, r.m).unwrap();
    for i in 0..r.r21.nrows() {
        writeln!(s, "{}", fmt_row(r.r21.row(i).iter().copied())).unwrap();
    }
}

fn reduce(m: usize, interior: InteriorFamilyPoint, edge_strategy: EdgeStrategy, t: Triangle) -> Result<(), Failed> {
    check_order(m)?;
    let tol = Tolerances::from_env()?;
    let basis = BasisSet::new(t)?;
    let c = CollocationMatrix::new(&basis)?;
    let opts = ReductionOptions { interior, edge_strategy };
    let space = reduced_space(&c, m, &opts)?;
    let duals = dual_polynomials(&basis, &c)?;
    let mut s = String::new();
    writeln!(s, "m = {m}").unwrap();
    writeln!(s, "edge strategy = {}", edge_strategy.name()).unwrap();
    writeln!(s, "family point r = {interior}").unwrap();
    let fam = interior.family_residual();
    writeln!(s, "family residual = {fam:e}").unwrap();
    writeln!(s, "min r = {:e}", interior.min_coefficient()).unwrap();
    let repro = if m < 28 { verify_poly_reproduction(&space.simplex, &duals)? } else { 0.0 };
    writeln!(s, "cubic reproduction residual = {repro:e}").unwrap();
    if m < 28 {
        write_matrix(&mut s, "Hermite side R21", &space.hermite);
        write_matrix(&mut s, "simplex side R21", &space.simplex);
    }
    emit(None, &s)?;
    let mut fails = Vec::new();
    if fam >= tol.family {
        fails.push(Failure { check: "reduce-family".into(), observed: fam, expected: 0.0, tol: tol.family });
    }
    if repro >= tol.family {
        fails.push(Failure { check: "reduce-reproduction".into(), observed: repro, expected: 0.0, tol: tol.family });
    }
    if fails.is_empty() {
        Ok(())
    } else {
        Err(Failed::Verification(fails.iter().map(|f| f.to_string()).collect(), false))
    }
}

fn build_space(a: &SpaceArgs, mode: ExecMode) -> Result<GlobalSpace, Failed> {
    check_order(a.m)?;
    let mesh = load_mesh(&a.mesh)?;
    let opts = ReductionOptions { interior: a.interior, edge_strategy: a.edge_strategy };
    Ok(GlobalSpace::build(mesh, a.m, opts, mode)?)
}

fn interpolate(a: &SpaceArgs, grid: usize, out: Option<&Path>, mode: ExecMode) -> Result<(), Failed> {
    let space = build_space(a, mode)?;
    let f = &a.function;
    let spline = space.interpolate(|x| f.jet(x))?;
    let per_triangle = ws3_core::par::try_map_range(mode, space.mesh.n_triangles(), |t| {
        let mut s = String::new();
        for x in triangle_grid(&space.mesh.triangle(t), grid) {
            let j = spline.eval_on(t, &x, Order::Second)?;
            let h = j.hessian;
            let row = [x.x, x.y, j.value, j.gradient.x, j.gradient.y, h[(0, 0)], h[(0, 1)], h[(1, 1)]];
            writeln!(s, "{}", fmt_row(row)).unwrap();
        }
        Ok::<_, ws3_core::Error>(s)
    })?;
    let mut s = String::from("x,y,s,sx,sy,sxx,sxy,syy\n");
    s.extend(per_triangle);
    emit(out, &s)?;
    Ok(())
}

fn c2_check(a: &SpaceArgs, samples: usize, out: Option<&Path>, mode: ExecMode) -> Result<(), Failed> {
    let tol = Tolerances::from_env()?;
    let space = build_space(a, mode)?;
    let f = &a.function;
    let spline = space.interpolate(|x| f.jet(x))?;
    let mut report = spline.c2_report(samples)?;
    report.sort_by_key(|j| j.edge);
    let mut s = String::from("edge,v0,v1,jump_s,jump_sx,jump_sy,jump_sxx,jump_sxy,jump_syy,magnitude,relative\n");
    let mut fails = Vec::new();
    for j in &report {
        writeln!(s, "{},{},{},{},{:e},{:e}", j.edge, j.endpoints.0, j.endpoints.1, fmt_row(j.jumps), j.magnitude, j.relative())
            .unwrap();
        if j.relative() >= tol.c2 {
            let check = format!("c2[edge={}]", j.edge);
            fails.push(Failure { check, observed: j.relative(), expected: 0.0, tol: tol.c2 }.to_string());
        }
    }
    emit(out, &s)?;
    if fails.is_empty() {
        Ok(())
    } else {
        Err(Failed::Verification(fails, out.is_none()))
    }
}

fn run_checks(which: CheckKind, hs: &[f64], seed: u64, mode: ExecMode) -> Result<(), Failed> {
    let tol = Tolerances::from_env()?;
    let reports: Vec<CheckReport> = match which {
        CheckKind::Table2 => vec![verify::check_table2(hs, &tol)?],
        CheckKind::Table1 => vec![verify::check_table1(seed, &tol)?],
        CheckKind::Arrangement => vec![verify::check_arrangement(seed, 5, &tol)?],
        CheckKind::Partition => vec![verify::check_partition(seed, 5, 10_000, &tol, mode)?],
        CheckKind::Marsden => vec![verify::check_marsden(seed, 200, &tol)?],
        CheckKind::Family => vec![verify::check_family(seed, 100_000, &tol)?],
        CheckKind::Roundtrip => vec![verify::check_roundtrip(seed, 3, &tol)?],
        CheckKind::Reproduction => vec![verify::check_local_reproduction(seed, 20, 200, &tol, mode)?],
        CheckKind::Global => vec![verify::check_global(seed, &tol, mode)?],
        CheckKind::Derivatives => vec![verify::check_derivatives(seed, 100, &tol)?],
        CheckKind::All => (1..=10).map(|n| verify::run_criterion(n, &tol, mode)).collect::<Result<_, _>>()?,
    };
    let mut out = String::new();
    let mut fails = Vec::new();
    for r in &reports {
        writeln!(out, "{} {}: {}", if r.passed() { "PASS" } else { "FAIL" }, r.name, r.summary).unwrap();
        fails.extend(r.failures.iter().map(|f| f.to_string()));
    }
    let passed = reports.iter().filter(|r| r.passed()).count();
    if reports.len() > 1 {
        writeln!(out, "{passed} of {} checks passed", reports.len()).unwrap();
    }
    emit(None, &out)?;
    if fails.is_empty() {
        Ok(())
    } else {
        Err(Failed::Verification(fails, false))
    }
}

fn run(cli: Cli) -> Result<(), Failed> {
    let mode = if cli.sequential { ExecMode::Sequential } else { ExecMode::Parallel };
    // reject a malformed override before doing any work
    Tolerances::from_env().context("WS3_TOL")?;
    match cli.command {
        Command::BasisInfo { triangle } => basis_info(triangle),
        Command::EvalBasis { grid, triangle, out } => eval_basis(grid, triangle, out.as_deref(), mode),
        Command::Collocation { triangle, csv } => collocation(triangle, csv),
        Command::DumpArrangement { triangle, out } => dump_arrangement(triangle, out.as_deref()),
        Command::Reduce { m, interior, edge_strategy, triangle } => reduce(m, interior, edge_strategy, triangle),
        Command::Interpolate { space, grid, out } => interpolate(&space, grid, out.as_deref(), mode),
        Command::C2Check { space, samples, out } => c2_check(&space, samples, out.as_deref(), mode),
        Command::Check { which, h, seed } => run_checks(which, &h, seed, mode),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failed::Verification(lines, csv_on_stdout)) => {
            let mut out: Box<dyn std::io::Write> =
                if csv_on_stdout { Box::new(std::io::stderr().lock()) } else { Box::new(std::io::stdout().lock()) };
            for l in lines {
                let _ = writeln!(out, "{l}");
            }
            ExitCode::from(1)
        }
        Err(Failed::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
