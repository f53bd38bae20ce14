use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ws3_core::functions::TestFunction;
use ws3_core::mesh::samples;
use ws3_core::par::map_range;
use ws3_core::sampling::quasi_random_in_triangle;
use ws3_core::{BasisSet, ExecMode, GlobalSpace, Order, ReductionOptions, TriangulationMesh, Vec2};

const MODES: [(&str, ExecMode); 2] = [("sequential", ExecMode::Sequential), ("parallel", ExecMode::Parallel)];

/// A structured `n × n` grid on the unit square.
fn grid(n: usize) -> TriangulationMesh {
    let h = 1.0 / n as f64;
    let vs = (0..=n).flat_map(|j| (0..=n).map(move |i| Vec2::new(i as f64 * h, j as f64 * h))).collect();
    let id = |i: usize, j: usize| j * (n + 1) + i;
    let mut ts = Vec::new();
    for j in 0..n {
        for i in 0..n {
            ts.push([id(i, j), id(i + 1, j), id(i, j + 1)]);
            ts.push([id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    TriangulationMesh::new(vs, ts).unwrap()
}

fn basis_evaluation(c: &mut Criterion) {
    let basis = BasisSet::from_corners(Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.1), Vec2::new(0.2, 0.9)).unwrap();
    let pts = quasi_random_in_triangle(basis.triangle(), 4000);
    let mut g = c.benchmark_group("basis_eval_4000_points");
    for (name, mode) in MODES {
        g.bench_function(name, |b| {
            b.iter(|| {
                let v = map_range(mode, pts.len(), |i| basis.eval(&pts[i], Order::Second).unwrap()[0].value);
                black_box(v)
            })
        });
    }
    g.finish();
}

fn global_build(c: &mut Criterion) {
    let mut g = c.benchmark_group("global_build_m18");
    g.sample_size(10);
    for n in [4, 8] {
        let mesh = grid(n);
        for (name, mode) in MODES {
            g.bench_with_input(BenchmarkId::new(name, 2 * n * n), &mesh, |b, mesh| {
                b.iter(|| GlobalSpace::build(mesh.clone(), 18, ReductionOptions::default(), mode).unwrap())
            });
        }
    }
    g.finish();
}

fn interpolate_and_check(c: &mut Criterion) {
    let mut g = c.benchmark_group("interpolate_c2_fan");
    g.sample_size(10);
    for (name, mode) in MODES {
        let space = GlobalSpace::build(samples::disk_fan(), 21, ReductionOptions::default(), mode).unwrap();
        g.bench_function(name, |b| {
            b.iter(|| {
                let s = space.interpolate(|x| TestFunction::Franke.jet(x)).unwrap();
                black_box(s.c2_report(9).unwrap())
            })
        });
    }
    g.finish();
}

criterion_group!(benches, basis_evaluation, global_build, interpolate_and_check);
criterion_main!(benches);
