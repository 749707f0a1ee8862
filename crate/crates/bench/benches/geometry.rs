use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use slicelab_bench::{circle, circle_stack};
use slicelab_core::geometry::{build_shell, normalize_loop, obj_string, reconstruct_volume};

fn shells(c: &mut Criterion) {
    let mut g = c.benchmark_group("build_shell");
    for n in [16, 64, 256, 1024] {
        let a = normalize_loop(&circle(0.0, 0.0, 10.0, n), 0, None).unwrap();
        let b = normalize_loop(&circle(0.3, 0.1, 9.0, n + 7), 0, None).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |bench, _| {
            bench.iter(|| build_shell(black_box(&a), 0.0, black_box(&b), 1.0).unwrap())
        });
    }
    g.finish();
}

fn volumes(c: &mut Criterion) {
    let mut g = c.benchmark_group("reconstruct_volume");
    for (slices, n) in [(10, 32), (40, 64), (100, 128)] {
        let stack = circle_stack(slices, n);
        g.bench_with_input(BenchmarkId::from_parameter(format!("{slices}x{n}")), &stack, |bench, stack| {
            bench.iter(|| reconstruct_volume(black_box(stack), 1.0).unwrap())
        });
    }
    g.finish();
}

fn export(c: &mut Criterion) {
    let mesh = reconstruct_volume(&circle_stack(100, 128), 1.0).unwrap().mesh;
    c.bench_function("obj_string/100x128", |bench| bench.iter(|| obj_string(black_box(&mesh))));
}

criterion_group!(benches, shells, volumes, export);
criterion_main!(benches);
