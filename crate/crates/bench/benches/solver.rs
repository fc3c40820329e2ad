use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, Criterion};
use trace_shape_core::mesh::make_disk;
use trace_shape_core::modular::gradient_modular;
use trace_shape_core::trace_solver::{constraint_gradient, objective_gradient, solve, SolverConfig, VanishingConstraint};
use trace_shape_core::{ScalarField, YoungFunction};

fn field(h: f64) -> ScalarField {
    let m = Arc::new(make_disk(1.0, h).unwrap());
    ScalarField::from_fn(m, |p| 1.0 + 0.3 * p[0] - 0.2 * p[1] * p[1])
}

fn assembly(c: &mut Criterion) {
    let u = field(0.05);
    let g = YoungFunction::parse("powlog(3,1,2)").unwrap();
    let mut group = c.benchmark_group("assembly");
    group.bench_function("gradient_modular h=0.05", |b| b.iter(|| gradient_modular(&g, black_box(&u))));
    group.bench_function("objective_gradient h=0.05", |b| b.iter(|| objective_gradient(&g, black_box(&u), 1e-8, None)));
    group.bench_function("constraint_gradient h=0.05", |b| b.iter(|| constraint_gradient(&g, black_box(&u), 1e-8, None)));
    group.finish();
}

fn solves(c: &mut Criterion) {
    let mesh = Arc::new(make_disk(1.0, 0.1).unwrap());
    let none = VanishingConstraint::none(&mesh);
    let cfg = SolverConfig::default();
    let mut group = c.benchmark_group("solve");
    group.sample_size(10);
    for p in [2.0, 3.0] {
        let g = YoungFunction::power(p);
        group.bench_function(format!("constant p={p} h=0.1"), |b| b.iter(|| solve(&g, &g, &mesh, &none, &cfg).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, assembly, solves);
criterion_main!(benches);
