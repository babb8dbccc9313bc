use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use schubart_core::dynamics::{gamma_from_energy, vector_field, IntegratorConfig};
use schubart_core::potential::eval_fields;
use schubart_core::shooting::{bracket_and_bisect, ShootConfig};
use schubart_core::wazewski::exit_map;
use schubart_core::{EnergyLevel, MassContext, RegularizedState};

fn setup() -> (MassContext, EnergyLevel) {
    (MassContext::new(1.0 / 3.0).unwrap(), EnergyLevel::new(-1.0).unwrap())
}

fn fields(c: &mut Criterion) {
    let (ctx, h) = setup();
    c.bench_function("eval_fields", |b| b.iter(|| eval_fields(black_box(0.15), black_box(0.7), &ctx).unwrap()));
    let g = gamma_from_energy(0.15, -0.1, 0.7, &ctx, h).unwrap();
    let s = RegularizedState::new(0.15, -0.1, 0.7, g);
    c.bench_function("vector_field", |b| b.iter(|| vector_field(black_box(&s), &ctx, h).unwrap()));
}

fn flows(c: &mut Criterion) {
    let (ctx, h) = setup();
    let cfg = IntegratorConfig::default();
    c.bench_function("exit_map", |b| b.iter(|| exit_map(black_box(0.18), &ctx, h, &cfg).unwrap()));
    let mut group = c.benchmark_group("shoot");
    group.sample_size(10);
    group.bench_function("m=1/3 h=-1", |b| b.iter(|| bracket_and_bisect(&ctx, h, &ShootConfig::default()).unwrap()));
    group.finish();
}

criterion_group!(benches, fields, flows);
criterion_main!(benches);
