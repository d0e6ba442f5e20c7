use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use etpa_core::gating::{default_shape, optimize_gate, DEFAULT_LIFETIME};
use etpa_core::{
    bound_attenuation, bound_separation, builtin_table, optimize_eta, run_ladder, simulate,
    solve_bound_numeric, CrossSection, LadderOptions, Scheme,
};

fn closed_forms(c: &mut Criterion) {
    let table = builtin_table();
    c.bench_function("bound_separation/table", |b| {
        b.iter(|| table.iter().map(|cfg| bound_separation(black_box(cfg)).gm()).sum::<f64>())
    });
    c.bench_function("bound_attenuation/table", |b| {
        b.iter(|| table.iter().map(|cfg| bound_attenuation(black_box(cfg), 0.5).unwrap().gm()).sum::<f64>())
    });
}

fn solvers(c: &mut Criterion) {
    let geneva = &builtin_table()[0];
    c.bench_function("solve_bound_numeric/geneva", |b| {
        b.iter(|| solve_bound_numeric(black_box(geneva), Scheme::SeparationDeterministic).unwrap())
    });
    c.bench_function("optimize_eta/geneva", |b| b.iter(|| optimize_eta(black_box(geneva))));

    let boulder = &builtin_table()[4];
    let shape = default_shape(boulder, DEFAULT_LIFETIME);
    c.bench_function("optimize_gate/boulder_fs", |b| {
        b.iter(|| {
            optimize_gate(black_box(boulder), DEFAULT_LIFETIME, shape, Scheme::SeparationDeterministic)
                .unwrap()
        })
    });
    c.bench_function("run_ladder/boulder_fs", |b| {
        b.iter(|| run_ladder(black_box(boulder), &LadderOptions::default()).unwrap())
    });
}

fn monte_carlo(c: &mut Criterion) {
    let geneva = &builtin_table()[0];
    let sigma = CrossSection::from_gm(bound_separation(geneva).gm());
    c.bench_function("simulate/geneva_1e4", |b| {
        b.iter(|| simulate(black_box(geneva), Scheme::SeparationDeterministic, sigma, 10_000, 1).unwrap())
    });
}

criterion_group!(benches, closed_forms, solvers, monte_carlo);
criterion_main!(benches);
