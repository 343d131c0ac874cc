use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use growthcalc_bench::fixtures;
use growthcalc_core::legendre::suites::{verify_suite, Suite, SuiteParams};
use growthcalc_core::sequences::gen_bell;
use growthcalc_core::{dual, ell, l_function};

fn transforms(c: &mut Criterion) {
    let mut g = c.benchmark_group("ell");
    for (name, u) in fixtures() {
        g.bench_with_input(BenchmarkId::from_parameter(name), &u, |b, u| b.iter(|| ell(u, black_box(7.5))));
    }
    g.finish();

    let mut g = c.benchmark_group("dual");
    for (name, u) in fixtures() {
        g.bench_with_input(BenchmarkId::from_parameter(name), &u, |b, u| b.iter(|| dual(u, black_box(3.0))));
    }
    g.finish();

    let mut g = c.benchmark_group("l_function");
    for (name, u) in fixtures() {
        g.bench_with_input(BenchmarkId::from_parameter(name), &u, |b, u| {
            b.iter(|| l_function(u, black_box(2.0f64.ln())))
        });
    }
    g.finish();
}

fn sequences(c: &mut Criterion) {
    let mut g = c.benchmark_group("gen_bell");
    for k in [2, 3] {
        g.bench_with_input(BenchmarkId::from_parameter(k), &k, |b, &k| b.iter(|| gen_bell(k, black_box(60))));
    }
    g.finish();
}

fn suites(c: &mut Criterion) {
    let mut g = c.benchmark_group("verify");
    g.sample_size(10);
    let params = SuiteParams { n_max: Some(30), ..SuiteParams::default() };
    g.bench_function("a4", |b| b.iter(|| verify_suite(Suite::A4, black_box(&params))));
    g.bench_function("thm42", |b| b.iter(|| verify_suite(Suite::Thm42, black_box(&SuiteParams::default()))));
    g.finish();
}

criterion_group!(benches, transforms, sequences, suites);
criterion_main!(benches);
