use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use turan_bench::{ARGS, ORDERS};
use turan_core::ratio::{ratio_hermite, scan};
use turan_core::specfun::{dnu, hermite};
use turan_core::{Order, QuadratureConfig, ScanKind};

fn bench_eval(c: &mut Criterion) {
    let cfg = QuadratureConfig::default();
    let mut group = c.benchmark_group("dnu");
    for &nu in &ORDERS {
        let order = Order::new(nu).unwrap();
        for &x in &ARGS {
            group.bench_with_input(BenchmarkId::new(format!("nu={nu}"), x), &x, |b, &x| {
                b.iter(|| dnu(order, black_box(x), &cfg).unwrap())
            });
        }
    }
    group.finish();

    let mut group = c.benchmark_group("hermite");
    for &nu in &ORDERS {
        let order = Order::new(nu).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(nu), &order, |b, &o| {
            b.iter(|| hermite(o, black_box(0.7), &cfg).unwrap())
        });
    }
    group.finish();
}

fn bench_ratio(c: &mut Criterion) {
    let cfg = QuadratureConfig::default();
    let order = Order::new(-1.0).unwrap();
    c.bench_function("ratio_hermite", |b| {
        b.iter(|| ratio_hermite(order, black_box(-3.0), &cfg).unwrap())
    });
    c.bench_function("scan_ratio_h_241", |b| {
        b.iter(|| scan(ScanKind::RatioH, order, -30.0, 30.0, 241, &cfg).unwrap())
    });
}

criterion_group!(benches, bench_eval, bench_ratio);
criterion_main!(benches);
