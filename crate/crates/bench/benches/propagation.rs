use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use probsyl::{
    check_consistency, exact_bounds, parse_kb, query_str, saturate, OracleOptions, QueryExpr, SaturationOptions,
};
use probsyl_bench::{population_kb, STUDENTS};

fn students(c: &mut Criterion) {
    let net = parse_kb(STUDENTS).unwrap();
    let opts = SaturationOptions::default();
    c.bench_function("saturate students", |b| {
        b.iter(|| {
            let mut n = net.clone();
            black_box(saturate(&mut n, &opts))
        })
    });
    let mut saturated = net.clone();
    saturate(&mut saturated, &opts);
    c.bench_function("conjunction query students", |b| {
        b.iter(|| black_box(query_str(&saturated, "young & sport | student", &opts).unwrap()))
    });
    let q = QueryExpr::parse(&net, "student | single").unwrap();
    c.bench_function("exact bounds students", |b| {
        b.iter(|| black_box(exact_bounds(&net, &q, &OracleOptions::default()).unwrap()))
    });
}

fn scaling(c: &mut Criterion) {
    let opts = SaturationOptions::default();
    let mut group = c.benchmark_group("saturate random");
    group.sample_size(10);
    for n in [8, 16, 32, 64] {
        let net = population_kb(n, 0.3, 0.1, n as u64);
        group.bench_with_input(BenchmarkId::from_parameter(n), &net, |b, net| {
            b.iter(|| {
                let mut m = net.clone();
                black_box(saturate(&mut m, &opts))
            })
        });
    }
    group.finish();

    let mut group = c.benchmark_group("consistency check");
    group.sample_size(10);
    for n in [4, 6, 8] {
        let net = population_kb(n, 0.5, 0.05, 100 + n as u64);
        group.bench_with_input(BenchmarkId::from_parameter(n), &net, |b, net| {
            b.iter(|| black_box(check_consistency(net, &OracleOptions::default()).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, students, scaling);
criterion_main!(benches);
