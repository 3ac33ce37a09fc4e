use std::hint::black_box;

use betaspace::beta::{check_axioms, field_metric_space, LaurentLine};
use betaspace::level::{cmt_solve, product_space, SolveOptions};
use betaspace::props::{run_suite, Suite, SuiteConfig};
use betaspace::uniformity::{roundtrip_check, symmetric_structures};
use betaspace::{PrecisionBudget, SeriesVector};
use betaspace_bench::{affine, series};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn arithmetic(c: &mut Criterion) {
    let budget = PrecisionBudget::default();
    let a = series("3 - 2*x + 5/7*x^3 + x^9");
    let b = series("1/2*x^-1 + 4 - x^2 + 2/3*x^5");
    c.bench_function("multiply to horizon", |bench| {
        bench.iter(|| black_box(&a * &b).truncate(64))
    });
    c.bench_function("invert to horizon", |bench| {
        bench.iter(|| black_box(&a).invert(&budget).unwrap().truncate(64))
    });
}

fn checks(c: &mut Criterion) {
    let budget = PrecisionBudget::default();
    let line = field_metric_space(LaurentLine, budget).unwrap();
    c.bench_function("laurent axioms, 100 samples", |bench| {
        bench.iter(|| check_axioms(&line, 100, black_box(7)))
    });
    let spaces = symmetric_structures(3);
    c.bench_function("round trip every 3-point structure", |bench| {
        bench.iter(|| spaces.iter().all(|s| roundtrip_check(s).unwrap().passed()))
    });
}

fn solver(c: &mut Criterion) {
    let mut group = c.benchmark_group("cmt_solve");
    for horizon in [16, 32, 64] {
        let budget = PrecisionBudget::new(horizon, 64);
        let space = product_space(1, budget).unwrap();
        let cert = affine("1/2 + x", "1");
        let x0 = SeriesVector::zeros(1);
        group.bench_with_input(
            BenchmarkId::new("a = 1/2 + x", horizon),
            &horizon,
            |bench, _| {
                bench.iter(|| cmt_solve(&space, &cert, &x0, &SolveOptions::default()).unwrap())
            },
        );
    }
    group.finish();
}

fn suites(c: &mut Criterion) {
    let mut group = c.benchmark_group("props");
    group.sample_size(10);
    for suite in [Suite::FieldLaws, Suite::Levels, Suite::GeometricSeries] {
        let config = SuiteConfig {
            seed: 1,
            samples: 20,
            budget: PrecisionBudget::default(),
        };
        group.bench_function(suite.name(), |bench| {
            bench.iter(|| run_suite(suite, &config))
        });
    }
    group.finish();
}

criterion_group!(benches, arithmetic, checks, solver, suites);
criterion_main!(benches);
