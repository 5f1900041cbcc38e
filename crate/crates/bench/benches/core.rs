use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use bjorth_bench::{canonical_map, decision_pairs, semilinear_map, shape, size_sweep};
use bjorth_core::orthograph::build_orthograph;
use bjorth_core::preservers::fixtures;
use bjorth_core::{
    decompose, det_shift_polynomial, factor_singularity_preserver, strong_bj, strong_bj_witness,
    verify_mutual_preserver, Element,
};

const TOL: f64 = 1e-8;

fn deciders(c: &mut Criterion) {
    let mut group = c.benchmark_group("strong_bj");
    for s in size_sweep() {
        let pairs = decision_pairs(&s, 16);
        group.bench_with_input(BenchmarkId::new("distance", s.tag()), &pairs, |b, pairs| {
            b.iter(|| pairs.iter().filter(|(x, y)| strong_bj(x, y, TOL).unwrap()).count())
        });
        group.bench_with_input(BenchmarkId::new("witness", s.tag()), &pairs, |b, pairs| {
            b.iter(|| pairs.iter().filter(|(x, y)| strong_bj_witness(x, y, TOL).unwrap().is_some()).count())
        });
    }
    group.finish();
}

fn preservers(c: &mut Criterion) {
    let mut group = c.benchmark_group("decompose");
    for dims in [&[3][..], &[2, 3], &[2, 2, 2], &[4, 4]] {
        let s = shape(dims);
        let m = canonical_map(&s, 1);
        group.bench_with_input(BenchmarkId::from_parameter(s.tag()), &m, |b, m| {
            b.iter(|| decompose(black_box(m), TOL).unwrap())
        });
    }
    group.finish();

    let mut group = c.benchmark_group("verify_mutual_preserver");
    group.sample_size(10);
    let s = shape(&[2, 3]);
    let good = canonical_map(&s, 2);
    let bad = fixtures::transpose_map(&s);
    group.bench_function("canonical_1000_pairs", |b| b.iter(|| verify_mutual_preserver(&good, 1000, 0).unwrap()));
    group.bench_function("transpose_until_violation", |b| b.iter(|| verify_mutual_preserver(&bad, 10_000, 0).unwrap()));
    group.finish();
}

fn singularity(c: &mut Criterion) {
    let mut group = c.benchmark_group("factor");
    for dims in [&[3][..], &[2, 2], &[1, 3], &[4]] {
        let s = shape(dims);
        let m = semilinear_map(&s, 3);
        group.bench_with_input(BenchmarkId::from_parameter(s.tag()), &m, |b, m| {
            b.iter(|| factor_singularity_preserver(black_box(m), TOL).unwrap())
        });
    }
    group.finish();

    let mut group = c.benchmark_group("det_shift_polynomial");
    for n in [2usize, 4, 6, 8] {
        let s = shape(&[n]);
        let t = Element::random(&s, 5);
        let f = Element::random(&s, 6);
        group.bench_with_input(BenchmarkId::from_parameter(n), &(t, f), |b, (t, f)| {
            b.iter(|| det_shift_polynomial(t, f, n).unwrap())
        });
    }
    group.finish();
}

fn orthograph(c: &mut Criterion) {
    let mut group = c.benchmark_group("orthograph");
    group.sample_size(10);
    for samples in [16usize, 64] {
        let s = shape(&[2, 2]);
        group.bench_with_input(BenchmarkId::new("structured_2x2", samples), &samples, |b, &n| {
            b.iter(|| build_orthograph(&s, n, 0, true))
        });
    }
    group.finish();
}

criterion_group!(benches, deciders, preservers, singularity, orthograph);
criterion_main!(benches);
