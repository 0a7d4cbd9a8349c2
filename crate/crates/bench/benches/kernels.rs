use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hyperorbit_bench::{sample_curves, sample_forms, sample_real_polys};
use hyperorbit_core::{densities, orbits, sturm};
use num_bigint::BigInt;

fn real_roots(c: &mut Criterion) {
    let mut g = c.benchmark_group("real_roots");
    for n in [4usize, 8, 12] {
        let polys = sample_real_polys(n, 64);
        let big: Vec<Vec<BigInt>> = polys
            .iter()
            .map(|p| p.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        g.bench_with_input(BenchmarkId::new("fast", n), &polys, |b, ps| {
            b.iter(|| ps.iter().map(|p| sturm::real_root_count_i64(black_box(p))).sum::<usize>())
        });
        g.bench_with_input(BenchmarkId::new("exact", n), &big, |b, ps| {
            b.iter(|| ps.iter().map(|p| sturm::exact_real_root_count(black_box(p))).sum::<usize>())
        });
    }
    g.finish();
}

fn discriminant(c: &mut Criterion) {
    let mut g = c.benchmark_group("discriminant");
    for n in [4usize, 8, 12] {
        let forms = sample_forms(n, 16, 1000);
        g.bench_with_input(BenchmarkId::from_parameter(n), &forms, |b, fs| {
            b.iter(|| fs.iter().map(|f| f.discriminant().unwrap()).count())
        });
    }
    g.finish();
}

fn pair_from_point(c: &mut Criterion) {
    let mut g = c.benchmark_group("pair_from_point");
    for n in [4usize, 6, 8] {
        let curves = sample_curves(n, 8, 50);
        g.bench_with_input(BenchmarkId::from_parameter(n), &curves, |b, cs| {
            b.iter(|| {
                cs.iter()
                    .map(|(f, p)| orbits::pair_from_point(black_box(f), p).unwrap())
                    .count()
            })
        });
    }
    g.finish();
}

fn factorization_mod_p(c: &mut Criterion) {
    let mut g = c.benchmark_group("factorization_type");
    let forms = sample_forms(10, 32, 1 << 20);
    for p in [3u128, 101, 1_000_003] {
        g.bench_with_input(BenchmarkId::from_parameter(p), &p, |b, &p| {
            b.iter(|| {
                forms
                    .iter()
                    .filter_map(|f| f.factorization_type_mod_p(p, 7).ok())
                    .count()
            })
        });
    }
    g.finish();
}

fn exact_densities(c: &mut Criterion) {
    c.bench_function("mu_p_all/n=10,p=101", |b| {
        b.iter(|| densities::mu_p_all(black_box(10), 101))
    });
}

criterion_group!(
    benches,
    real_roots,
    discriminant,
    pair_from_point,
    factorization_mod_p,
    exact_densities
);
criterion_main!(benches);
