use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use goldtri::rules::{build_star_catalog, check_rule_L};
use goldtri::subst::{compose_patch, decompose_patch, default_seed, supertile};
use goldtri::verify::lemma::star_neighborhood;
use goldtri::verify::{FitIndex, ForceBudget};
use goldtri_bench::{default_supertile, numbers};

fn arithmetic(c: &mut Criterion) {
    let xs = numbers(1024);
    c.bench_function("sign", |b| {
        b.iter(|| xs.iter().filter(|x| x.sign().as_i8() > 0).count())
    });
    c.bench_function("mul", |b| {
        b.iter(|| xs.windows(2).map(|w| &w[0] * &w[1]).collect::<Vec<_>>())
    });
}

fn substitution(c: &mut Criterion) {
    let mut g = c.benchmark_group("supertile");
    for n in [8u32, 12] {
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| supertile(black_box(n), &default_seed()).unwrap())
        });
    }
    g.finish();
    let p = default_supertile(10);
    let q = decompose_patch(&p);
    c.bench_function("compose s11", |b| {
        b.iter(|| compose_patch(black_box(&q)).unwrap())
    });
}

fn rules(c: &mut Criterion) {
    let mut g = c.benchmark_group("rules");
    g.sample_size(10);
    g.bench_function("star catalog 12", |b| {
        b.iter(|| build_star_catalog(12).unwrap())
    });
    let catalog = build_star_catalog(14).unwrap();
    let p = default_supertile(12);
    g.bench_function("check s12", |b| {
        b.iter(|| check_rule_L(black_box(&p), &catalog))
    });
    let index = FitIndex::undecorated(&catalog);
    let class = catalog.of_shape(5).next().unwrap().class;
    g.bench_function("force C5 neighborhood", |b| {
        b.iter(|| star_neighborhood(&class, &index, &ForceBudget::default()).unwrap())
    });
    g.finish();
}

criterion_group!(benches, arithmetic, substitution, rules);
criterion_main!(benches);
