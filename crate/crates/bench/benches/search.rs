use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion as Bench};
use netdoe::{
    augment_blocks, augment_row_column, exhaustive_search, find_automorphisms, fixtures, Criterion, Design, Evaluator,
    ModelSpec, SearchConfig,
};

fn evaluation(c: &mut Bench) {
    let net = fixtures::example(5);
    let spec = ModelSpec::new(&net, 3, Criterion::As).unwrap();
    let evaluator = Evaluator::new(&net, &spec);
    let x: Vec<u8> = (0..net.design_count()).map(|i| (i % 3) as u8).collect();
    c.bench_function("evaluate example 5, m=3", |b| {
        b.iter(|| evaluator.evaluate(black_box(&x)).unwrap())
    });

    let ds = ModelSpec::new(&net, 3, Criterion::Ds).unwrap();
    let evaluator = Evaluator::new(&net, &ds);
    c.bench_function("evaluate example 5, m=3, Ds", |b| {
        b.iter(|| evaluator.evaluate(black_box(&x)).unwrap())
    });
}

fn automorphisms(c: &mut Bench) {
    let rc = augment_row_column(4, 4, 3).unwrap();
    c.bench_function("automorphisms 4x4 row-column", |b| {
        b.iter(|| find_automorphisms(black_box(&rc)).unwrap())
    });
    let ex4 = fixtures::example(4);
    c.bench_function("automorphisms example 4", |b| {
        b.iter(|| find_automorphisms(black_box(&ex4)).unwrap())
    });
}

fn canonicity(c: &mut Bench) {
    let net = augment_blocks(&[4, 4, 4], 3).unwrap();
    let group = find_automorphisms(&net).unwrap();
    let x = Design::from_letters("ABCAABCBCABC").unwrap();
    c.bench_function("is_canonical, 3 blocks of 4", |b| {
        b.iter(|| group.is_canonical(black_box(&x)).unwrap())
    });
}

fn small_search(c: &mut Bench) {
    let net = fixtures::example(1);
    let spec = ModelSpec::new(&net, 2, Criterion::As).unwrap();
    let mut group = c.benchmark_group("exhaustive example 1");
    for autos in [true, false] {
        let config = SearchConfig::exhaustive().with_automorphisms(autos).with_workers(1);
        let label = if autos {
            "with automorphisms"
        } else {
            "without automorphisms"
        };
        group.bench_function(label, |b| b.iter(|| exhaustive_search(&net, &spec, &config).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, evaluation, automorphisms, canonicity, small_search);
criterion_main!(benches);
