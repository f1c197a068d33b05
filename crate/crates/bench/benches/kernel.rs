use criterion::{black_box, criterion_group, criterion_main, Criterion};

use ultramet_core::extend::{crosscheck_embedding, extend_metric, extension_retraction};
use ultramet_core::gen;
use ultramet_core::hahn::{Exp, ExpDomain, HahnSeries};
use ultramet_core::rat::Rat;
use ultramet_core::retract::tau_retraction;
use ultramet_core::space::ud_distance;

fn bench_retraction(c: &mut Criterion) {
    let mut rng = gen::seeded_rng(1);
    let d = gen::random_space(&mut rng, 12, 5).unwrap();
    let tau = Rat::from_int(2);
    c.bench_function("tau_retraction_n12", |b| {
        b.iter(|| tau_retraction(black_box(&d), &tau).unwrap())
    });
}

fn bench_extension(c: &mut Criterion) {
    let mut rng = gen::seeded_rng(2);
    let (h, d, chain) = gen::random_extension_instance(&mut rng, 12).unwrap();
    let r = extension_retraction(&h, &Rat::from_int(2)).unwrap();
    c.bench_function("extend_metric_n12", |b| {
        b.iter(|| extend_metric(black_box(&d), &h, &r, &chain).unwrap())
    });
}

fn bench_crosscheck(c: &mut Criterion) {
    let mut rng = gen::seeded_rng(3);
    let (h, d, chain) = gen::random_extension_instance(&mut rng, 7).unwrap();
    let r = extension_retraction(&h, &Rat::from_int(2)).unwrap();
    c.bench_function("crosscheck_n7", |b| {
        b.iter(|| crosscheck_embedding(black_box(&d), &h, &r, &chain).unwrap())
    });
}

fn bench_hahn_mul(c: &mut Criterion) {
    let terms = |offsets: &[i64]| {
        HahnSeries::from_terms(
            ExpDomain::Int,
            offsets
                .iter()
                .map(|e| (Exp::Int(*e), Rat::new(*e * 3 + 1, 7).unwrap()))
                .collect(),
        )
        .unwrap()
    };
    let f = terms(&[-4, -1, 0, 2, 5, 9]);
    let g = terms(&[-3, 1, 4, 6, 8, 11]);
    c.bench_function("hahn_mul_6x6", |b| {
        b.iter(|| black_box(&f).mul(black_box(&g)).unwrap())
    });
}

fn bench_ud(c: &mut Criterion) {
    let mut rng = gen::seeded_rng(4);
    let labels = gen::point_labels(10);
    let d = gen::random_table_on(&mut rng, &labels, 4).unwrap();
    let e = gen::random_table_on(&mut rng, &labels, 4).unwrap();
    c.bench_function("ud_distance_n10", |b| {
        b.iter(|| ud_distance(black_box(&d), black_box(&e)).unwrap())
    });
}

criterion_group!(
    benches,
    bench_retraction,
    bench_extension,
    bench_crosscheck,
    bench_hahn_mul,
    bench_ud
);
criterion_main!(benches);
