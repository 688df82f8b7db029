use criterion::{black_box, criterion_group, criterion_main, Criterion};

use grzlab::bridge::{boolean_extension, finite_blok_check, AlgebraCatalog};
use grzlab::catalog::{enumerate_heyting, enumerate_interior, enumerate_posets, grz_up_to, labeled_interior};
use grzlab::freealg::free_algebra;
use grzlab::modal::{blok_characterization, validate_modal};
use grzlab::{HeytingAlgebra, Limits};

fn enumeration(c: &mut Criterion) {
    c.bench_function("posets on 6 points", |b| b.iter(|| enumerate_posets(black_box(6)).unwrap()));
    c.bench_function("topologies on 4 points", |b| b.iter(|| enumerate_interior(black_box(4)).unwrap()));
    c.bench_function("heyting up to size 6", |b| b.iter(|| enumerate_heyting(black_box(6)).unwrap()));
}

fn modal(c: &mut Criterion) {
    let all = labeled_interior(4).unwrap();
    c.bench_function("validate 355 interior algebras", |b| {
        b.iter(|| all.iter().filter(|m| validate_modal(m).grz).count())
    });
    c.bench_function("blok characterization, 4 points", |b| {
        b.iter(|| all.iter().filter(|m| blok_characterization(m).unwrap().is_grz).count())
    });
    let grz = grz_up_to(4).unwrap();
    c.bench_function("finite blok check, 4 atoms", |b| {
        b.iter(|| grz.iter().map(|m| finite_blok_check(m).unwrap()).collect::<Vec<_>>())
    });
}

fn bridge(c: &mut Criterion) {
    let hs = enumerate_heyting(8).unwrap();
    c.bench_function("B(H) for 36 Heyting algebras", |b| {
        b.iter(|| hs.iter().map(|h| boolean_extension(h).unwrap()).collect::<Vec<_>>())
    });
    let two = AlgebraCatalog::heyting("2", vec![HeytingAlgebra::chain(2)]).unwrap();
    let three = AlgebraCatalog::heyting("3", vec![HeytingAlgebra::chain(3)]).unwrap();
    let limits = Limits::default();
    c.bench_function("free algebra, 2-chain, 2 generators", |b| {
        b.iter(|| free_algebra(&two, 2, &limits).unwrap())
    });
    c.bench_function("free algebra, 3-chain, 1 generator", |b| {
        b.iter(|| free_algebra(&three, 1, &limits).unwrap())
    });
}

criterion_group!(benches, enumeration, modal, bridge);
criterion_main!(benches);
