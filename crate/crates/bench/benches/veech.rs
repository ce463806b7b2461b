use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use origami_core::catalog;
use origami_core::congruence::{image_mod, is_congruence};
use origami_core::sequences::{build, Base, SequenceSpec};
use origami_core::veech::compute_veech;

fn veech(c: &mut Criterion) {
    let d = catalog::d();
    c.bench_function("veech/D", |b| {
        b.iter(|| compute_veech(black_box(&d)).unwrap())
    });
    let o3 = build(SequenceSpec::new(Base::L23, 3).unwrap());
    c.bench_function("veech/O(3)", |b| {
        b.iter(|| compute_veech(black_box(&o3)).unwrap())
    });
}

fn congruence(c: &mut Criterion) {
    let g = compute_veech(&catalog::d()).unwrap();
    c.bench_function("closure/D mod 60", |b| {
        b.iter(|| image_mod(black_box(&g), 60, 10_000_000).unwrap())
    });
    let l = compute_veech(&catalog::l23()).unwrap();
    c.bench_function("congruence/L23", |b| {
        b.iter(|| is_congruence(black_box(&l)).unwrap())
    });
}

fn canonical(c: &mut Criterion) {
    let o = build(SequenceSpec::new(Base::D, 3).unwrap());
    c.bench_function("canonical/D(3)", |b| {
        b.iter(|| black_box(&o).canonical_form())
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = veech, congruence, canonical
}
criterion_main!(benches);
