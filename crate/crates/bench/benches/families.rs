//! Closed-form zoo curves and full family analyses.

use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, Criterion};
use cutofflab::curves::MixingOptions;
use cutofflab::cutoff::{analyze, Thresholds, DEFAULT_EPS_GRID};
use cutofflab::zoo::families::{default_pak_c, hypercube_family, pak_family};
use cutofflab::zoo::hypercube::hypercube;
use cutofflab::{CurveBundle, DivergenceSpec};

fn zoo_curves(c: &mut Criterion) {
    let cube = hypercube(400).unwrap();
    let tv = cube.curve(DivergenceSpec::TV).unwrap();
    c.bench_function("hypercube n=400 tv eval", |b| b.iter(|| tv.eval(black_box(1234.5)).unwrap()));
}

fn family_reports(c: &mut Criterion) {
    let opts = MixingOptions::default();
    let th = Thresholds::default();
    c.bench_function("hypercube family tv 25..400", |b| {
        b.iter(|| {
            let f = hypercube_family(vec![25, 50, 100, 200, 400]).unwrap();
            analyze(&f, &DEFAULT_EPS_GRID, DivergenceSpec::TV, &th, &opts).unwrap()
        })
    });
    c.bench_function("pak family renyi:2 25..200", |b| {
        b.iter(|| {
            let f = pak_family(vec![25, 50, 100, 200], Arc::new(default_pak_c)).unwrap();
            analyze(&f, &DEFAULT_EPS_GRID, DivergenceSpec::Renyi(2.0), &th, &opts).unwrap()
        })
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = zoo_curves, family_reports
}
criterion_main!(benches);
