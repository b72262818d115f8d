//! Dense-chain kernels: semigroups, spectral summaries, worst-case curves,
//! mixing times and functional constants.

use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use cutofflab::curves::{mixing_time, DivergenceCurve, MixingOptions};
use cutofflab::divergence::worst_case;
use cutofflab::functional::{nonlinear_constant, FunctionalKind, FunctionalOptions};
use cutofflab::{spectral_summary, DivergenceSpec, TimeKind};
use cutofflab_bench::{general, reversible};

fn semigroup(c: &mut Criterion) {
    let mut g = c.benchmark_group("semigroup_at");
    for n in [16usize, 64, 256] {
        let rev = reversible(n, TimeKind::Continuized);
        let gen = general(n, TimeKind::Continuized);
        let disc = reversible(n, TimeKind::Discrete);
        g.bench_with_input(BenchmarkId::new("reversible-eigen", n), &n, |b, _| {
            b.iter(|| rev.semigroup_at(black_box(3.7)).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("general-pade", n), &n, |b, _| {
            b.iter(|| gen.semigroup_at(black_box(3.7)).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("discrete-power", n), &n, |b, _| {
            b.iter(|| disc.semigroup_at(black_box(37.0)).unwrap())
        });
    }
    g.finish();
}

fn spectral(c: &mut Criterion) {
    let mut g = c.benchmark_group("spectral_summary");
    for n in [16usize, 64, 256] {
        let chain = general(n, TimeKind::Continuized);
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| b.iter(|| spectral_summary(&chain).unwrap()));
    }
    g.finish();
}

fn curves(c: &mut Criterion) {
    let chain = Arc::new(reversible(64, TimeKind::Continuized));
    c.bench_function("worst_case tv n=64", |b| {
        b.iter(|| worst_case(&chain, black_box(2.5), DivergenceSpec::TV).unwrap())
    });
    c.bench_function("mixing_time tv n=64", |b| {
        b.iter(|| {
            let curve = DivergenceCurve::matrix(chain.clone(), DivergenceSpec::TV).unwrap();
            mixing_time(&curve, black_box(0.25), &MixingOptions::default()).unwrap()
        })
    });
}

fn constants(c: &mut Criterion) {
    let chain = reversible(6, TimeKind::Continuized);
    let opts = FunctionalOptions { restarts: 8, ..FunctionalOptions::default() };
    c.bench_function("nonlinear_constant lsi p=2 n=6", |b| {
        b.iter(|| nonlinear_constant(&chain, black_box(2.0), FunctionalKind::Lsi, &opts).unwrap())
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = semigroup, spectral, curves, constants
}
criterion_main!(benches);
