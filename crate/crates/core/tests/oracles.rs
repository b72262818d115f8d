//! Numerical checks against independent computations: Kronecker-built
//! hypercube laws, operator norms of normal chains, Rayleigh quotients of
//! random test functions, and reproducibility of family reports.

use std::sync::Arc;

use cutofflab::curves::{mixing_time, DivergenceCurve, MixingOptions};
use cutofflab::cutoff::{analyze, Thresholds, DEFAULT_EPS_GRID};
use cutofflab::divergence::{divergence, worst_case};
use cutofflab::random::{random_general, random_reversible, rng};
use cutofflab::spectral::{l2_operator_norm, spectral_gap, spectral_summary};
use cutofflab::zoo::families::{hypercube_family, pak_family, product_family};
use cutofflab::zoo::hypercube::{hypercube, hypercube_product};
use cutofflab::zoo::product_example::ProductExample;
use cutofflab::{CurveBundle, DivergenceSpec, TimeKind};
use rand::Rng;

#[test]
fn hypercube_lumping_matches_kronecker_semigroup() {
    let specs = [
        DivergenceSpec::TV,
        DivergenceSpec::Separation,
        DivergenceSpec::KL,
        DivergenceSpec::Renyi(2.0),
        DivergenceSpec::Lp(2.0),
        DivergenceSpec::RenyiInf,
    ];
    for n in [2usize, 5, 9, 12] {
        let product = hypercube_product(n, TimeKind::Continuized).unwrap();
        let pi = product.stationary();
        let bundle = hypercube(n).unwrap();
        let curves: Vec<_> = specs.iter().map(|&s| bundle.curve(s).unwrap()).collect();
        for t in [0.3, 1.0, 0.5 * n as f64, 2.0 * n as f64, 6.0 * n as f64] {
            let pt = product.semigroup_factorized(t).unwrap();
            let row: Vec<f64> = pt.row(0).iter().copied().collect();
            for (spec, curve) in specs.iter().zip(&curves) {
                let dense = divergence(&row, &pi, *spec).unwrap();
                let lumped = curve.eval(t).unwrap();
                assert!(
                    (dense - lumped).abs() <= 1e-9 * dense.abs().max(1.0),
                    "n = {n}, t = {t}, {spec}: dense {dense} vs lumped {lumped}"
                );
            }
        }
    }
}

#[test]
fn operator_norm_of_normal_chains() {
    for i in 0..20u64 {
        let mut r = rng(41, i);
        let n = 2 + (i as usize % 7);
        let c = random_reversible(&mut r, n, TimeKind::Continuized).unwrap();
        let s = spectral_summary(&c).unwrap();
        for t in [0.0, 0.5, 1.0, 3.0, 7.5] {
            let measured = l2_operator_norm(&c, &c.semigroup_at(t).unwrap());
            let expected = (-s.lambda * t).exp();
            assert!((measured - expected).abs() <= 1e-8, "continuized t = {t}: {measured} vs {expected}");
        }
        let d = c.with_time_kind(TimeKind::Discrete);
        for t in [1.0, 2.0, 5.0, 12.0] {
            let measured = l2_operator_norm(&d, &d.semigroup_at(t).unwrap());
            let expected = s.kappa.powf(t);
            assert!((measured - expected).abs() <= 1e-8, "discrete t = {t}: {measured} vs {expected}");
        }
    }
}

#[test]
fn rayleigh_quotients_respect_the_gap() {
    for i in 0..10u64 {
        let mut r = rng(43, i);
        let n = 3 + (i as usize % 6);
        let c = if i % 2 == 0 {
            random_reversible(&mut r, n, TimeKind::Continuized).unwrap()
        } else {
            random_general(&mut r, n, TimeKind::Continuized).unwrap()
        };
        let lambda = spectral_gap(&c);
        let mut best = f64::INFINITY;
        for _ in 0..200 {
            let f: Vec<f64> = (0..n).map(|_| r.random_range(-1.0..1.0)).collect();
            let var = c.variance(&f);
            let e = c.dirichlet_form(&f, &f).unwrap();
            assert!(e >= lambda * var - 1e-10, "E(f,f) = {e} below λ·Var = {}", lambda * var);
            best = best.min(e / var);
        }
        assert!(best >= lambda - 1e-10);
    }
}

#[test]
fn worst_case_l1_is_submultiplicative() {
    let opts = MixingOptions::default();
    for i in 0..12u64 {
        let mut r = rng(47, i);
        let n = 2 + (i as usize % 6);
        let c = random_reversible(&mut r, n, TimeKind::Continuized).unwrap();
        for (s, t) in [(0.3, 0.7), (1.0, 1.0), (2.0, 0.5), (4.0, 3.0)] {
            let ds = worst_case(&c, s, DivergenceSpec::Lp(1.0)).unwrap();
            let dt = worst_case(&c, t, DivergenceSpec::Lp(1.0)).unwrap();
            let dst = worst_case(&c, s + t, DivergenceSpec::Lp(1.0)).unwrap();
            assert!(dst <= ds * dt + 1e-12, "d({}) = {dst} > {ds}·{dt}", s + t);
        }
        let curve = DivergenceCurve::matrix(Arc::new(c), DivergenceSpec::Lp(1.0)).unwrap();
        for eps in [0.5, 0.2] {
            let single = mixing_time(&curve, eps, &opts).unwrap();
            let squared = mixing_time(&curve, eps * eps, &opts).unwrap();
            assert!(squared.t_lo <= 2.0 * single.t_hi, "t(ε²) = {} > 2·{}", squared.t, single.t);
        }
    }
}

#[test]
fn product_example_l2_mixing_time_formula() {
    for ln_g in [50.0, 200.0, 800.0] {
        let p = 0.2;
        let ex = ProductExample::new(p, ln_g).unwrap();
        let curve = cutofflab::zoo::product_example(p, ln_g).unwrap().curve(DivergenceSpec::Lp(2.0)).unwrap();
        let t = mixing_time(&curve, 0.5, &MixingOptions::default()).unwrap().t;
        let formula = ln_g / (2.0 * (1.0 - p));
        assert!((t / formula - 1.0).abs() <= 0.05, "ln g = {ln_g}: measured {t}, formula {formula}");
        assert!(ex.d2_x(t) <= 0.5 + 1e-9);
    }
}

#[test]
fn family_reports_are_byte_identical() {
    let run = || {
        let f = hypercube_family(vec![10, 20, 40, 80]).unwrap();
        let r = analyze(&f, &DEFAULT_EPS_GRID, DivergenceSpec::TV, &Thresholds::default(), &MixingOptions::default())
            .unwrap();
        (serde_json::to_string(&r).unwrap(), r.table_csv())
    };
    assert_eq!(run(), run());
}

#[test]
fn pak_and_product_families_build_for_all_indices() {
    let pak = pak_family(vec![8, 16, 32, 64], Arc::new(cutofflab::zoo::families::default_pak_c)).unwrap();
    let r = analyze(&pak, &[0.4, 0.1], DivergenceSpec::TV, &Thresholds::default(), &MixingOptions::default()).unwrap();
    assert!(!r.partial && r.table.iter().all(|row| row.missing.is_none()));
    let prod = product_family(
        vec![6, 10, 14, 18, 20],
        Arc::new(cutofflab::zoo::families::default_product_p),
        Arc::new(cutofflab::zoo::families::default_product_ln_g),
    )
    .unwrap();
    let r = analyze(&prod, &[0.4, 0.1], DivergenceSpec::KL, &Thresholds::default(), &MixingOptions::default()).unwrap();
    assert!(!r.partial);
    for row in &r.table {
        assert!(row.mix.values().all(|t| t.is_finite() && *t > 0.0));
    }
}
