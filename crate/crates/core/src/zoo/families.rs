//! Named families for the cutoff analyzer.

use std::sync::Arc;

use crate::bundle::{ChainBundle, CurveBundle, FnBundle, SpectralTriple};
use crate::chain::TimeKind;
use crate::cutoff::{BundleBuilder, ChainFamily};
use crate::divergence::DivergenceSpec;
use crate::error::{Error, Result};
use crate::zoo::hypercube::{hypercube, hypercube_chain, hypercube_discrete};
use crate::zoo::pak::pak_hypercube;
use crate::zoo::product_example::product_example;

/// A real parameter as a function of the family index.
pub type ParamMap = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Continuized hypercube walks on weight classes.
pub fn hypercube_family(indices: Vec<usize>) -> Result<ChainFamily> {
    let builder: BundleBuilder = Arc::new(|n| Ok(Box::new(hypercube(n)?) as Box<dyn CurveBundle>));
    ChainFamily::new("hypercube", indices, builder)
}

/// Discrete hypercube walks on weight classes.
pub fn hypercube_discrete_family(indices: Vec<usize>) -> Result<ChainFamily> {
    let builder: BundleBuilder = Arc::new(|n| Ok(Box::new(hypercube_discrete(n)?) as Box<dyn CurveBundle>));
    ChainFamily::new("hypercube-discrete", indices, builder)
}

/// Hypercube walks as dense `2^n`-state chains, `n ≤ 12`.
pub fn hypercube_dense_family(indices: Vec<usize>, time_kind: TimeKind) -> Result<ChainFamily> {
    let builder: BundleBuilder = Arc::new(move |n| {
        Ok(Box::new(ChainBundle::new(hypercube_chain(n, time_kind)?, format!("hypercube-dense(n={n})")))
            as Box<dyn CurveBundle>)
    });
    ChainFamily::new("hypercube-dense", indices, builder)
}

/// `c_n = 1/(n √(ln n))`.
pub fn default_pak_c(n: f64) -> f64 {
    1.0 / (n * n.ln().sqrt())
}

/// Pak transforms of the discrete hypercube walk with `c = c_n`.
pub fn pak_family(indices: Vec<usize>, c_n: ParamMap) -> Result<ChainFamily> {
    let builder: BundleBuilder = Arc::new(move |n| {
        let c = c_n(n as f64);
        Ok(Box::new(pak_hypercube(n, c)?) as Box<dyn CurveBundle>)
    });
    ChainFamily::new("pak", indices, builder)
}

/// `p_n = 1/(2 ln n)`, which is `1/ln ln g_n` for `ln g_n = n²`.
pub fn default_product_p(n: f64) -> f64 {
    1.0 / (2.0 * n.ln())
}

pub fn default_product_ln_g(n: f64) -> f64 {
    n * n
}

pub fn product_family(indices: Vec<usize>, p_n: ParamMap, ln_g_n: ParamMap) -> Result<ChainFamily> {
    let builder: BundleBuilder = Arc::new(move |n| {
        let nf = n as f64;
        Ok(Box::new(product_example(p_n(nf), ln_g_n(nf))?) as Box<dyn CurveBundle>)
    });
    ChainFamily::new("product_example", indices, builder)
}

/// Curves `e^{−t/n}` for every divergence: ratios are exactly `ln η / ln ε`.
pub fn exponential_family(indices: Vec<usize>) -> Result<ChainFamily> {
    let builder: BundleBuilder = Arc::new(|n| {
        if n == 0 {
            return Err(Error::InvalidParameter("index must be ≥ 1".into()));
        }
        let nf = n as f64;
        Ok(Box::new(FnBundle {
            label: format!("exponential(n={n})"),
            time_kind: TimeKind::Continuized,
            spectral: SpectralTriple::new(1.0 / nf, (-1.0 / nf).exp()),
            horizon: crate::curves::HORIZON_FACTOR * nf,
            f: Arc::new(move |_: DivergenceSpec, t| Ok((-t / nf).exp())),
        }) as Box<dyn CurveBundle>)
    });
    ChainFamily::new("exponential", indices, builder)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::MixingOptions;
    use crate::cutoff::{analyze, Thresholds, Verdict};

    #[test]
    fn closed_form_and_dense_hypercube_agree() {
        let idx = vec![4, 5, 6, 7, 8];
        let eps = [0.4, 0.25, 0.1, 0.05];
        let th = Thresholds::default();
        let o = MixingOptions::default();
        let a = analyze(&hypercube_family(idx.clone()).unwrap(), &eps, DivergenceSpec::TV, &th, &o).unwrap();
        let b = analyze(&hypercube_dense_family(idx, TimeKind::Continuized).unwrap(), &eps, DivergenceSpec::TV, &th, &o)
            .unwrap();
        assert_eq!(a.verdict, b.verdict);
        for (ra, rb) in a.table.iter().zip(&b.table) {
            for &e in &eps {
                let (ta, tb) = (ra.t(e).unwrap(), rb.t(e).unwrap());
                assert!((ta - tb).abs() <= 1e-5 * ta, "n = {}: {ta} vs {tb}", ra.n);
            }
            assert!((ra.lambda.unwrap() - rb.lambda.unwrap()).abs() < 1e-10);
        }
    }

    #[test]
    fn exponential_family_verdict() {
        let f = exponential_family(vec![2, 4, 8, 16, 32]).unwrap();
        let r = analyze(&f, &[0.4, 0.25, 0.1, 0.05], DivergenceSpec::TV, &Thresholds::default(), &MixingOptions::default())
            .unwrap();
        assert_eq!(r.verdict, Verdict::NoCutoff);
    }

    #[test]
    fn pak_rejects_bad_c() {
        let f = pak_family(vec![4, 5, 6, 7], Arc::new(|_| 1.5)).unwrap();
        let t = crate::cutoff::family_profile(&f, &[0.25], DivergenceSpec::TV, &MixingOptions::default()).unwrap();
        assert!(t.rows.iter().all(|r| r.missing.is_some()));
    }
}
