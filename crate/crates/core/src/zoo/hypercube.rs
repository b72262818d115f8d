//! Lazy random walk on the hypercube `{0,1}^n`: pick a coordinate uniformly
//! and refresh it with a fair coin. This is the product of `n` copies of the
//! two-state chain `[[½, ½], [½, ½]]` with weights `1/n`, so `λ_n = 1/n`.
//!
//! From a corner the law of `X_t` depends only on the Hamming weight, and the
//! density against π is constant on weight classes. All curves therefore run
//! on `n + 1` classes:
//!
//! - continuized: each coordinate has been refreshed by time t with
//!   probability `1 − e^{−t/n}`, so the weight is `Binomial(n, q)` with
//!   `q = (1 − e^{−t/n})/2`, compared against `Binomial(n, ½)`;
//! - discrete: the weight performs the birth–death chain
//!   `k → k+1` w.p. `(n−k)/(2n)`, `k → k−1` w.p. `k/(2n)`, propagated from 0.
//!
//! In continuous time the L², χ², Rényi, α and KL curves also tensorize:
//! with `e = e^{−t/n}` one coordinate has law `(½(1+e), ½(1−e))`, which gives
//! `d₂² = (1 + e²)ⁿ − 1` and `R_α = n/(α−1) · ln(½(1+e)^α + ½(1−e)^α)`.

use std::sync::{Arc, Mutex};

use nalgebra::DMatrix;

use crate::bundle::{LumpedBundle, LumpedLaw, SpectralTriple};
use crate::chain::{check_time, FiniteChain, TimeKind};
use crate::curves::{CurveFn, DivergenceCurve, HORIZON_FACTOR};
use crate::divergence::{self, DivergenceSpec};
use crate::error::{Error, Result};
use crate::product::ProductChain;
use crate::spectral;

use crate::bundle::CurveBundle;

/// Dense materialization limit, in coordinates (`2^12 = 4096` states).
pub const DENSE_MAX_DIM: usize = 12;

/// Steps between stored laws in the discrete propagation cache.
const CHECKPOINT_STRIDE: u64 = 32;

fn check_dim(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter("hypercube dimension must be ≥ 1".into()));
    }
    Ok(())
}

/// `Binomial(n, q)` pmf by the ratio recurrence outward from the mode,
/// normalized at the end; relative error per entry is about `n·ε`.
pub fn binomial_pmf(n: usize, q: f64) -> Vec<f64> {
    let mut v = vec![0.0; n + 1];
    if q <= 0.0 {
        v[0] = 1.0;
        return v;
    }
    if q >= 1.0 {
        v[n] = 1.0;
        return v;
    }
    let odds = q / (1.0 - q);
    let mode = (((n + 1) as f64 * q).floor() as usize).min(n);
    v[mode] = 1.0;
    for k in mode..n {
        v[k + 1] = v[k] * (n - k) as f64 / (k + 1) as f64 * odds;
    }
    for k in (1..=mode).rev() {
        v[k - 1] = v[k] * k as f64 / (n - k + 1) as f64 / odds;
    }
    let s: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= s);
    v
}

/// `Binomial(n, ½)`: the stationary law of the Hamming weight.
pub fn weight_stationary(n: usize) -> Vec<f64> {
    binomial_pmf(n, 0.5)
}

pub fn two_state(time_kind: TimeKind) -> FiniteChain {
    let k = DMatrix::from_element(2, 2, 0.5);
    FiniteChain::with_known_stationary(vec!["0".into(), "1".into()], k, time_kind, vec![0.5, 0.5])
        .expect("two-state refresh chain is valid")
}

/// The walk as a product of `n` two-state chains with weights `1/n` (n ≥ 2).
pub fn hypercube_product(n: usize, time_kind: TimeKind) -> Result<ProductChain> {
    check_dim(n)?;
    if n < 2 {
        return Err(Error::InvalidParameter("a product needs n ≥ 2; use two_state for n = 1".into()));
    }
    ProductChain::new(vec![two_state(time_kind); n], vec![1.0 / n as f64; n])
}

/// Dense chain on `2^n` states for `n ≤ 12`. State index bits are the coordinates.
pub fn hypercube_chain(n: usize, time_kind: TimeKind) -> Result<FiniteChain> {
    check_dim(n)?;
    if n > DENSE_MAX_DIM {
        return Err(Error::StateExplosion { states: 1usize << n.min(63), limit: 1 << DENSE_MAX_DIM });
    }
    if n == 1 {
        return Ok(two_state(time_kind));
    }
    hypercube_product(n, time_kind)?.materialize()
}

/// Spectral gap read off the product structure; no dense matrix is formed.
pub fn hypercube_gap(n: usize) -> Result<f64> {
    check_dim(n)?;
    if n == 1 {
        return Ok(spectral::spectral_gap(&two_state(TimeKind::Continuized)));
    }
    Ok(hypercube_product(n, TimeKind::Continuized)?.spectral_gap())
}

/// The `(n+1)`-state birth–death chain of the Hamming weight.
pub fn hypercube_lumped_chain(n: usize, time_kind: TimeKind) -> Result<FiniteChain> {
    check_dim(n)?;
    let nf = n as f64;
    let k = DMatrix::from_fn(n + 1, n + 1, |i, j| {
        if j + 1 == i {
            i as f64 / (2.0 * nf)
        } else if j == i + 1 {
            (n - i) as f64 / (2.0 * nf)
        } else if i == j {
            0.5
        } else {
            0.0
        }
    });
    let states = (0..=n).map(|k| k.to_string()).collect();
    FiniteChain::with_known_stationary(states, k, time_kind, weight_stationary(n))
}

/// Spectral triple of the walk: eigenvalues `1 − j/n`, all non-negative.
pub fn hypercube_spectral(n: usize) -> SpectralTriple {
    let lambda = 1.0 / n as f64;
    SpectralTriple::new(lambda, 1.0 - lambda)
}

/// Continuized weight law `Binomial(n, (1 − e^{−t/n})/2)`.
pub struct BinomialLaw {
    n: usize,
    reference: Vec<f64>,
}

impl BinomialLaw {
    pub fn new(n: usize) -> Result<Self> {
        check_dim(n)?;
        Ok(BinomialLaw { n, reference: weight_stationary(n) })
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

impl LumpedLaw for BinomialLaw {
    fn reference(&self) -> &[f64] {
        &self.reference
    }

    fn law(&self, t: f64) -> Result<Vec<f64>> {
        check_time(t, TimeKind::Continuized)?;
        let q = -(-t / self.n as f64).exp_m1() / 2.0;
        Ok(binomial_pmf(self.n, q))
    }
}

/// Discrete weight law, propagated from weight 0 with cached checkpoints.
pub struct LazyWalkLaw {
    n: usize,
    reference: Vec<f64>,
    checkpoints: Mutex<Vec<Vec<f64>>>,
}

impl LazyWalkLaw {
    pub fn new(n: usize) -> Result<Self> {
        check_dim(n)?;
        let mut start = vec![0.0; n + 1];
        start[0] = 1.0;
        Ok(LazyWalkLaw { n, reference: weight_stationary(n), checkpoints: Mutex::new(vec![start]) })
    }

    fn step(&self, v: &[f64]) -> Vec<f64> {
        let n = self.n;
        let nf = 2.0 * n as f64;
        (0..=n)
            .map(|k| {
                let mut s = 0.5 * v[k];
                if k > 0 {
                    s += v[k - 1] * (n - k + 1) as f64 / nf;
                }
                if k < n {
                    s += v[k + 1] * (k + 1) as f64 / nf;
                }
                s
            })
            .collect()
    }
}

impl LumpedLaw for LazyWalkLaw {
    fn reference(&self) -> &[f64] {
        &self.reference
    }

    fn law(&self, t: f64) -> Result<Vec<f64>> {
        check_time(t, TimeKind::Discrete)?;
        let t = t as u64;
        let idx = (t / CHECKPOINT_STRIDE) as usize;
        let mut v = {
            let mut cp = self.checkpoints.lock().expect("checkpoint cache poisoned");
            while cp.len() <= idx {
                let mut v = cp.last().unwrap().clone();
                for _ in 0..CHECKPOINT_STRIDE {
                    v = self.step(&v);
                }
                cp.push(v);
            }
            cp[idx].clone()
        };
        for _ in 0..t % CHECKPOINT_STRIDE {
            v = self.step(&v);
        }
        Ok(v)
    }
}

/// Worst-case curve from the product formula, for the kinds that tensorize.
fn tensorized(n: usize, spec: DivergenceSpec, t: f64) -> Option<f64> {
    let nf = n as f64;
    let e = (-t / nf).exp();
    // one coordinate: law (½(1+e), ½(1−e)) against (½, ½)
    let ln_moment = |a: f64| {
        let (hi, lo) = ((a * e.ln_1p()).exp(), (a * (-e).ln_1p()).exp());
        (0.5 * (hi + lo)).ln()
    };
    let kl_one = || {
        let lo = if e == 1.0 { 0.0 } else { 0.5 * (1.0 - e) * (-e).ln_1p() };
        lo + 0.5 * (1.0 + e) * e.ln_1p()
    };
    Some(match spec {
        DivergenceSpec::ChiSquare => (nf * (e * e).ln_1p()).exp_m1(),
        DivergenceSpec::Lp(2.0) => (nf * (e * e).ln_1p()).exp_m1().sqrt(),
        DivergenceSpec::KL => nf * kl_one(),
        DivergenceSpec::Renyi(a) => nf * ln_moment(a) / (a - 1.0),
        DivergenceSpec::Alpha(a) => divergence::alpha_from_renyi(nf * ln_moment(a) / (a - 1.0), a),
        DivergenceSpec::RenyiInf => nf * e.ln_1p(),
        _ => return None,
    })
}

/// Continuized member: tensorized formulas where available, binomial law otherwise.
pub struct HypercubeBundle {
    law: Arc<BinomialLaw>,
}

impl HypercubeBundle {
    pub fn new(n: usize) -> Result<Self> {
        Ok(HypercubeBundle { law: Arc::new(BinomialLaw::new(n)?) })
    }

    pub fn n(&self) -> usize {
        self.law.n()
    }

    /// Value of the binomial-law curve, bypassing the tensorized formulas.
    pub fn lumped_value(&self, spec: DivergenceSpec, t: f64) -> Result<f64> {
        divergence::divergence(&self.law.law(t)?, self.law.reference(), spec)
    }
}

impl CurveBundle for HypercubeBundle {
    fn label(&self) -> String {
        format!("hypercube(n={})", self.n())
    }

    fn time_kind(&self) -> TimeKind {
        TimeKind::Continuized
    }

    fn spectral(&self) -> Result<SpectralTriple> {
        Ok(hypercube_spectral(self.n()))
    }

    fn curve(&self, spec: DivergenceSpec) -> Result<DivergenceCurve> {
        spec.validate()?;
        let law = self.law.clone();
        let n = self.n();
        let f: CurveFn = Arc::new(move |t| {
            check_time(t, TimeKind::Continuized)?;
            match tensorized(n, spec, t) {
                Some(v) => Ok(v),
                None => divergence::divergence(&law.law(t)?, law.reference(), spec),
            }
        });
        let horizon = HORIZON_FACTOR * n as f64;
        Ok(DivergenceCurve::closed_form(format!("{} {spec}", self.label()), TimeKind::Continuized, horizon, f))
    }
}

pub fn hypercube(n: usize) -> Result<HypercubeBundle> {
    HypercubeBundle::new(n)
}

/// Discrete-time member on the lumped walk.
pub fn hypercube_discrete(n: usize) -> Result<LumpedBundle<LazyWalkLaw>> {
    let spectral = hypercube_spectral(n.max(1));
    Ok(LumpedBundle {
        law: Arc::new(LazyWalkLaw::new(n)?),
        label: format!("hypercube-discrete(n={n})"),
        time_kind: TimeKind::Discrete,
        horizon: (HORIZON_FACTOR / spectral.lambda.min(spectral.lambda_prime)).ceil(),
        spectral,
    })
}

/// Hamming weight of each dense state index, for mapping dense rows to classes.
pub fn weight_of_state(index: usize) -> usize {
    index.count_ones() as usize
}
