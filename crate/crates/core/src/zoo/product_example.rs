//! Product of a slow two-state chain `U` and a fast complete-graph chain `V`.
//!
//! `U` refreshes a fair coin, `V` refreshes a uniform point of `g` states, and
//! the continuized product moves `U` with weight `p < ½` and `V` with weight
//! `1 − p`. From any start state, with `e_U = e^{−pt}` and
//! `e_V = e^{−(1−p)t}`:
//!
//! - `d₂(U, t) = e_U` and `d₂(V, t) = √(g − 1) · e_V`;
//! - `1 + d₂²(X, t) = (1 + d₂²(U, t))(1 + d₂²(V, t))`, and KL adds.
//!
//! Since `g` may be astronomically large it enters only through `ln g`.
//! With `L = ln(1 + (g − 1)e_V)`:
//!
//! - `KL_U = ½(1 + e_U) ln(1 + e_U) + ½(1 − e_U) ln(1 − e_U)`;
//! - `KL_V = e^{L − ln g} L + (1 − 1/g)(1 − e_V) ln(1 − e_V)`;
//! - `R∞(X) = ln(1 + e_U) + L`.
//!
//! The L² distance needs `t ≈ ln g / (2(1 − p))` while KL is driven by `U`
//! alone at `t ≈ ln(1/ε) / (2p)`. With `p_n → 0` and `ln g_n ≫ p_n^{-1}` this
//! gives L² cutoff without KL cutoff.
//!
//! Divergences without a product rule are computed on four classes: the
//! density is constant on `{U = 0, 1} × {V = start, V ≠ start}`.

use std::sync::Arc;

use nalgebra::DMatrix;

use crate::bundle::{CurveBundle, SpectralTriple};
use crate::chain::{check_time, FiniteChain, TimeKind};
use crate::curves::{CurveFn, DivergenceCurve, HORIZON_FACTOR};
use crate::divergence::{self, DivergenceSpec};
use crate::error::{Error, Result};
use crate::product::{ProductChain, DEFAULT_DENSE_LIMIT};

fn logaddexp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + (-(a - b).abs()).exp().ln_1p()
}

/// `x ln x` for `x = 1 + d` given `ln(1 + d)`-style arguments; `0 · ln 0 = 0`.
fn xlog(x: f64, lnx: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * lnx
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductExample {
    p: f64,
    ln_g: f64,
}

impl ProductExample {
    pub fn new(p: f64, ln_g: f64) -> Result<Self> {
        if !(p > 0.0 && p < 0.5) {
            return Err(Error::ParameterOutOfRange(format!("p = {p} must lie in (0, 1/2)")));
        }
        if !(ln_g > 0.0 && ln_g.is_finite()) {
            return Err(Error::ParameterOutOfRange(format!("ln g = {ln_g} must be positive and finite")));
        }
        Ok(ProductExample { p, ln_g })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn ln_g(&self) -> f64 {
        self.ln_g
    }

    /// `ln(g − 1)`.
    fn ln_gm1(&self) -> f64 {
        self.ln_g + (-(-self.ln_g).exp()).ln_1p()
    }

    fn e_u(&self, t: f64) -> f64 {
        (-self.p * t).exp()
    }

    fn ln_e_v(&self, t: f64) -> f64 {
        -(1.0 - self.p) * t
    }

    /// `L = ln(1 + (g − 1)e_V)`.
    fn big_l(&self, t: f64) -> f64 {
        logaddexp(0.0, self.ln_gm1() + self.ln_e_v(t))
    }

    pub fn spectral(&self) -> SpectralTriple {
        SpectralTriple::new(self.p, 1.0 - self.p)
    }

    /// Horizon for the curves: the default `64/λ` plus the `ln g / (1 − p)`
    /// the `V` coordinate needs before its L² distance drops below 1.
    pub fn horizon(&self) -> f64 {
        HORIZON_FACTOR / self.p + self.ln_g / (1.0 - self.p)
    }

    pub fn d2_u(&self, t: f64) -> f64 {
        self.e_u(t)
    }

    pub fn d2_v(&self, t: f64) -> f64 {
        (0.5 * self.ln_gm1() + self.ln_e_v(t)).exp()
    }

    pub fn kl_u(&self, t: f64) -> f64 {
        let e = self.e_u(t);
        xlog(0.5 * (1.0 - e), (-e).ln_1p()) + 0.5 * (1.0 + e) * e.ln_1p()
    }

    pub fn kl_v(&self, t: f64) -> f64 {
        let l = self.big_l(t);
        let ev = self.ln_e_v(t).exp();
        let rest = -(-self.ln_g).exp_m1();
        (l - self.ln_g).exp() * l + xlog(rest * (1.0 - ev), (-ev).ln_1p())
    }

    pub fn kl_x(&self, t: f64) -> f64 {
        self.kl_u(t) + self.kl_v(t)
    }

    /// `ln(1 + d₂²(X, t))`.
    pub fn log_one_plus_chi2(&self, t: f64) -> f64 {
        let e = self.e_u(t);
        (e * e).ln_1p() + logaddexp(0.0, self.ln_gm1() + 2.0 * self.ln_e_v(t))
    }

    pub fn d2_x(&self, t: f64) -> f64 {
        let s = self.log_one_plus_chi2(t);
        // √(e^s − 1) without overflowing e^s
        (0.5 * (s + (-(-s).exp()).ln_1p())).exp()
    }

    /// `ln Σ π h^α` for `U` and `V`.
    fn ln_moments(&self, a: f64, t: f64) -> (f64, f64) {
        let e = self.e_u(t);
        let lo = if e == 1.0 { f64::NEG_INFINITY } else { a * (-e).ln_1p() };
        let mu = logaddexp(a * e.ln_1p(), lo) - std::f64::consts::LN_2;
        let ev = self.ln_e_v(t).exp();
        let lo_v = if ev == 1.0 { f64::NEG_INFINITY } else { a * (-ev).ln_1p() };
        let mv = logaddexp(-self.ln_g + a * self.big_l(t), (-(-self.ln_g).exp()).ln_1p() + lo_v);
        (mu, mv)
    }

    pub fn renyi_x(&self, a: f64, t: f64) -> f64 {
        let (mu, mv) = self.ln_moments(a, t);
        (mu + mv) / (a - 1.0)
    }

    pub fn renyi_inf_x(&self, t: f64) -> f64 {
        self.e_u(t).ln_1p() + self.big_l(t)
    }

    /// Four-class law and reference: `(U, V) ∈ {0,1} × {start, rest}`.
    pub fn classes(&self, t: f64) -> Result<([f64; 4], [f64; 4])> {
        let inv_g = (-self.ln_g).exp();
        if inv_g == 0.0 {
            return Err(Error::ParameterOutOfRange(format!(
                "ln g = {} too large for the class representation; use a divergence with a product rule",
                self.ln_g
            )));
        }
        let e = self.e_u(t);
        let ev = self.ln_e_v(t).exp();
        let u = [0.5 * (1.0 + e), 0.5 * (1.0 - e)];
        let v = [(self.big_l(t) - self.ln_g).exp(), -(-self.ln_g).exp_m1() * (1.0 - ev)];
        let vr = [inv_g, -(-self.ln_g).exp_m1()];
        Ok((
            [u[0] * v[0], u[0] * v[1], u[1] * v[0], u[1] * v[1]],
            [0.5 * vr[0], 0.5 * vr[1], 0.5 * vr[0], 0.5 * vr[1]],
        ))
    }

    /// Worst-case divergence of the product chain at time `t`.
    pub fn value(&self, spec: DivergenceSpec, t: f64) -> Result<f64> {
        spec.validate()?;
        check_time(t, TimeKind::Continuized)?;
        Ok(match spec {
            DivergenceSpec::KL => self.kl_x(t),
            DivergenceSpec::ChiSquare => self.log_one_plus_chi2(t).exp_m1(),
            DivergenceSpec::Lp(2.0) => self.d2_x(t),
            DivergenceSpec::Renyi(a) => self.renyi_x(a, t),
            DivergenceSpec::Alpha(a) => divergence::alpha_from_renyi(self.renyi_x(a, t), a),
            DivergenceSpec::RenyiInf => self.renyi_inf_x(t),
            _ => {
                let (mu, nu) = self.classes(t)?;
                divergence::divergence(&mu, &nu, spec)?
            }
        })
    }

    /// `g` as an integer when it is one and the product fits the dense limit.
    pub fn dense_g(&self) -> Result<usize> {
        let g = self.ln_g.exp().round();
        if !(g >= 2.0) || (g.ln() - self.ln_g).abs() > 1e-12 || 2.0 * g > DEFAULT_DENSE_LIMIT as f64 {
            return Err(Error::ParameterOutOfRange(format!(
                "ln g = {} does not give an integer g with 2g ≤ {DEFAULT_DENSE_LIMIT}",
                self.ln_g
            )));
        }
        Ok(g as usize)
    }

    /// Materialized product chain on `2g` states; state 0 is the start state.
    pub fn dense_chain(&self) -> Result<FiniteChain> {
        let g = self.dense_g()?;
        let u = FiniteChain::with_known_stationary(
            vec!["0".into(), "1".into()],
            DMatrix::from_element(2, 2, 0.5),
            TimeKind::Continuized,
            vec![0.5; 2],
        )?;
        let v = FiniteChain::with_known_stationary(
            (0..g).map(|i| i.to_string()).collect(),
            DMatrix::from_element(g, g, 1.0 / g as f64),
            TimeKind::Continuized,
            vec![1.0 / g as f64; g],
        )?;
        ProductChain::new(vec![u, v], vec![self.p, 1.0 - self.p])?.materialize()
    }

    /// Largest gap between closed-form and dense worst-case curves.
    pub fn dense_agreement(&self, specs: &[DivergenceSpec], ts: &[f64]) -> Result<f64> {
        let chain = self.dense_chain()?;
        let mut worst = 0.0f64;
        for &t in ts {
            let pt = chain.semigroup_at(t)?;
            for &spec in specs {
                let d = divergence::worst_case_of(&pt, chain.stationary(), spec)?;
                worst = worst.max((self.value(spec, t)? - d).abs());
            }
        }
        Ok(worst)
    }
}

pub struct ProductExampleBundle {
    pub example: ProductExample,
}

impl CurveBundle for ProductExampleBundle {
    fn label(&self) -> String {
        format!("product_example(p={}, ln g={})", self.example.p, self.example.ln_g)
    }

    fn time_kind(&self) -> TimeKind {
        TimeKind::Continuized
    }

    fn spectral(&self) -> Result<SpectralTriple> {
        Ok(self.example.spectral())
    }

    fn curve(&self, spec: DivergenceSpec) -> Result<DivergenceCurve> {
        spec.validate()?;
        let ex = self.example;
        let f: CurveFn = Arc::new(move |t| ex.value(spec, t));
        Ok(DivergenceCurve::closed_form(format!("{} {spec}", self.label()), TimeKind::Continuized, ex.horizon(), f))
    }
}

pub fn product_example(p: f64, ln_g: f64) -> Result<ProductExampleBundle> {
    Ok(ProductExampleBundle { example: ProductExample::new(p, ln_g)? })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::{mixing_time, MixingOptions};

    #[test]
    fn parameter_range() {
        for (p, lg) in [(0.0, 1.0), (0.5, 1.0), (0.3, 0.0), (0.3, f64::INFINITY), (f64::NAN, 1.0)] {
            assert!(matches!(ProductExample::new(p, lg), Err(Error::ParameterOutOfRange(_))));
        }
    }

    #[test]
    fn quoted_values() {
        let ex = ProductExample::new(0.3, 4f64.ln()).unwrap();
        assert!((ex.d2_u(2.0) - 0.548_811_636_094_026_4).abs() < 1e-15);
        assert!((ex.d2_v(1.0) - 3f64.sqrt() * (-0.7f64).exp()).abs() < 1e-14);
        assert!((ex.kl_v(0.0) - 4f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn dense_agreement_g64() {
        let ex = ProductExample::new(0.3, 64f64.ln()).unwrap();
        let specs = [
            DivergenceSpec::KL,
            DivergenceSpec::Lp(2.0),
            DivergenceSpec::ChiSquare,
            DivergenceSpec::Renyi(2.0),
            DivergenceSpec::Alpha(1.5),
            DivergenceSpec::RenyiInf,
            DivergenceSpec::TV,
            DivergenceSpec::Hellinger2,
            DivergenceSpec::Separation,
        ];
        let d = ex.dense_agreement(&specs, &[0.0, 0.5, 2.0, 7.0, 20.0]).unwrap();
        assert!(d < 1e-8, "{d}");
    }

    #[test]
    fn huge_g_stays_finite() {
        let ex = ProductExample::new(0.1, 5000.0).unwrap();
        let t = 5000.0 / 0.9 + 10.0;
        assert!(ex.kl_x(t).is_finite() && ex.d2_x(t).is_finite() && ex.renyi_x(2.0, t).is_finite());
        assert!(ex.value(DivergenceSpec::TV, 1.0).is_err());
    }

    #[test]
    fn l2_mixing_time_follows_log_g() {
        for lg in [50.0, 100.0, 400.0] {
            let b = product_example(0.2, lg).unwrap();
            let c = b.curve(DivergenceSpec::Lp(2.0)).unwrap();
            let m = mixing_time(&c, 0.5, &MixingOptions::default()).unwrap();
            let formula = lg / (2.0 * 0.8);
            assert!((m.t / formula - 1.0).abs() < 0.05, "ln g = {lg}: {} vs {formula}", m.t);
        }
    }
}
