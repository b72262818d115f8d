//! Worst-case divergence curves `t ↦ max_x D(δ_x P_t ‖ π)` and mixing times
//! `t(ε) = inf{t : g(t) ≤ ε}`.
//!
//! Curves are evaluated lazily and memoized per time point. Mixing times in
//! continuous time bracket the crossing by doubling, rescan the bracket on a
//! coarse grid to find the leftmost sampled crossing, then bisect. Discrete
//! time does the same on the integers.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain::{check_time, FiniteChain, TimeKind};
use crate::divergence::{self, DivergenceSpec};
use crate::error::{Error, Result};
use crate::spectral;

pub type CurveFn = Arc<dyn Fn(f64) -> Result<f64> + Send + Sync>;

/// Default horizon factor: matrix-backed curves stop at `64/λ`.
pub const HORIZON_FACTOR: f64 = 64.0;

#[derive(Clone)]
pub enum CurveSource {
    Matrix { chain: Arc<FiniteChain>, spec: DivergenceSpec },
    ClosedForm { name: String, f: CurveFn },
}

impl fmt::Debug for CurveSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurveSource::Matrix { chain, spec } => write!(f, "Matrix({} states, {spec})", chain.n()),
            CurveSource::ClosedForm { name, .. } => write!(f, "ClosedForm({name})"),
        }
    }
}

pub struct DivergenceCurve {
    source: CurveSource,
    time_kind: TimeKind,
    horizon: f64,
    memo: Mutex<HashMap<u64, f64>>,
}

impl fmt::Debug for DivergenceCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DivergenceCurve")
            .field("source", &self.source)
            .field("time_kind", &self.time_kind)
            .field("horizon", &self.horizon)
            .finish()
    }
}

/// `64/λ`, using `min(λ, λ′)` in discrete time.
pub fn default_horizon(chain: &FiniteChain) -> Result<f64> {
    let s = spectral::spectral_summary(chain)?;
    let rate = match chain.time_kind() {
        TimeKind::Continuized => s.lambda,
        TimeKind::Discrete => s.lambda.min(s.lambda_prime),
    };
    if !(rate > 0.0) {
        return Err(Error::InvalidParameter("chain has zero spectral gap".into()));
    }
    Ok(HORIZON_FACTOR / rate)
}

impl DivergenceCurve {
    pub fn matrix(chain: Arc<FiniteChain>, spec: DivergenceSpec) -> Result<Self> {
        spec.validate()?;
        let horizon = default_horizon(&chain)?;
        Ok(Self::from_source(CurveSource::Matrix { chain: chain.clone(), spec }, chain.time_kind(), horizon))
    }

    pub fn closed_form(name: impl Into<String>, time_kind: TimeKind, horizon: f64, f: CurveFn) -> Self {
        Self::from_source(CurveSource::ClosedForm { name: name.into(), f }, time_kind, horizon)
    }

    fn from_source(source: CurveSource, time_kind: TimeKind, horizon: f64) -> Self {
        DivergenceCurve { source, time_kind, horizon, memo: Mutex::new(HashMap::new()) }
    }

    pub fn with_horizon(mut self, horizon: f64) -> Self {
        self.horizon = horizon;
        self
    }

    pub fn source(&self) -> &CurveSource {
        &self.source
    }

    pub fn time_kind(&self) -> TimeKind {
        self.time_kind
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        check_time(t, self.time_kind)?;
        let key = t.to_bits();
        if let Some(v) = self.memo.lock().unwrap().get(&key) {
            return Ok(*v);
        }
        let v = match &self.source {
            CurveSource::Matrix { chain, spec } => divergence::worst_case(chain, t, *spec)?,
            CurveSource::ClosedForm { f, .. } => f(t)?,
        };
        self.memo.lock().unwrap().insert(key, v);
        Ok(v)
    }

    /// Memoized `(t, value)` pairs in time order.
    pub fn cached_samples(&self) -> Vec<(f64, f64)> {
        let mut v: Vec<(f64, f64)> =
            self.memo.lock().unwrap().iter().map(|(k, v)| (f64::from_bits(*k), *v)).collect();
        v.sort_by(|a, b| a.0.total_cmp(&b.0));
        v
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurveSamples {
    pub points: Vec<(f64, f64)>,
    /// Indices `i` where `g(t_{i+1}) > g(t_i)` beyond rounding.
    pub monotonicity_violations: Vec<usize>,
}

impl CurveSamples {
    pub fn monotone(&self) -> bool {
        self.monotonicity_violations.is_empty()
    }
}

/// Evaluate a curve on an ascending grid and audit monotonicity.
pub fn sample_curve(curve: &DivergenceCurve, grid: &[f64]) -> Result<CurveSamples> {
    if grid.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::InvalidParameter("time grid must be ascending".into()));
    }
    let values: Vec<f64> = grid.par_iter().map(|&t| curve.eval(t)).collect::<Result<_>>()?;
    let points: Vec<(f64, f64)> = grid.iter().copied().zip(values).collect();
    let monotonicity_violations = (0..points.len().saturating_sub(1))
        .filter(|&i| {
            let (a, b) = (points[i].1, points[i + 1].1);
            a.is_finite() && b > a + 1e-10 * a.abs().max(1.0)
        })
        .collect();
    Ok(CurveSamples { points, monotonicity_violations })
}

/// Uniform grid `0, dt, …, tmax` (inclusive of `tmax` up to rounding).
pub fn uniform_grid(tmax: f64, dt: f64) -> Result<Vec<f64>> {
    if !(dt > 0.0) || !(tmax >= 0.0) {
        return Err(Error::InvalidParameter(format!("bad grid tmax = {tmax}, dt = {dt}")));
    }
    let steps = (tmax / dt + 1e-9).floor() as usize;
    // i / (1/dt) is exact for steps like 0.1, where i·dt drifts (39.900000000000006)
    let inv = dt.recip();
    if (inv - inv.round()).abs() <= 1e-12 * inv {
        let inv = inv.round();
        return Ok((0..=steps).map(|i| i as f64 / inv).collect());
    }
    Ok((0..=steps).map(|i| i as f64 * dt).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MixingMethod {
    Bisection,
    IntegerScan,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixingTimeResult {
    pub epsilon: f64,
    pub t: f64,
    pub t_lo: f64,
    pub t_hi: f64,
    pub method: MixingMethod,
}

#[derive(Debug, Clone, Copy)]
pub struct MixingOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Points of the coarse rescan used to locate the leftmost crossing.
    pub scan_points: usize,
}

impl Default for MixingOptions {
    fn default() -> Self {
        MixingOptions { rel_tol: 1e-6, abs_tol: 1e-9, scan_points: 16 }
    }
}

pub fn mixing_time(curve: &DivergenceCurve, eps: f64, opts: &MixingOptions) -> Result<MixingTimeResult> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!("ε = {eps} must be positive")));
    }
    match curve.time_kind() {
        TimeKind::Continuized => mixing_continuous(curve, eps, opts),
        TimeKind::Discrete => mixing_discrete(curve, eps, opts),
    }
}

fn mixing_continuous(curve: &DivergenceCurve, eps: f64, opts: &MixingOptions) -> Result<MixingTimeResult> {
    let done = |t, lo, hi| MixingTimeResult { epsilon: eps, t, t_lo: lo, t_hi: hi, method: MixingMethod::Bisection };
    if curve.eval(0.0)? <= eps {
        return Ok(done(0.0, 0.0, 0.0));
    }
    let horizon = curve.horizon();
    let mut hi = (horizon / 4096.0).max(1e-9);
    loop {
        if curve.eval(hi)? <= eps {
            break;
        }
        if hi >= horizon {
            return Err(Error::HorizonExceeded { epsilon: eps, horizon, last: curve.eval(hi)? });
        }
        hi = (hi * 2.0).min(horizon);
    }
    // leftmost sampled crossing on [0, hi]
    let k = opts.scan_points.max(2);
    let mut lo = 0.0;
    for i in 1..=k {
        let t = hi * i as f64 / k as f64;
        if curve.eval(t)? <= eps {
            hi = t;
            break;
        }
        lo = t;
    }
    while hi - lo > (opts.rel_tol * hi).max(opts.abs_tol) {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if curve.eval(mid)? <= eps {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(done(hi, lo, hi))
}

fn mixing_discrete(curve: &DivergenceCurve, eps: f64, opts: &MixingOptions) -> Result<MixingTimeResult> {
    let done =
        |t: f64, lo, hi| MixingTimeResult { epsilon: eps, t, t_lo: lo, t_hi: hi, method: MixingMethod::IntegerScan };
    if curve.eval(0.0)? <= eps {
        return Ok(done(0.0, 0.0, 0.0));
    }
    let horizon = curve.horizon().ceil().max(1.0);
    let mut hi = 1.0f64;
    loop {
        if curve.eval(hi)? <= eps {
            break;
        }
        if hi >= horizon {
            return Err(Error::HorizonExceeded { epsilon: eps, horizon, last: curve.eval(hi)? });
        }
        hi = (hi * 2.0).min(horizon);
    }
    let k = opts.scan_points.max(2) as f64;
    let mut lo = 0.0;
    let step = (hi / k).ceil().max(1.0);
    let mut t = step;
    while t < hi {
        if curve.eval(t)? <= eps {
            hi = t;
            break;
        }
        lo = t;
        t += step;
    }
    while hi - lo > 1.0 {
        let mid = ((lo + hi) / 2.0).floor();
        if curve.eval(mid)? <= eps {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(done(hi, lo, hi))
}

/// Bisection tolerance actually achieved.
pub fn bracket_width(r: &MixingTimeResult) -> f64 {
    r.t_hi - r.t_lo
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct AlphaRenyiIdentity {
    pub alpha: f64,
    pub eps_alpha: f64,
    pub eps_renyi: f64,
    pub t_alpha: MixingTimeResult,
    pub t_renyi: MixingTimeResult,
    pub holds: bool,
}

/// `t_{f_α}(ε′) = t_{R_α}(ln(1 + (α−1)ε′)/(α−1))`, both sides measured.
pub fn alpha_renyi_mixing_identity(
    chain: &Arc<FiniteChain>,
    alpha: f64,
    eps: f64,
    opts: &MixingOptions,
) -> Result<AlphaRenyiIdentity> {
    if !(alpha > 1.0 && alpha.is_finite()) {
        return Err(Error::InvalidParameter(format!("identity needs α > 1, got {alpha}")));
    }
    let ca = DivergenceCurve::matrix(chain.clone(), DivergenceSpec::alpha(alpha)?)?;
    let cr = DivergenceCurve::matrix(chain.clone(), DivergenceSpec::renyi(alpha)?)?;
    let eps_renyi = divergence::renyi_from_alpha(eps, alpha);
    let t_alpha = mixing_time(&ca, eps, opts)?;
    let t_renyi = mixing_time(&cr, eps_renyi, opts)?;
    let tol = bracket_width(&t_alpha) + bracket_width(&t_renyi) + 1e-12;
    let holds = (t_alpha.t - t_renyi.t).abs() <= tol;
    Ok(AlphaRenyiIdentity { alpha, eps_alpha: eps, eps_renyi, t_alpha, t_renyi, holds })
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct HalvingComparison {
    pub alpha: f64,
    pub eps: f64,
    pub t_renyi: f64,
    pub t_renyi_sqrt: f64,
    pub renyi_ok: bool,
    pub t_lp: f64,
    pub t_lp_sqrt: f64,
    pub lp_ok: bool,
}

impl HalvingComparison {
    pub fn holds(&self) -> bool {
        self.renyi_ok && self.lp_ok
    }
}

/// `t_{R_α}(ε) ≤ 2 t_{R_√α}(ε)` and `t_s(2δ^{1+1/√s}) ≤ 2 t_{√s}(δ)` with `s = α`, `δ = ε`.
pub fn renyi_halving_comparison(
    chain: &Arc<FiniteChain>,
    alpha: f64,
    eps: f64,
    opts: &MixingOptions,
) -> Result<HalvingComparison> {
    if !(alpha > 1.0 && alpha.is_finite()) {
        return Err(Error::InvalidParameter(format!("comparison needs α > 1, got {alpha}")));
    }
    let root = alpha.sqrt();
    let slack = |a: &MixingTimeResult, b: &MixingTimeResult| bracket_width(a) + 2.0 * bracket_width(b) + 1e-12;

    let r_a = mixing_time(&DivergenceCurve::matrix(chain.clone(), DivergenceSpec::renyi(alpha)?)?, eps, opts)?;
    let r_s = mixing_time(&DivergenceCurve::matrix(chain.clone(), DivergenceSpec::renyi(root)?)?, eps, opts)?;
    let renyi_ok = r_a.t <= 2.0 * r_s.t + slack(&r_a, &r_s);

    let eps_lhs = 2.0 * eps.powf(1.0 + 1.0 / root);
    let l_a = mixing_time(&DivergenceCurve::matrix(chain.clone(), DivergenceSpec::lp(alpha)?)?, eps_lhs, opts)?;
    let l_s = mixing_time(&DivergenceCurve::matrix(chain.clone(), DivergenceSpec::lp(root)?)?, eps, opts)?;
    let lp_ok = l_a.t <= 2.0 * l_s.t + slack(&l_a, &l_s);

    Ok(HalvingComparison {
        alpha,
        eps,
        t_renyi: r_a.t,
        t_renyi_sqrt: r_s.t,
        renyi_ok,
        t_lp: l_a.t,
        t_lp_sqrt: l_s.t,
        lp_ok,
    })
}
