//! Divergences between finite distributions and between `δ_x P_t` and π.
//!
//! f-divergences use `D_f(ν₁‖ν₂) = Σ ν₂ f(ν₁/ν₂)` with the conventions
//! `0·f(0/0) = 0` and `0·f(a/0) = a·f*(0)`, where `f*(0) = lim f(u)/u`.
//! `+∞` is an ordinary return value.
//!
//! | kind | f(t) | f(0) | f*(0) |
//! |------|------|------|-------|
//! | TV | ½\|t−1\| | ½ | ½ |
//! | KL | t ln t − t + 1 | 1 | ∞ |
//! | χ^p | \|t−1\|^p | 1 | ∞ / 1 / 0 |
//! | α | (t^α − α(t−1) − 1)/(α−1) | 1 | ∞ (α>1), α/(1−α) (α<1) |
//! | Hellinger² | (√t − 1)² | 1 | 1 |
//! | JS | t ln t − (t+1) ln((t+1)/2) | ln 2 | ln 2 |
//! | Le Cam | (t−1)²/(t+1) | 1 | 1 |
//!
//! Rényi divergences come from the α-divergence through
//! `R_α = ln(1 + (α−1) D_α)/(α−1)`; both are evaluated from
//! `ln Σ ν₁^α ν₂^{1−α}` accumulated with log-sum-exp.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::chain::FiniteChain;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DivergenceSpec {
    TV,
    KL,
    ChiSquare,
    ChiP(f64),
    Alpha(f64),
    Renyi(f64),
    RenyiInf,
    Hellinger2,
    JensenShannon,
    LeCam,
    Bhattacharyya,
    /// `p = f64::INFINITY` is the sup distance.
    Lp(f64),
    Separation,
    ReverseRenyiInf,
}

impl DivergenceSpec {
    pub fn chi_p(p: f64) -> Result<Self> {
        Self::ChiP(p).validated()
    }
    pub fn alpha(a: f64) -> Result<Self> {
        Self::Alpha(a).validated()
    }
    pub fn renyi(a: f64) -> Result<Self> {
        Self::Renyi(a).validated()
    }
    pub fn lp(p: f64) -> Result<Self> {
        Self::Lp(p).validated()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        match *self {
            Self::ChiP(p) if !(p > 0.0 && p.is_finite()) => bad(format!("chi^p needs p > 0, got {p}")),
            Self::Alpha(a) | Self::Renyi(a) if !(a > 0.0 && a.is_finite()) || a == 1.0 => {
                bad(format!("order α must lie in (0,1)∪(1,∞), got {a}; use kl for α = 1"))
            }
            Self::Lp(p) if !(p >= 1.0) => bad(format!("L^p needs p ≥ 1, got {p}")),
            _ => Ok(()),
        }
    }

    pub fn validated(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }

    /// Whether this kind is an f-divergence with a finite-valued convex f.
    pub fn is_f_divergence(&self) -> bool {
        matches!(
            self,
            Self::TV
                | Self::KL
                | Self::ChiSquare
                | Self::ChiP(_)
                | Self::Alpha(_)
                | Self::Hellinger2
                | Self::JensenShannon
                | Self::LeCam
        )
    }

    /// `(f(0), f*(0))` for f-divergence kinds.
    pub fn f0_fstar0(&self) -> Option<(f64, f64)> {
        let inf = f64::INFINITY;
        Some(match *self {
            Self::TV => (0.5, 0.5),
            Self::KL | Self::ChiSquare => (1.0, inf),
            Self::ChiP(p) => (1.0, if p > 1.0 { inf } else if p == 1.0 { 1.0 } else { 0.0 }),
            Self::Alpha(a) => (1.0, if a > 1.0 { inf } else { a / (1.0 - a) }),
            Self::Hellinger2 | Self::LeCam => (1.0, 1.0),
            Self::JensenShannon => (std::f64::consts::LN_2, std::f64::consts::LN_2),
            _ => return None,
        })
    }

    /// The generator `f(t)` for f-divergence kinds.
    pub fn f(&self, t: f64) -> Option<f64> {
        Some(match *self {
            Self::TV => 0.5 * (t - 1.0).abs(),
            Self::KL => xlogx(t) - t + 1.0,
            Self::ChiSquare => (t - 1.0) * (t - 1.0),
            Self::ChiP(p) => (t - 1.0).abs().powf(p),
            Self::Alpha(a) => f_alpha(a, t),
            Self::Hellinger2 => (t.sqrt() - 1.0).powi(2),
            Self::JensenShannon => xlogx(t) - (t + 1.0) * ((t + 1.0) / 2.0).ln(),
            Self::LeCam => (t - 1.0) * (t - 1.0) / (t + 1.0),
            _ => return None,
        })
    }

    /// Rényi order for the Rényi family (`KL` is order 1).
    pub fn renyi_order(&self) -> Option<f64> {
        match *self {
            Self::KL => Some(1.0),
            Self::Renyi(a) => Some(a),
            Self::RenyiInf => Some(f64::INFINITY),
            _ => None,
        }
    }
}

fn xlogx(t: f64) -> f64 {
    if t == 0.0 {
        0.0
    } else {
        t * t.ln()
    }
}

/// `f_α(t) = (t^α − α(t−1) − 1)/(α−1)`.
pub fn f_alpha(a: f64, t: f64) -> f64 {
    if t == 0.0 {
        return 1.0;
    }
    let u = t.ln();
    (((a * u).exp_m1()) - a * (t - 1.0)) / (a - 1.0)
}

fn fmt_num(v: f64) -> String {
    if v.is_infinite() {
        "inf".into()
    } else {
        format!("{v}")
    }
}

impl fmt::Display for DivergenceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::TV => write!(f, "tv"),
            Self::KL => write!(f, "kl"),
            Self::ChiSquare => write!(f, "chi2"),
            Self::ChiP(p) => write!(f, "chip:{}", fmt_num(p)),
            Self::Alpha(a) => write!(f, "alpha:{}", fmt_num(a)),
            Self::Renyi(a) => write!(f, "renyi:{}", fmt_num(a)),
            Self::RenyiInf => write!(f, "rinf"),
            Self::Hellinger2 => write!(f, "hell2"),
            Self::JensenShannon => write!(f, "js"),
            Self::LeCam => write!(f, "lecam"),
            Self::Bhattacharyya => write!(f, "bhatt"),
            Self::Lp(p) => write!(f, "lp:{}", fmt_num(p)),
            Self::Separation => write!(f, "sep"),
            Self::ReverseRenyiInf => write!(f, "rrinf"),
        }
    }
}

impl FromStr for DivergenceSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h.to_string(), Some(a.to_string())),
            None => (s.clone(), None),
        };
        let num = |a: &Option<String>| -> Result<f64> {
            let a = a.as_deref().ok_or_else(|| Error::Parse(format!("'{s}' needs a parameter")))?;
            if a == "inf" {
                return Ok(f64::INFINITY);
            }
            a.parse::<f64>().map_err(|e| Error::Parse(format!("bad parameter in '{s}': {e}")))
        };
        let no_arg = |spec: DivergenceSpec| -> Result<DivergenceSpec> {
            if arg.is_some() {
                Err(Error::Parse(format!("'{head}' takes no parameter")))
            } else {
                Ok(spec)
            }
        };
        let spec = match head.as_str() {
            "tv" => no_arg(Self::TV)?,
            "kl" => no_arg(Self::KL)?,
            "chi2" => no_arg(Self::ChiSquare)?,
            "chip" => Self::ChiP(num(&arg)?),
            "alpha" => Self::Alpha(num(&arg)?),
            "renyi" => {
                let a = num(&arg)?;
                if a.is_infinite() {
                    Self::RenyiInf
                } else {
                    Self::Renyi(a)
                }
            }
            "rinf" => no_arg(Self::RenyiInf)?,
            "hell2" => no_arg(Self::Hellinger2)?,
            "js" => no_arg(Self::JensenShannon)?,
            "lecam" => no_arg(Self::LeCam)?,
            "bhatt" => no_arg(Self::Bhattacharyya)?,
            "lp" => Self::Lp(num(&arg)?),
            "sep" => no_arg(Self::Separation)?,
            "rrinf" => no_arg(Self::ReverseRenyiInf)?,
            other => return Err(Error::Parse(format!("unknown divergence '{other}'"))),
        };
        spec.validated()
    }
}

impl Serialize for DivergenceSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for DivergenceSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// User-supplied convex `f` with `f(1) = 0`.
#[derive(Clone)]
pub struct CustomF {
    pub f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub f0: f64,
    pub fstar0: f64,
}

impl CustomF {
    pub fn new(f: impl Fn(f64) -> f64 + Send + Sync + 'static, f0: f64, fstar0: f64) -> Self {
        CustomF { f: Arc::new(f), f0, fstar0 }
    }
}

impl fmt::Debug for CustomF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CustomF {{ f0: {}, fstar0: {} }}", self.f0, self.fstar0)
    }
}

fn check_dims(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), got: b.len() });
    }
    Ok(())
}

/// `D_f` for a user-supplied generator.
pub fn custom_f_divergence(nu1: &[f64], nu2: &[f64], f: &CustomF) -> Result<f64> {
    check_dims(nu1, nu2)?;
    let mut acc = 0.0;
    for (&a, &b) in nu1.iter().zip(nu2) {
        acc += if b > 0.0 {
            b * (f.f)(a / b)
        } else if a > 0.0 {
            a * f.fstar0
        } else {
            0.0
        };
    }
    Ok(nonneg(acc))
}

/// `(1+r) ln(1+r) − r` by its power series, for `|r| < 1e-2`.
fn kl_phi(r: f64) -> f64 {
    let mut term = r * r;
    let mut acc = 0.0;
    for k in 2..14 {
        let kf = k as f64;
        acc += term / (kf * (kf - 1.0));
        term *= -r;
    }
    acc
}

/// Clamp rounding noise below zero without turning NaN into 0.
fn nonneg(v: f64) -> f64 {
    if v < 0.0 {
        0.0
    } else {
        v
    }
}

/// `ln Σ ν₁^α ν₂^{1−α}`, `+∞` when α > 1 and ν₁ is not dominated by ν₂.
pub fn log_alpha_moment(nu1: &[f64], nu2: &[f64], a: f64) -> f64 {
    let mut terms = Vec::with_capacity(nu1.len());
    for (&x, &y) in nu1.iter().zip(nu2) {
        if x > 0.0 && y > 0.0 {
            terms.push(a * x.ln() + (1.0 - a) * y.ln());
        } else if x > 0.0 && a > 1.0 {
            return f64::INFINITY;
        }
    }
    log_sum_exp(&terms)
}

pub fn log_sum_exp(terms: &[f64]) -> f64 {
    let m = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + terms.iter().map(|t| (t - m).exp()).sum::<f64>().ln()
}

fn alpha_from_log_moment(ls: f64, a: f64) -> f64 {
    if ls == f64::INFINITY {
        return f64::INFINITY;
    }
    (ls.exp_m1() / (a - 1.0)).max(0.0)
}

fn renyi_from_log_moment(ls: f64, a: f64) -> f64 {
    (ls / (a - 1.0)).max(0.0)
}

fn kl(nu1: &[f64], nu2: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (&a, &b) in nu1.iter().zip(nu2) {
        if b > 0.0 {
            if a == 0.0 {
                acc += b;
            } else {
                let r = (a - b) / b;
                // the series keeps precision near a = b; elsewhere the direct
                // form is stable, including a ≪ b where 1 + r rounds to 0
                acc += if r.abs() < 1e-2 { b * kl_phi(r) } else { a * (a.ln() - b.ln()) - a + b };
            }
        } else if a > 0.0 {
            return f64::INFINITY;
        }
    }
    nonneg(acc)
}

fn js(nu1: &[f64], nu2: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (&a, &b) in nu1.iter().zip(nu2) {
        let m = a + b;
        if m == 0.0 {
            continue;
        }
        if a > 0.0 {
            acc += a * (2.0 * a / m).ln();
        }
        if b > 0.0 {
            acc += b * (2.0 * b / m).ln();
        }
    }
    nonneg(acc)
}

fn chi_p(nu1: &[f64], nu2: &[f64], p: f64) -> f64 {
    let mut acc = 0.0;
    for (&a, &b) in nu1.iter().zip(nu2) {
        if b > 0.0 {
            acc += (a - b).abs().powf(p) * b.powf(1.0 - p);
        } else if a > 0.0 {
            if p > 1.0 {
                return f64::INFINITY;
            } else if p == 1.0 {
                acc += a;
            }
        }
    }
    acc
}

fn lp(nu1: &[f64], nu2: &[f64], p: f64) -> f64 {
    if nu1.iter().zip(nu2).any(|(&a, &b)| b == 0.0 && a > 0.0) {
        return f64::INFINITY;
    }
    if p.is_infinite() {
        return nu1
            .iter()
            .zip(nu2)
            .filter(|(_, &b)| b > 0.0)
            .map(|(&a, &b)| (a - b).abs() / b)
            .fold(0.0, f64::max);
    }
    if p == 1.0 {
        return nu1.iter().zip(nu2).map(|(a, b)| (a - b).abs()).sum();
    }
    let s: f64 = nu1
        .iter()
        .zip(nu2)
        .filter(|(_, &b)| b > 0.0)
        .map(|(&a, &b)| b * ((a - b) / b).abs().powf(p))
        .sum();
    s.powf(1.0 / p)
}

fn renyi_inf(nu1: &[f64], nu2: &[f64]) -> f64 {
    let mut m = f64::NEG_INFINITY;
    for (&a, &b) in nu1.iter().zip(nu2) {
        if b > 0.0 {
            if a > 0.0 {
                m = m.max(a.ln() - b.ln());
            }
        } else if a > 0.0 {
            return f64::INFINITY;
        }
    }
    m.max(0.0)
}

fn separation(nu1: &[f64], nu2: &[f64]) -> f64 {
    nu1.iter()
        .zip(nu2)
        .filter(|(_, &b)| b > 0.0)
        .map(|(&a, &b)| 1.0 - a / b)
        .fold(0.0, f64::max)
        .clamp(0.0, 1.0)
}

/// Any supported divergence between two distributions.
pub fn divergence(nu1: &[f64], nu2: &[f64], spec: DivergenceSpec) -> Result<f64> {
    spec.validate()?;
    check_dims(nu1, nu2)?;
    Ok(match spec {
        DivergenceSpec::TV => 0.5 * nu1.iter().zip(nu2).map(|(a, b)| (a - b).abs()).sum::<f64>(),
        DivergenceSpec::KL => kl(nu1, nu2),
        DivergenceSpec::ChiSquare => chi_p(nu1, nu2, 2.0),
        DivergenceSpec::ChiP(p) => chi_p(nu1, nu2, p),
        DivergenceSpec::Alpha(a) => alpha_from_log_moment(log_alpha_moment(nu1, nu2, a), a),
        DivergenceSpec::Renyi(a) => renyi_from_log_moment(log_alpha_moment(nu1, nu2, a), a),
        DivergenceSpec::RenyiInf => renyi_inf(nu1, nu2),
        DivergenceSpec::Hellinger2 => nu1.iter().zip(nu2).map(|(a, b)| (a.sqrt() - b.sqrt()).powi(2)).sum(),
        DivergenceSpec::JensenShannon => js(nu1, nu2),
        DivergenceSpec::LeCam => nu1
            .iter()
            .zip(nu2)
            .filter(|(a, b)| *a + *b > 0.0)
            .map(|(a, b)| (a - b) * (a - b) / (a + b))
            .sum(),
        DivergenceSpec::Bhattacharyya => {
            let bc: f64 = nu1.iter().zip(nu2).map(|(a, b)| (a * b).sqrt()).sum();
            if bc <= 0.0 {
                f64::INFINITY
            } else {
                (-bc.ln()).max(0.0)
            }
        }
        DivergenceSpec::Lp(p) => lp(nu1, nu2, p),
        DivergenceSpec::Separation => separation(nu1, nu2),
        DivergenceSpec::ReverseRenyiInf => renyi_inf(nu2, nu1),
    })
}

/// `D_f(ν₁‖ν₂)` for f-divergence kinds only.
pub fn f_divergence(nu1: &[f64], nu2: &[f64], spec: DivergenceSpec) -> Result<f64> {
    if !spec.is_f_divergence() {
        return Err(Error::NotFDivergence(spec.to_string()));
    }
    divergence(nu1, nu2, spec)
}

/// Rényi divergence; `α = 1` is KL and `α = ∞` is `R_∞`.
pub fn renyi(nu1: &[f64], nu2: &[f64], alpha: f64) -> Result<f64> {
    if alpha == 1.0 {
        divergence(nu1, nu2, DivergenceSpec::KL)
    } else if alpha.is_infinite() && alpha > 0.0 {
        divergence(nu1, nu2, DivergenceSpec::RenyiInf)
    } else {
        divergence(nu1, nu2, DivergenceSpec::renyi(alpha)?)
    }
}

/// `R_α` from `D_α` through `ln(1 + (α−1)D)/(α−1)`.
pub fn renyi_from_alpha(d: f64, alpha: f64) -> f64 {
    if d.is_infinite() {
        return if alpha > 1.0 { f64::INFINITY } else { (1.0 - (1.0 - alpha) * d).ln() / (alpha - 1.0) };
    }
    (((alpha - 1.0) * d).ln_1p() / (alpha - 1.0)).max(0.0)
}

/// Inverse of [`renyi_from_alpha`].
pub fn alpha_from_renyi(r: f64, alpha: f64) -> f64 {
    ((alpha - 1.0) * r).exp_m1() / (alpha - 1.0)
}

fn check_state(chain: &FiniteChain, x: usize) -> Result<()> {
    if x >= chain.n() {
        return Err(Error::DimensionMismatch { expected: chain.n(), got: x });
    }
    Ok(())
}

fn row(m: &DMatrix<f64>, x: usize) -> Vec<f64> {
    m.row(x).iter().copied().collect()
}

/// `d(x, t) = D(δ_x P_t ‖ π)`.
pub fn pointwise(chain: &FiniteChain, x: usize, t: f64, spec: DivergenceSpec) -> Result<f64> {
    check_state(chain, x)?;
    let pt = chain.semigroup_at(t)?;
    divergence(&row(&pt, x), chain.stationary(), spec)
}

/// `‖h_t(x,·) − 1‖_{p,π}` with `h_t(x,y) = P_t(x,y)/π(y)`.
pub fn lp_distance(chain: &FiniteChain, x: usize, t: f64, p: f64) -> Result<f64> {
    pointwise(chain, x, t, DivergenceSpec::lp(p)?)
}

pub fn separation_distance(chain: &FiniteChain, x: usize, t: f64) -> Result<f64> {
    pointwise(chain, x, t, DivergenceSpec::Separation)
}

pub fn reverse_renyi_inf(chain: &FiniteChain, x: usize, t: f64) -> Result<f64> {
    pointwise(chain, x, t, DivergenceSpec::ReverseRenyiInf)
}

/// Pointwise divergences from every state, given a precomputed `P_t`.
pub fn rows_divergence(pt: &DMatrix<f64>, pi: &[f64], spec: DivergenceSpec) -> Result<Vec<f64>> {
    (0..pt.nrows()).map(|x| divergence(&row(pt, x), pi, spec)).collect()
}

/// Worst case over initial states, `max_x d(x, t)`.
pub fn worst_case(chain: &FiniteChain, t: f64, spec: DivergenceSpec) -> Result<f64> {
    let pt = chain.semigroup_at(t)?;
    worst_case_of(&pt, chain.stationary(), spec)
}

pub fn worst_case_of(pt: &DMatrix<f64>, pi: &[f64], spec: DivergenceSpec) -> Result<f64> {
    Ok(rows_divergence(pt, pi, spec)?.into_iter().fold(0.0, f64::max))
}

type Bound = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Sandwich `ψ(TV) ≤ D ≤ Ψ(TV)` for a TV-type divergence.
#[derive(Clone)]
pub struct TVTypeBounds {
    pub psi: Bound,
    pub big_psi: Bound,
}

impl TVTypeBounds {
    pub fn lower(&self, s: f64) -> f64 {
        (self.psi)(s)
    }
    pub fn upper(&self, s: f64) -> f64 {
        (self.big_psi)(s)
    }
}

impl fmt::Debug for TVTypeBounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TVTypeBounds {{ psi(1) = {}, Psi(1) = {} }}", self.lower(1.0), self.upper(1.0))
    }
}

pub fn tv_type_bounds(spec: DivergenceSpec) -> Result<TVTypeBounds> {
    spec.validate()?;
    let make = |psi: Bound, big_psi: Bound| Ok(TVTypeBounds { psi, big_psi });
    match spec {
        DivergenceSpec::Alpha(a) if a < 1.0 => make(
            Arc::new(move |s| ((a * (a - 1.0) / 2.0 * s * s).exp() - 1.0) / (a - 1.0)),
            Arc::new(move |s| s / (1.0 - a)),
        ),
        DivergenceSpec::Renyi(a) if a < 1.0 => make(
            Arc::new(move |s| a * s * s / 2.0),
            Arc::new(move |s| -(-s).ln_1p() / (1.0 - a)),
        ),
        DivergenceSpec::Hellinger2 => make(Arc::new(|s| s * s), Arc::new(|s| 2.0 * s)),
        DivergenceSpec::LeCam => make(Arc::new(|s| 2.0 * s * s), Arc::new(|s| 2.0 * s)),
        DivergenceSpec::JensenShannon => {
            make(Arc::new(|s| s * s), Arc::new(|s| 2.0 * s * std::f64::consts::LN_2))
        }
        DivergenceSpec::Bhattacharyya => make(
            Arc::new(|s| -(-s * s / 2.0).ln_1p()),
            Arc::new(|s| -(-s).ln_1p()),
        ),
        other => Err(Error::NotTVType(other.to_string())),
    }
}
