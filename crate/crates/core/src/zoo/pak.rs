//! Pak's transform `Q = (1 − c)P + cΠ`, where `Π` has every row equal to π.
//!
//! `Q` keeps π and reversibility, and in discrete time
//! `Q_t = (1 − c)^t P_t + (1 − (1 − c)^t) Π`. So every worst-case distance
//! that is homogeneous in `δ_x Q_t − π` picks up the exact factor
//! `(1 − c)^t`: total variation, `L^p` distances, separation and the operator
//! norm of `Q_t − Π`. The spectrum off the Perron root scales by `1 − c`, so
//! `1 − λ(Q) = (1 − c)(1 − λ(P))` and `κ(Q) = (1 − c)κ(P)`, hence
//! `−ln κ(Q) = −ln κ(P) − ln(1 − c)`.
//!
//! With `c_n ≫ λ_n` the TV mixing time of `Q_n` is about `c_n^{-1} ln(1/ε)`,
//! so TV ratios stay near `ln η / ln ε`, while the L² distance keeps the
//! cutoff of the base chain.

use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::bundle::{LumpedBundle, LumpedLaw, SpectralTriple};
use crate::chain::{check_time, FiniteChain, TimeKind};
use crate::curves::HORIZON_FACTOR;
use crate::divergence::{worst_case_of, DivergenceSpec};
use crate::error::{Error, Result};
use crate::spectral;
use crate::zoo::hypercube::{hypercube_spectral, LazyWalkLaw};

fn check_c(c: f64) -> Result<()> {
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::COutOfRange(c));
    }
    Ok(())
}

/// The transformed chain `Q`; π is carried over from the base.
pub fn pak_transform(base: &FiniteChain, c: f64) -> Result<FiniteChain> {
    check_c(c)?;
    let n = base.n();
    let pi = base.stationary();
    let k = DMatrix::from_fn(n, n, |i, j| (1.0 - c) * base.kernel()[(i, j)] + c * pi[j]);
    FiniteChain::with_known_stationary(base.states().to_vec(), k, base.time_kind(), pi.to_vec())
}

/// Spectral triple of `Q` from that of `P`.
pub fn pak_spectral(base: SpectralTriple, c: f64) -> Result<SpectralTriple> {
    check_c(c)?;
    Ok(SpectralTriple::new(1.0 - (1.0 - c) * (1.0 - base.lambda), (1.0 - c) * base.kappa))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PakTimeCheck {
    pub t: f64,
    pub multiplier: f64,
    pub tv_q: f64,
    pub tv_p: f64,
    pub l2_q: f64,
    pub l2_p: f64,
    pub opnorm_q: f64,
    pub opnorm_p: f64,
    /// `max |Q_t − ((1−c)^t P_t + (1 − (1−c)^t)Π)|` entrywise.
    pub expression_defect: f64,
}

impl PakTimeCheck {
    pub fn tv_defect(&self) -> f64 {
        (self.tv_q - self.multiplier * self.tv_p).abs()
    }
    pub fn l2_defect(&self) -> f64 {
        (self.l2_q - self.multiplier * self.l2_p).abs()
    }
    pub fn opnorm_defect(&self) -> f64 {
        (self.opnorm_q - self.multiplier * self.opnorm_p).abs()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PakIdentityPack {
    pub c: f64,
    pub checks: Vec<PakTimeCheck>,
    /// `−ln κ(Q)` and `−ln κ(P) − ln(1 − c)`, unclipped; `None` when `κ(P) = 0`.
    pub log_kappa_q: Option<f64>,
    pub log_kappa_predicted: Option<f64>,
    /// `1 − λ(Q)` and `(1 − c)(1 − λ(P))`.
    pub one_minus_lambda_q: f64,
    pub one_minus_lambda_predicted: f64,
}

impl PakIdentityPack {
    /// Largest defect over every identity in the pack.
    pub fn worst_defect(&self) -> f64 {
        let mut w = (self.one_minus_lambda_q - self.one_minus_lambda_predicted).abs();
        if let (Some(a), Some(b)) = (self.log_kappa_q, self.log_kappa_predicted) {
            w = w.max((a - b).abs());
        }
        for ch in &self.checks {
            w = w.max(ch.tv_defect()).max(ch.l2_defect()).max(ch.opnorm_defect()).max(ch.expression_defect);
        }
        w
    }

    pub fn lambda_prime_defect(&self) -> Option<f64> {
        Some((self.log_kappa_q? - self.log_kappa_predicted?).abs())
    }

    pub fn holds(&self, tol: f64) -> bool {
        self.worst_defect() <= tol
    }
}

/// Build `Q` and evaluate every identity on `t_grid` (non-negative integers).
/// `Q_t` and `P_t` are computed independently by matrix powers.
pub fn pak_identity_pack(base: &FiniteChain, c: f64, t_grid: &[f64]) -> Result<(FiniteChain, PakIdentityPack)> {
    check_c(c)?;
    if base.time_kind() != TimeKind::Discrete {
        return Err(Error::InvalidParameter("Pak identities are stated for discrete time".into()));
    }
    let q = pak_transform(base, c)?;
    let pi = base.stationary();
    let n = base.n();
    let mut checks = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        check_time(t, TimeKind::Discrete)?;
        let pt = base.semigroup_at(t)?;
        let qt = q.semigroup_at(t)?;
        let a = (t * (-c).ln_1p()).exp();
        let mut expression_defect = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let e = a * pt[(i, j)] + (1.0 - a) * pi[j];
                expression_defect = expression_defect.max((qt[(i, j)] - e).abs());
            }
        }
        checks.push(PakTimeCheck {
            t,
            multiplier: a,
            tv_q: worst_case_of(&qt, pi, DivergenceSpec::TV)?,
            tv_p: worst_case_of(&pt, pi, DivergenceSpec::TV)?,
            l2_q: worst_case_of(&qt, pi, DivergenceSpec::Lp(2.0))?,
            l2_p: worst_case_of(&pt, pi, DivergenceSpec::Lp(2.0))?,
            opnorm_q: spectral::l2_operator_norm(&q, &qt),
            opnorm_p: spectral::l2_operator_norm(base, &pt),
            expression_defect,
        });
    }
    let sp = spectral::spectral_summary(base)?;
    let sq = spectral::spectral_summary(&q)?;
    let (log_kappa_q, log_kappa_predicted) = if sp.kappa > 0.0 {
        (Some(-sq.kappa.ln()), Some(-sp.kappa.ln() - (-c).ln_1p()))
    } else {
        (None, None)
    };
    let pack = PakIdentityPack {
        c,
        checks,
        log_kappa_q,
        log_kappa_predicted,
        one_minus_lambda_q: 1.0 - sq.lambda,
        one_minus_lambda_predicted: (1.0 - c) * (1.0 - sp.lambda),
    };
    Ok((q, pack))
}

/// Lumped law of `Q_t` over a lumped discrete base.
pub struct PakLaw<L> {
    base: Arc<L>,
    log_keep: f64,
}

impl<L: LumpedLaw> PakLaw<L> {
    pub fn new(base: Arc<L>, c: f64) -> Result<Self> {
        check_c(c)?;
        Ok(PakLaw { base, log_keep: (-c).ln_1p() })
    }
}

impl<L: LumpedLaw> LumpedLaw for PakLaw<L> {
    fn reference(&self) -> &[f64] {
        self.base.reference()
    }

    fn law(&self, t: f64) -> Result<Vec<f64>> {
        check_time(t, TimeKind::Discrete)?;
        let a = (t * self.log_keep).exp();
        let p = self.base.law(t)?;
        Ok(p.iter().zip(self.base.reference()).map(|(x, r)| a * x + (1.0 - a) * r).collect())
    }
}

/// Pak transform of the discrete hypercube walk of dimension `n`.
pub fn pak_hypercube(n: usize, c: f64) -> Result<LumpedBundle<PakLaw<LazyWalkLaw>>> {
    check_c(c)?;
    let base = Arc::new(LazyWalkLaw::new(n)?);
    let spectral = pak_spectral(hypercube_spectral(n), c)?;
    Ok(LumpedBundle {
        law: Arc::new(PakLaw::new(base, c)?),
        label: format!("pak(hypercube n={n}, c={c})"),
        time_kind: TimeKind::Discrete,
        horizon: (HORIZON_FACTOR / spectral.lambda.min(spectral.lambda_prime)).ceil(),
        spectral,
    })
}
