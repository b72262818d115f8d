//! Curve bundles: everything the cutoff analyzer needs from one member of a
//! family, namely its spectral quantities and a worst-case divergence curve
//! per divergence.
//!
//! A bundle is backed either by a dense chain or by a lumped law: a pair of
//! measures on classes of states on which the density `dδ_x P_t/dπ` is
//! constant and the start state is worst-case by symmetry. Every divergence
//! in this crate is a function of the density, so the lumped pair computes the
//! same values as the full chain at a fraction of the size.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::chain::{FiniteChain, TimeKind};
use crate::curves::{CurveFn, DivergenceCurve};
use crate::divergence::{self, DivergenceSpec};
use crate::error::Result;
use crate::spectral::{self, SpectralSummary};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralTriple {
    pub lambda: f64,
    pub kappa: f64,
    pub lambda_prime: f64,
}

impl SpectralTriple {
    pub fn new(lambda: f64, kappa: f64) -> Self {
        SpectralTriple { lambda, kappa, lambda_prime: spectral::lambda_prime(kappa) }
    }

    pub fn from_summary(s: &SpectralSummary) -> Self {
        SpectralTriple { lambda: s.lambda, kappa: s.kappa, lambda_prime: s.lambda_prime }
    }

    /// Rate in the product condition: `λ` in continuous time, `λ′` in discrete time.
    pub fn rate(&self, time_kind: TimeKind) -> f64 {
        match time_kind {
            TimeKind::Continuized => self.lambda,
            TimeKind::Discrete => self.lambda_prime,
        }
    }
}

pub trait CurveBundle: Send + Sync {
    fn label(&self) -> String;
    fn time_kind(&self) -> TimeKind;
    fn spectral(&self) -> Result<SpectralTriple>;
    fn curve(&self, spec: DivergenceSpec) -> Result<DivergenceCurve>;
}

impl fmt::Debug for dyn CurveBundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CurveBundle({})", self.label())
    }
}

/// A dense chain; curves are worst cases over all start states.
pub struct ChainBundle {
    pub chain: Arc<FiniteChain>,
    pub label: String,
}

impl ChainBundle {
    pub fn new(chain: FiniteChain, label: impl Into<String>) -> Self {
        ChainBundle { chain: Arc::new(chain), label: label.into() }
    }
}

impl CurveBundle for ChainBundle {
    fn label(&self) -> String {
        self.label.clone()
    }

    fn time_kind(&self) -> TimeKind {
        self.chain.time_kind()
    }

    fn spectral(&self) -> Result<SpectralTriple> {
        Ok(SpectralTriple::from_summary(&spectral::spectral_summary(&self.chain)?))
    }

    fn curve(&self, spec: DivergenceSpec) -> Result<DivergenceCurve> {
        DivergenceCurve::matrix(self.chain.clone(), spec)
    }
}

/// The law of the class of `X_t` started from a worst-case state, together
/// with the stationary law of the classes.
pub trait LumpedLaw: Send + Sync {
    fn reference(&self) -> &[f64];
    fn law(&self, t: f64) -> Result<Vec<f64>>;
}

pub struct LumpedBundle<L> {
    pub law: Arc<L>,
    pub label: String,
    pub time_kind: TimeKind,
    pub spectral: SpectralTriple,
    pub horizon: f64,
}

impl<L: LumpedLaw + 'static> CurveBundle for LumpedBundle<L> {
    fn label(&self) -> String {
        self.label.clone()
    }

    fn time_kind(&self) -> TimeKind {
        self.time_kind
    }

    fn spectral(&self) -> Result<SpectralTriple> {
        Ok(self.spectral)
    }

    fn curve(&self, spec: DivergenceSpec) -> Result<DivergenceCurve> {
        spec.validate()?;
        let law = self.law.clone();
        let f: CurveFn = Arc::new(move |t| divergence::divergence(&law.law(t)?, law.reference(), spec));
        Ok(DivergenceCurve::closed_form(format!("{} {spec}", self.label), self.time_kind, self.horizon, f))
    }
}

pub type SpecCurveFn = Arc<dyn Fn(DivergenceSpec, f64) -> Result<f64> + Send + Sync>;

/// Curves given directly as functions of `(spec, t)`.
pub struct FnBundle {
    pub label: String,
    pub time_kind: TimeKind,
    pub spectral: SpectralTriple,
    pub horizon: f64,
    pub f: SpecCurveFn,
}

impl CurveBundle for FnBundle {
    fn label(&self) -> String {
        self.label.clone()
    }

    fn time_kind(&self) -> TimeKind {
        self.time_kind
    }

    fn spectral(&self) -> Result<SpectralTriple> {
        Ok(self.spectral)
    }

    fn curve(&self, spec: DivergenceSpec) -> Result<DivergenceCurve> {
        spec.validate()?;
        let f = self.f.clone();
        let g: CurveFn = Arc::new(move |t| f(spec, t));
        Ok(DivergenceCurve::closed_form(format!("{} {spec}", self.label), self.time_kind, self.horizon, g))
    }
}
