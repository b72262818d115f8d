//! Weighted products of chains.
//!
//! The product kernel on `X₁ × … × X_k` is
//! `Σ_i w_i I ⊗ … ⊗ P_i ⊗ … ⊗ I`: pick coordinate i with probability `w_i`
//! and move it by `P_i`. In continuous time the semigroup factorizes,
//! `e^{t(P−I)} = ⊗_i e^{w_i t (P_i − I)}`.

use nalgebra::DMatrix;

use crate::chain::{FiniteChain, TimeKind};
use crate::error::{Error, Result};
use crate::spectral;

pub const DEFAULT_DENSE_LIMIT: usize = 4096;

#[derive(Debug, Clone)]
pub struct ProductChain {
    components: Vec<FiniteChain>,
    weights: Vec<f64>,
    dense_limit: usize,
}

pub fn kron(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    a.kronecker(b)
}

impl ProductChain {
    pub fn new(components: Vec<FiniteChain>, weights: Vec<f64>) -> Result<Self> {
        if components.len() < 2 {
            return Err(Error::InvalidParameter("a product needs at least two components".into()));
        }
        if weights.len() != components.len() {
            return Err(Error::DimensionMismatch { expected: components.len(), got: weights.len() });
        }
        if weights.iter().any(|&w| !(w > 0.0) || !w.is_finite()) {
            return Err(Error::InvalidParameter("product weights must be positive".into()));
        }
        let s: f64 = weights.iter().sum();
        if (s - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!("product weights sum to {s}")));
        }
        let tk = components[0].time_kind();
        if components.iter().any(|c| c.time_kind() != tk) {
            return Err(Error::InvalidParameter("components disagree on time kind".into()));
        }
        Ok(ProductChain { components, weights, dense_limit: DEFAULT_DENSE_LIMIT })
    }

    pub fn with_dense_limit(mut self, limit: usize) -> Self {
        self.dense_limit = limit;
        self
    }

    pub fn components(&self) -> &[FiniteChain] {
        &self.components
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn time_kind(&self) -> TimeKind {
        self.components[0].time_kind()
    }

    /// Size of the product state space, saturating on overflow.
    pub fn state_count(&self) -> usize {
        self.components.iter().fold(1usize, |acc, c| acc.saturating_mul(c.n()))
    }

    fn check_size(&self) -> Result<usize> {
        let states = self.state_count();
        if states > self.dense_limit {
            return Err(Error::StateExplosion { states, limit: self.dense_limit });
        }
        Ok(states)
    }

    /// Product stationary law `π₁ ⊗ … ⊗ π_k`.
    pub fn stationary(&self) -> Vec<f64> {
        let mut pi = vec![1.0];
        for c in &self.components {
            let mut next = Vec::with_capacity(pi.len() * c.n());
            for a in &pi {
                for b in c.stationary() {
                    next.push(a * b);
                }
            }
            pi = next;
        }
        pi
    }

    fn labels(&self) -> Vec<String> {
        let mut labels = vec![String::new()];
        for c in &self.components {
            let mut next = Vec::with_capacity(labels.len() * c.n());
            for l in &labels {
                for s in c.states() {
                    if l.is_empty() {
                        next.push(s.clone());
                    } else {
                        next.push(format!("{l},{s}"));
                    }
                }
            }
            labels = next;
        }
        labels.into_iter().map(|l| format!("({l})")).collect()
    }

    /// Dense kernel on the product space.
    pub fn kernel(&self) -> Result<DMatrix<f64>> {
        let states = self.check_size()?;
        let mut k = DMatrix::<f64>::zeros(states, states);
        for (i, (ci, wi)) in self.components.iter().zip(&self.weights).enumerate() {
            let mut term = DMatrix::<f64>::identity(1, 1);
            for (j, cj) in self.components.iter().enumerate() {
                let factor = if i == j { ci.kernel().clone() } else { DMatrix::identity(cj.n(), cj.n()) };
                term = kron(&term, &factor);
            }
            k += term * *wi;
        }
        Ok(k)
    }

    pub fn materialize(&self) -> Result<FiniteChain> {
        let k = self.kernel()?;
        FiniteChain::with_known_stationary(self.labels(), k, self.time_kind(), self.stationary())
    }

    /// Spectral gap `min_i w_i λ_i`, read off the component gaps without
    /// materializing the product: the additive symmetrization of the product
    /// kernel is the weighted sum of the symmetrized components.
    pub fn spectral_gap(&self) -> f64 {
        self.components
            .iter()
            .zip(&self.weights)
            .map(|(c, w)| w * spectral::spectral_gap(c))
            .fold(f64::INFINITY, f64::min)
    }

    /// Continuous-time semigroup as the Kronecker product of component
    /// semigroups at times `w_i t`.
    pub fn semigroup_factorized(&self, t: f64) -> Result<DMatrix<f64>> {
        if self.time_kind() != TimeKind::Continuized {
            return Err(Error::InvalidParameter("factorized semigroup requires continuized components".into()));
        }
        self.check_size()?;
        let mut m = DMatrix::<f64>::identity(1, 1);
        for (c, w) in self.components.iter().zip(&self.weights) {
            m = kron(&m, &c.semigroup_at(w * t)?);
        }
        Ok(m)
    }
}
