//! Seeded random chains and measures for audits and property tests.
//!
//! Every generator takes an explicit `ChaCha8Rng`; [`rng`] derives one per
//! `(seed, stream)` so audits are reproducible case by case.

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chain::{FiniteChain, TimeKind};
use crate::error::Result;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_mul(GOLDEN) ^ stream.wrapping_add(1).wrapping_mul(0xD1B5_4A32_D192_ED03))
}

/// Positive weight with a random spread over several orders of magnitude.
fn weight(rng: &mut ChaCha8Rng, spread: f64) -> f64 {
    let u: f64 = rng.random_range(1e-3..1.0);
    u.powf(spread)
}

/// Strictly positive probability vector of length `n`.
pub fn random_measure(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let spread = rng.random_range(0.5..4.0);
    let w: Vec<f64> = (0..n).map(|_| weight(rng, spread)).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|x| x / s).collect()
}

/// Two positive measures; one case in four is a small perturbation of the
/// other, to exercise the near-equality regime.
pub fn random_measure_pair(rng: &mut ChaCha8Rng, n: usize) -> (Vec<f64>, Vec<f64>) {
    let a = random_measure(rng, n);
    if rng.random_bool(0.25) {
        let scale = 10f64.powf(rng.random_range(-6.0..-1.0));
        let b: Vec<f64> = a.iter().map(|x| x * (1.0 + scale * rng.random_range(-1.0..1.0))).collect();
        let s: f64 = b.iter().sum();
        return (a, b.into_iter().map(|x| x / s).collect());
    }
    let b = random_measure(rng, n);
    (a, b)
}

fn symmetric_weights(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let spread = rng.random_range(0.5..3.0);
    let mut w = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = weight(rng, spread);
            w[(i, j)] = v;
            w[(j, i)] = v;
        }
    }
    w
}

/// Random walk on a complete weighted graph with loops: reversible with
/// `π ∝` row sums of the weights.
pub fn random_reversible(rng: &mut ChaCha8Rng, n: usize, time_kind: TimeKind) -> Result<FiniteChain> {
    let w = symmetric_weights(rng, n);
    let deg: Vec<f64> = (0..n).map(|i| w.row(i).sum()).collect();
    let total: f64 = deg.iter().sum();
    let k = DMatrix::from_fn(n, n, |i, j| w[(i, j)] / deg[i]);
    let pi = deg.iter().map(|d| d / total).collect();
    FiniteChain::with_known_stationary(labels(n), k, time_kind, pi)
}

/// Random sparse kernel made irreducible by a random cycle; generally not
/// reversible.
pub fn random_general(rng: &mut ChaCha8Rng, n: usize, time_kind: TimeKind) -> Result<FiniteChain> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let spread = rng.random_range(0.5..3.0);
    let density = rng.random_range(0.3..1.0);
    let mut k = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if rng.random_bool(density) {
                k[(i, j)] = weight(rng, spread);
            }
        }
    }
    for w in 0..n {
        let (a, b) = (order[w], order[(w + 1) % n]);
        k[(a, b)] += weight(rng, spread).max(0.05);
    }
    for i in 0..n {
        let s: f64 = k.row(i).sum();
        for j in 0..n {
            k[(i, j)] /= s;
        }
    }
    FiniteChain::new(k, time_kind)
}

/// Metropolis chain for a given π over a random symmetric proposal.
pub fn random_metropolis(rng: &mut ChaCha8Rng, pi: &[f64], time_kind: TimeKind) -> Result<FiniteChain> {
    let n = pi.len();
    let mut w = symmetric_weights(rng, n);
    for i in 0..n {
        w[(i, i)] = 0.0;
    }
    let cap = (0..n).map(|i| w.row(i).sum()).fold(0.0, f64::max) * rng.random_range(1.0..2.0);
    let mut k = DMatrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { w[(i, j)] / cap * (pi[j] / pi[i]).min(1.0) });
    for i in 0..n {
        let off: f64 = k.row(i).sum();
        k[(i, i)] = 1.0 - off;
    }
    FiniteChain::with_known_stationary(labels(n), k, time_kind, pi.to_vec())
}

/// `R₁R₂` for two independent Metropolis chains of π: π-stationary and
/// generally not reversible.
pub fn random_pi_preserving(rng: &mut ChaCha8Rng, pi: &[f64], time_kind: TimeKind) -> Result<FiniteChain> {
    let r1 = random_metropolis(rng, pi, time_kind)?;
    let r2 = random_metropolis(rng, pi, time_kind)?;
    FiniteChain::with_known_stationary(labels(pi.len()), r1.kernel() * r2.kernel(), time_kind, pi.to_vec())
}

/// `W = (1 − ε)U + εV` with `U` reversible and `V` π-preserving, both for π.
pub fn perturbed(u: &FiniteChain, v: &FiniteChain, eps: f64) -> Result<FiniteChain> {
    let k = u.kernel() * (1.0 - eps) + v.kernel() * eps;
    FiniteChain::with_known_stationary(labels(u.n()), k, u.time_kind(), u.stationary().to_vec())
}

fn labels(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_are_valid_and_reproducible() {
        for s in 0..20 {
            let mut r = rng(3, s);
            let c = random_reversible(&mut r, 6, TimeKind::Continuized).unwrap();
            assert!(c.is_reversible(1e-12) && c.stationarity_residual() < 1e-13);
            let g = random_general(&mut r, 7, TimeKind::Discrete).unwrap();
            assert!(g.stationarity_residual() < 1e-12);
            let v = random_pi_preserving(&mut r, c.stationary(), TimeKind::Continuized).unwrap();
            assert!(v.stationarity_residual() < 1e-13);
        }
        let a = random_measure(&mut rng(9, 1), 10);
        let b = random_measure(&mut rng(9, 1), 10);
        assert_eq!(a, b);
    }
}
