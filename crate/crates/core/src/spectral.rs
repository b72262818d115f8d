//! Spectral quantities of a chain in `L²(π)` and perturbation bounds for
//! non-normal kernels.
//!
//! All symmetric problems are solved after conjugating by `D^{1/2} = diag(√π)`,
//! which turns π-self-adjoint operators into symmetric matrices.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::chain::{FiniteChain, TimeKind};
use crate::error::{Error, Result};
use crate::linalg;

/// Eigenvalues closer than this are counted as one for multiplicities.
pub const DEDUP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectralSummary {
    /// Spectrum of P, sorted by real part (descending), then imaginary part.
    pub eigenvalues: Vec<Complex64>,
    /// Spectrum of `(P + P*)/2`, descending.
    pub reversibilized: Vec<f64>,
    pub lambda: f64,
    pub kappa: f64,
    pub lambda_prime: f64,
    pub beta1: Complex64,
    pub gamma1: Complex64,
    /// Largest reversibilized eigenvalue strictly below `1 − λ`.
    pub eta: Option<f64>,
}

pub fn lambda_prime(kappa: f64) -> f64 {
    if kappa <= 0.0 {
        1.0
    } else {
        (-kappa.ln()).min(1.0)
    }
}

fn symmetrized(chain: &FiniteChain) -> DMatrix<f64> {
    linalg::conjugate_diag(chain.kernel(), chain.sqrt_stationary())
}

/// Spectrum of a real matrix, sorted by real part then imaginary part, both descending.
pub fn complex_spectrum(m: &DMatrix<f64>) -> Result<Vec<Complex64>> {
    let schur = nalgebra::linalg::Schur::try_new(m.clone(), f64::EPSILON, 100_000)
        .ok_or_else(|| Error::EigenSolveFailure("Schur iteration did not converge".into()))?;
    let ev = schur.complex_eigenvalues();
    let mut v: Vec<Complex64> = ev.iter().copied().collect();
    sort_spectrum(&mut v);
    Ok(v)
}

fn sort_spectrum(v: &mut [Complex64]) {
    v.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
}

pub fn spectral_summary(chain: &FiniteChain) -> Result<SpectralSummary> {
    let n = chain.n();
    if n < 2 {
        return Err(Error::InvalidParameter("spectral summary needs at least two states".into()));
    }
    let s = symmetrized(chain);
    let sym = (&s + s.transpose()) * 0.5;
    let (rev, _) = linalg::sym_eigen_desc(&sym);
    let reversibilized: Vec<f64> = rev.iter().copied().collect();
    let lambda = 1.0 - reversibilized[1];

    let sv = s.clone().svd(false, false).singular_values;
    let mut sv: Vec<f64> = sv.iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    let kappa = sv[1].clamp(0.0, 1.0);

    let mut eigenvalues = if chain.is_reversible(1e-12) {
        reversibilized.iter().map(|&r| Complex64::new(r, 0.0)).collect::<Vec<_>>()
    } else {
        complex_spectrum(chain.kernel())?
    };
    sort_spectrum(&mut eigenvalues);

    // drop the Perron root
    let perron = (0..n)
        .min_by(|&i, &j| (eigenvalues[i] - 1.0).norm().total_cmp(&(eigenvalues[j] - 1.0).norm()))
        .unwrap();
    let rest: Vec<Complex64> =
        eigenvalues.iter().enumerate().filter(|(i, _)| *i != perron).map(|(_, z)| *z).collect();
    let beta1 = *rest
        .iter()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()).then(a.re.total_cmp(&b.re)).then(a.im.total_cmp(&b.im)))
        .unwrap();
    let gamma1 = *rest.iter().max_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))).unwrap();

    let eta = reversibilized.iter().copied().find(|&v| v < reversibilized[1] - DEDUP_TOL);

    Ok(SpectralSummary {
        eigenvalues,
        reversibilized,
        lambda,
        kappa,
        lambda_prime: lambda_prime(kappa),
        beta1,
        gamma1,
        eta,
    })
}

/// Spectral gap alone: `1 −` second eigenvalue of `(P + P*)/2`.
pub fn spectral_gap(chain: &FiniteChain) -> f64 {
    let s = symmetrized(chain);
    let sym = (&s + s.transpose()) * 0.5;
    let (rev, _) = linalg::sym_eigen_desc(&sym);
    if rev.len() < 2 {
        return 1.0;
    }
    1.0 - rev[1]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenvalueLowerBounds {
    pub continuized: f64,
    pub discrete: f64,
    /// `|β₁| = 1`: the discrete bound is `+∞`.
    pub degenerate: bool,
}

/// Lower bounds on the worst-case L¹ mixing time from `γ₁` and `β₁`.
pub fn eigenvalue_lower_bounds(summary: &SpectralSummary, eps: f64) -> Result<EigenvalueLowerBounds> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::InvalidParameter(format!("ε = {eps} must lie in (0, 1]")));
    }
    let l = (1.0 / eps).ln();
    let gap = 1.0 - summary.gamma1.re;
    let continuized = if l == 0.0 { 0.0 } else { l / gap };
    let b = summary.beta1.norm();
    let degenerate = b >= 1.0 - 1e-12;
    let discrete = if l == 0.0 {
        0.0
    } else if degenerate {
        f64::INFINITY
    } else {
        b / (1.0 - b) * l
    };
    Ok(EigenvalueLowerBounds { continuized, discrete, degenerate })
}

fn check_square(m: &DMatrix<f64>, n: usize) -> Result<()> {
    if m.nrows() != n || m.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, got: m.nrows() });
    }
    Ok(())
}

fn qab_matrix(q: &DMatrix<f64>, a: &DMatrix<f64>, pi: &[f64], b: f64) -> Result<DMatrix<f64>> {
    let n = pi.len();
    check_square(q, n)?;
    check_square(a, n)?;
    if !(b >= 0.0) {
        return Err(Error::InvalidParameter(format!("b = {b} must be ≥ 0")));
    }
    let d: Vec<f64> = pi.iter().map(|p| p.sqrt()).collect();
    let qt = linalg::conjugate_diag(q, &d);
    let asym = linalg::max_abs(&(&qt - qt.transpose()));
    if asym > 1e-10 {
        return Err(Error::NotSelfAdjoint(asym));
    }
    let at = linalg::conjugate_diag(a, &d);
    let qs = (&qt + qt.transpose()) * 0.5;
    Ok(at.transpose() * &at - (&qs * &qs) * (b * b))
}

/// Whether `‖Af‖² ≤ a²‖f‖² + b²‖Qf‖²` for all f in `L²(π)`.
pub fn qab_check(q: &DMatrix<f64>, a_op: &DMatrix<f64>, pi: &[f64], a: f64, b: f64) -> Result<bool> {
    let m = qab_matrix(q, a_op, pi, b)?;
    Ok(linalg::sym_max_eigenvalue(&m) <= a * a + 1e-12)
}

/// Smallest `a` for which `A` is `(Q, a, b)`-bounded.
pub fn qab_minimal_a(q: &DMatrix<f64>, a_op: &DMatrix<f64>, pi: &[f64], b: f64) -> Result<f64> {
    let m = qab_matrix(q, a_op, pi, b)?;
    Ok(linalg::sym_max_eigenvalue(&m).max(0.0).sqrt())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PerturbationCertificate {
    pub a: f64,
    pub b: f64,
    pub lambda: f64,
    pub eta: Option<f64>,
    /// `√(a²+b²) < ½ min{1−λ−η, λ}` (and `b² < 3/4` for discrete time).
    pub condition_ok: bool,
    /// Every eigenvalue of W lies between the hyperbolas.
    pub enclosure_ok: bool,
    /// Whether the isolation conditions for the strip count hold at `1 − λ`.
    pub strip_applicable: bool,
    pub strip_count: usize,
    pub multiplicity: usize,
    /// `strip_count == multiplicity`, or vacuous when not applicable.
    pub strip_count_ok: bool,
}

/// Split `W = Q + A` with `Q = (W+W*)/2`, `A = (W−W*)/2`, pick the minimal `a`
/// for the given `b`, and evaluate the enclosure statements.
pub fn perturbation_certificate(w: &FiniteChain, b: f64) -> Result<PerturbationCertificate> {
    if !(b >= 0.0) {
        return Err(Error::InvalidParameter(format!("b = {b} must be ≥ 0")));
    }
    if b >= 1.0 {
        return Err(Error::BNotLessThanOne(b));
    }
    let wk = w.kernel();
    let ws = w.adjoint_kernel();
    let q = (wk + &ws) * 0.5;
    let a_op = (wk - &ws) * 0.5;
    let pi = w.stationary();
    let a = qab_minimal_a(&q, &a_op, pi, b)?;

    let summary = spectral_summary(w)?;
    let lambda = summary.lambda;
    let eta = summary.eta;
    let r = (a * a + b * b).sqrt();
    let spread = eta.map(|e| 1.0 - lambda - e).unwrap_or(f64::INFINITY);
    let mut condition_ok = r < 0.5 * spread.min(lambda);
    if w.time_kind() == TimeKind::Discrete {
        condition_ok &= b * b < 0.75;
    }

    let spectrum = complex_spectrum(wk)?;
    let enclosure_ok = spectrum.iter().all(|z| {
        let lhs = z.im * z.im;
        let rhs = (a * a + b * b * z.re * z.re) / (1.0 - b * b);
        lhs <= rhs + 1e-9
    });

    let rev = &summary.reversibilized;
    let mu = 1.0 - lambda;
    let multiplicity = rev.iter().filter(|&&v| (v - mu).abs() <= DEDUP_TOL).count();
    let lower = rev.iter().copied().filter(|&v| v < mu - DEDUP_TOL).fold(f64::NEG_INFINITY, f64::max);
    let upper = rev.iter().copied().filter(|&v| v > mu + DEDUP_TOL).fold(f64::INFINITY, f64::min);
    let rad = |x: f64| (a * a + b * b * x * x).sqrt();
    let below_ok = !lower.is_finite() || rad(lower) + rad(mu) < mu - lower;
    let above_ok = !upper.is_finite() || rad(mu) + rad(upper) < upper - mu;
    let strip_applicable = below_ok && above_ok;
    let half = rad(mu);
    let strip_count = spectrum.iter().filter(|z| (z.re - mu).abs() <= half + DEDUP_TOL).count();
    let strip_count_ok = !strip_applicable || strip_count == multiplicity;

    Ok(PerturbationCertificate {
        a,
        b,
        lambda,
        eta,
        condition_ok,
        enclosure_ok,
        strip_applicable,
        strip_count,
        multiplicity,
        strip_count_ok,
    })
}

/// `‖P_t − Π‖` as an operator on `L²(π)`.
pub fn l2_operator_norm(chain: &FiniteChain, pt: &DMatrix<f64>) -> f64 {
    let n = chain.n();
    let pi = chain.stationary();
    let diff = DMatrix::from_fn(n, n, |i, j| pt[(i, j)] - pi[j]);
    let s = linalg::conjugate_diag(&diff, chain.sqrt_stationary());
    s.svd(false, false).singular_values.iter().copied().fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::build_chain;

    #[test]
    fn symmetric_two_state() {
        let c = build_chain(&[vec![0.5, 0.5], vec![0.5, 0.5]], TimeKind::Continuized).unwrap();
        let s = spectral_summary(&c).unwrap();
        assert!((s.lambda - 1.0).abs() < 1e-14);
        assert!(s.kappa.abs() < 1e-14);
        assert_eq!(s.lambda_prime, 1.0);
        assert_eq!(s.eta, None);
    }

    #[test]
    fn three_cycle() {
        let c = build_chain(
            &[vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0], vec![1.0, 0.0, 0.0]],
            TimeKind::Continuized,
        )
        .unwrap();
        let s = spectral_summary(&c).unwrap();
        assert!((s.lambda - 1.5).abs() < 1e-12);
        assert!((s.gamma1.re + 0.5).abs() < 1e-12);
        assert!((s.beta1.norm() - 1.0).abs() < 1e-12);
        let b = eigenvalue_lower_bounds(&s, 0.1).unwrap();
        assert!((b.continuized - 10f64.ln() / 1.5).abs() < 1e-12);
        assert!(b.degenerate && b.discrete.is_infinite());
        let one = eigenvalue_lower_bounds(&s, 1.0).unwrap();
        assert_eq!((one.continuized, one.discrete), (0.0, 0.0));
    }

    #[test]
    fn qab_trivial_cases() {
        let c = build_chain(&[vec![0.7, 0.3], vec![0.6, 0.4]], TimeKind::Continuized).unwrap();
        let q = c.kernel().clone();
        let pi = c.stationary();
        let zero = DMatrix::<f64>::zeros(2, 2);
        assert!(qab_check(&q, &zero, pi, 0.0, 0.0).unwrap());
        assert!(qab_check(&q, &q, pi, 0.0, 1.0).unwrap());
        assert!(qab_minimal_a(&q, &q, pi, 1.0).unwrap() < 1e-7);
    }

    #[test]
    fn not_self_adjoint() {
        let c = build_chain(&[vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0], vec![1.0, 0.0, 0.0]], TimeKind::Continuized)
            .unwrap();
        let e = qab_check(c.kernel(), c.kernel(), c.stationary(), 1.0, 0.0).unwrap_err();
        assert!(matches!(e, Error::NotSelfAdjoint(_)));
    }

    #[test]
    fn b_must_be_below_one() {
        let c = build_chain(&[vec![0.7, 0.3], vec![0.6, 0.4]], TimeKind::Continuized).unwrap();
        assert_eq!(perturbation_certificate(&c, 1.0).unwrap_err(), Error::BNotLessThanOne(1.0));
    }

    #[test]
    fn reversible_certificate_is_trivial() {
        let c = build_chain(
            &[vec![0.5, 0.3, 0.2], vec![0.3, 0.4, 0.3], vec![0.2, 0.3, 0.5]],
            TimeKind::Continuized,
        )
        .unwrap();
        let cert = perturbation_certificate(&c, 0.0).unwrap();
        assert!(cert.a < 1e-7);
        assert!(cert.condition_ok && cert.enclosure_ok && cert.strip_count_ok);
    }
}
