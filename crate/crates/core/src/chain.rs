//! Finite Markov chains: kernel validation, stationary distribution,
//! time reversal, lazification, semigroups and Dirichlet forms.
//!
//! A [`FiniteChain`] is immutable once built. Its stationary distribution
//! π is solved at construction; everything downstream assumes π > 0.
//!
//! Inner products are taken in L²(π): `<f, g>_π = Σ π(x) f(x) g(x)`.

use std::sync::{Arc, OnceLock};

use nalgebra::{DMatrix, DVector};
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

/// Row sums may be off by this much before a kernel is rejected.
pub const STOCHASTIC_TOL: f64 = 1e-9;
/// Tolerance used when deciding whether the symmetric fast path applies.
pub const REVERSIBLE_FAST_PATH_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TimeKind {
    Discrete,
    Continuized,
}

impl std::fmt::Display for TimeKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TimeKind::Discrete => write!(f, "discrete"),
            TimeKind::Continuized => write!(f, "continuized"),
        }
    }
}

impl std::str::FromStr for TimeKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "discrete" => Ok(TimeKind::Discrete),
            "continuized" | "continuous" => Ok(TimeKind::Continuized),
            other => Err(Error::Parse(format!("unknown time kind '{other}'"))),
        }
    }
}

/// Eigenpairs of the π-symmetrized kernel `D^{1/2} P D^{-1/2}`, descending.
#[derive(Debug, Clone)]
pub(crate) struct SymSpectrum {
    pub values: DVector<f64>,
    pub vectors: DMatrix<f64>,
}

#[derive(Debug, Clone)]
pub struct FiniteChain {
    states: Vec<String>,
    kernel: DMatrix<f64>,
    time_kind: TimeKind,
    stationary: Vec<f64>,
    sqrt_pi: Vec<f64>,
    sym: Arc<OnceLock<Option<SymSpectrum>>>,
}

/// The generator `A = P - I` together with the time convention it drives.
#[derive(Debug, Clone)]
pub struct GeneratorView {
    pub matrix: DMatrix<f64>,
    pub time_kind: TimeKind,
}

/// Build a chain from a row-major matrix.
pub fn build_chain(rows: &[Vec<f64>], time_kind: TimeKind) -> Result<FiniteChain> {
    let n = rows.len();
    for r in rows {
        if r.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: r.len() });
        }
    }
    let kernel = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
    FiniteChain::new(kernel, time_kind)
}

fn default_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

fn validate_kernel(kernel: &mut DMatrix<f64>) -> Result<()> {
    let (r, c) = kernel.shape();
    if r != c {
        return Err(Error::DimensionMismatch { expected: r, got: c });
    }
    if r == 0 {
        return Err(Error::NotStochastic("empty kernel".into()));
    }
    for i in 0..r {
        let mut s = 0.0;
        for j in 0..r {
            let v = kernel[(i, j)];
            if !v.is_finite() {
                return Err(Error::NotStochastic(format!("non-finite entry at ({i},{j})")));
            }
            if v < 0.0 {
                return Err(Error::NotStochastic(format!("negative entry {v} at ({i},{j})")));
            }
            s += v;
        }
        if (s - 1.0).abs() > STOCHASTIC_TOL {
            return Err(Error::NotStochastic(format!("row {i} sums to {s}")));
        }
        for j in 0..r {
            kernel[(i, j)] /= s;
        }
    }
    Ok(())
}

/// Number of closed communicating classes and whether the only one covers every state.
fn closed_classes(kernel: &DMatrix<f64>) -> (usize, bool) {
    let n = kernel.nrows();
    let mut g = DiGraph::<(), ()>::with_capacity(n, n * 4);
    let nodes: Vec<_> = (0..n).map(|_| g.add_node(())).collect();
    for i in 0..n {
        for j in 0..n {
            if i != j && kernel[(i, j)] > 0.0 {
                g.add_edge(nodes[i], nodes[j], ());
            }
        }
    }
    let sccs = tarjan_scc(&g);
    let mut comp = vec![0usize; n];
    for (k, scc) in sccs.iter().enumerate() {
        for v in scc {
            comp[v.index()] = k;
        }
    }
    let mut closed = vec![true; sccs.len()];
    for i in 0..n {
        for j in 0..n {
            if kernel[(i, j)] > 0.0 && comp[i] != comp[j] {
                closed[comp[i]] = false;
            }
        }
    }
    let count = closed.iter().filter(|&&c| c).count();
    let covers = count == 1 && sccs.len() == 1;
    (count, covers)
}

fn solve_stationary(kernel: &DMatrix<f64>) -> Result<Vec<f64>> {
    let n = kernel.nrows();
    if n == 1 {
        return Ok(vec![1.0]);
    }
    let mut m = kernel.transpose() - DMatrix::<f64>::identity(n, n);
    for j in 0..n {
        m[(n - 1, j)] = 1.0;
    }
    let mut rhs = DVector::<f64>::zeros(n);
    rhs[n - 1] = 1.0;
    let lu = m.clone().lu();
    let mut x = lu
        .solve(&rhs)
        .ok_or_else(|| Error::EigenSolveFailure("singular stationary system".into()))?;
    // one step of iterative refinement
    let r = &rhs - &m * &x;
    if let Some(dx) = lu.solve(&r) {
        x += dx;
    }
    let min = x.iter().copied().fold(f64::INFINITY, f64::min);
    if min <= 0.0 {
        return Err(Error::NonPositiveStationary(min));
    }
    let s: f64 = x.iter().sum();
    Ok(x.iter().map(|v| v / s).collect())
}

impl FiniteChain {
    /// Validate `kernel`, check irreducibility and solve for π.
    pub fn new(kernel: DMatrix<f64>, time_kind: TimeKind) -> Result<Self> {
        let n = kernel.nrows();
        Self::with_states(default_labels(n), kernel, time_kind)
    }

    pub fn with_states(states: Vec<String>, mut kernel: DMatrix<f64>, time_kind: TimeKind) -> Result<Self> {
        validate_kernel(&mut kernel)?;
        if states.len() != kernel.nrows() {
            return Err(Error::DimensionMismatch { expected: kernel.nrows(), got: states.len() });
        }
        let (count, covers) = closed_classes(&kernel);
        if count > 1 {
            return Err(Error::Reducible(count));
        }
        if !covers {
            return Err(Error::NonPositiveStationary(0.0));
        }
        let pi = solve_stationary(&kernel)?;
        Ok(Self::assemble(states, kernel, time_kind, pi))
    }

    /// Build from a kernel whose stationary law is already known exactly.
    pub(crate) fn with_known_stationary(
        states: Vec<String>,
        mut kernel: DMatrix<f64>,
        time_kind: TimeKind,
        pi: Vec<f64>,
    ) -> Result<Self> {
        validate_kernel(&mut kernel)?;
        if pi.iter().any(|&p| p <= 0.0) {
            return Err(Error::NonPositiveStationary(pi.iter().copied().fold(f64::INFINITY, f64::min)));
        }
        Ok(Self::assemble(states, kernel, time_kind, pi))
    }

    fn assemble(states: Vec<String>, kernel: DMatrix<f64>, time_kind: TimeKind, pi: Vec<f64>) -> Self {
        let sqrt_pi = pi.iter().map(|p| p.sqrt()).collect();
        FiniteChain { states, kernel, time_kind, stationary: pi, sqrt_pi, sym: Arc::new(OnceLock::new()) }
    }

    pub fn n(&self) -> usize {
        self.kernel.nrows()
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn kernel(&self) -> &DMatrix<f64> {
        &self.kernel
    }

    pub fn time_kind(&self) -> TimeKind {
        self.time_kind
    }

    pub fn stationary(&self) -> &[f64] {
        &self.stationary
    }

    pub fn sqrt_stationary(&self) -> &[f64] {
        &self.sqrt_pi
    }

    pub fn pi_min(&self) -> f64 {
        self.stationary.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Same kernel under the other time convention.
    pub fn with_time_kind(&self, time_kind: TimeKind) -> FiniteChain {
        let mut c = self.clone();
        c.time_kind = time_kind;
        c
    }

    /// `‖πP − π‖₁`.
    pub fn stationarity_residual(&self) -> f64 {
        stationarity_residual(&self.kernel, &self.stationary)
    }

    /// Kernel of the time reversal, `P*(x,y) = π(y)P(y,x)/π(x)`.
    pub fn adjoint_kernel(&self) -> DMatrix<f64> {
        let pi = &self.stationary;
        let n = self.n();
        DMatrix::from_fn(n, n, |x, y| pi[y] * self.kernel[(y, x)] / pi[x])
    }

    pub fn adjoint(&self) -> FiniteChain {
        let k = self.adjoint_kernel();
        FiniteChain::with_known_stationary(self.states.clone(), k, self.time_kind, self.stationary.clone())
            .expect("adjoint of a valid chain is valid")
    }

    /// Largest violation of detailed balance `|π(x)P(x,y) − π(y)P(y,x)|`.
    pub fn detailed_balance_defect(&self) -> f64 {
        let n = self.n();
        let pi = &self.stationary;
        let mut worst: f64 = 0.0;
        for x in 0..n {
            for y in (x + 1)..n {
                let d = (pi[x] * self.kernel[(x, y)] - pi[y] * self.kernel[(y, x)]).abs();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn is_reversible(&self, tol: f64) -> bool {
        self.detailed_balance_defect() <= tol
    }

    pub fn is_normal(&self, tol: f64) -> bool {
        let a = self.adjoint_kernel();
        let comm = &self.kernel * &a - &a * &self.kernel;
        linalg::max_abs(&comm) <= tol
    }

    /// `θI + (1−θ)P`.
    pub fn lazify(&self, theta: f64) -> Result<FiniteChain> {
        if !(0.0..1.0).contains(&theta) {
            return Err(Error::InvalidParameter(format!("laziness θ = {theta} must lie in [0, 1)")));
        }
        let n = self.n();
        let k = DMatrix::<f64>::identity(n, n) * theta + &self.kernel * (1.0 - theta);
        FiniteChain::with_known_stationary(self.states.clone(), k, self.time_kind, self.stationary.clone())
    }

    pub fn generator(&self) -> GeneratorView {
        let n = self.n();
        GeneratorView { matrix: &self.kernel - DMatrix::<f64>::identity(n, n), time_kind: self.time_kind }
    }

    /// Period of the support graph (1 means aperiodic).
    pub fn period(&self) -> usize {
        let n = self.n();
        let mut level = vec![usize::MAX; n];
        level[0] = 0;
        let mut queue = std::collections::VecDeque::from([0usize]);
        let mut g = 0usize;
        while let Some(u) = queue.pop_front() {
            for v in 0..n {
                if self.kernel[(u, v)] > 0.0 {
                    if level[v] == usize::MAX {
                        level[v] = level[u] + 1;
                        queue.push_back(v);
                    } else {
                        let d = (level[u] + 1).abs_diff(level[v]);
                        g = gcd(g, d);
                    }
                }
            }
        }
        g.max(1)
    }

    pub(crate) fn sym_spectrum(&self) -> Option<&SymSpectrum> {
        self.sym
            .get_or_init(|| {
                if !self.is_reversible(REVERSIBLE_FAST_PATH_TOL) {
                    return None;
                }
                let s = linalg::conjugate_diag(&self.kernel, &self.sqrt_pi);
                let (values, vectors) = linalg::sym_eigen_desc(&s);
                Some(SymSpectrum { values, vectors })
            })
            .as_ref()
    }

    /// Transition matrix `P_t`: `e^{t(P−I)}` for continuized chains, `P^t` for discrete.
    pub fn semigroup_at(&self, t: f64) -> Result<DMatrix<f64>> {
        check_time(t, self.time_kind)?;
        let n = self.n();
        let mut m = match self.time_kind {
            TimeKind::Discrete => linalg::matrix_power(&self.kernel, t as u64),
            TimeKind::Continuized => {
                if t == 0.0 {
                    DMatrix::<f64>::identity(n, n)
                } else if let Some(sp) = self.sym_spectrum() {
                    let d = &self.sqrt_pi;
                    let mut w = sp.vectors.clone();
                    for (c, mu) in sp.values.iter().enumerate() {
                        let e = (t * (mu - 1.0)).exp();
                        w.column_mut(c).scale_mut(e);
                    }
                    let core = &w * sp.vectors.transpose();
                    DMatrix::from_fn(n, n, |i, j| core[(i, j)] * d[j] / d[i])
                } else {
                    let a = (&self.kernel - DMatrix::<f64>::identity(n, n)) * t;
                    linalg::expm(&a)?
                }
            }
        };
        if self.time_kind == TimeKind::Continuized {
            renormalize_rows(&mut m);
        }
        Ok(m)
    }

    /// `E(f,g) = <f, (I − P) g>_π`.
    pub fn dirichlet_form(&self, f: &[f64], g: &[f64]) -> Result<f64> {
        let n = self.n();
        if f.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: f.len() });
        }
        if g.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: g.len() });
        }
        let pi = &self.stationary;
        let mut acc = 0.0;
        for x in 0..n {
            let mut lg = 0.0;
            for y in 0..n {
                lg += self.kernel[(x, y)] * (g[x] - g[y]);
            }
            acc += pi[x] * f[x] * lg;
        }
        Ok(acc)
    }

    /// `Var_π[f]`.
    pub fn variance(&self, f: &[f64]) -> f64 {
        let mean: f64 = self.stationary.iter().zip(f).map(|(p, v)| p * v).sum();
        self.stationary.iter().zip(f).map(|(p, v)| p * (v - mean) * (v - mean)).sum()
    }
}

pub(crate) fn check_time(t: f64, kind: TimeKind) -> Result<()> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    if kind == TimeKind::Discrete && t.fract() != 0.0 {
        return Err(Error::NonIntegerDiscreteTime(t));
    }
    Ok(())
}

pub(crate) fn renormalize_rows(m: &mut DMatrix<f64>) {
    for i in 0..m.nrows() {
        let mut s = 0.0;
        for j in 0..m.ncols() {
            if m[(i, j)] < 0.0 {
                m[(i, j)] = 0.0;
            }
            s += m[(i, j)];
        }
        if s > 0.0 {
            for j in 0..m.ncols() {
                m[(i, j)] /= s;
            }
        }
    }
}

pub fn stationarity_residual(kernel: &DMatrix<f64>, pi: &[f64]) -> f64 {
    let n = kernel.nrows();
    (0..n)
        .map(|y| {
            let s: f64 = (0..n).map(|x| pi[x] * kernel[(x, y)]).sum();
            (s - pi[y]).abs()
        })
        .sum()
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl GeneratorView {
    pub fn max_row_sum(&self) -> f64 {
        (0..self.matrix.nrows()).map(|i| self.matrix.row(i).sum().abs()).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_state(a: f64, b: f64) -> FiniteChain {
        build_chain(&[vec![1.0 - a, a], vec![b, 1.0 - b]], TimeKind::Continuized).unwrap()
    }

    fn cycle3() -> FiniteChain {
        build_chain(
            &[vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0], vec![1.0, 0.0, 0.0]],
            TimeKind::Continuized,
        )
        .unwrap()
    }

    #[test]
    fn two_state_stationary() {
        let c = two_state(0.5, 0.5);
        assert!((c.stationary()[0] - 0.5).abs() < 1e-15);
        let c = two_state(0.2, 0.3);
        assert!((c.stationary()[0] - 0.6).abs() < 1e-14);
        assert!((c.stationary()[1] - 0.4).abs() < 1e-14);
    }

    #[test]
    fn identity_is_reducible() {
        let e = build_chain(&[vec![1.0, 0.0], vec![0.0, 1.0]], TimeKind::Discrete).unwrap_err();
        assert_eq!(e, Error::Reducible(2));
    }

    #[test]
    fn transient_state_rejected() {
        let e = build_chain(&[vec![0.5, 0.5], vec![0.0, 1.0]], TimeKind::Discrete).unwrap_err();
        assert!(matches!(e, Error::NonPositiveStationary(_)));
    }

    #[test]
    fn bad_rows_rejected() {
        assert!(matches!(
            build_chain(&[vec![0.5, 0.4], vec![0.5, 0.5]], TimeKind::Discrete),
            Err(Error::NotStochastic(_))
        ));
        assert!(matches!(
            build_chain(&[vec![1.5, -0.5], vec![0.5, 0.5]], TimeKind::Discrete),
            Err(Error::NotStochastic(_))
        ));
        assert!(matches!(
            build_chain(&[vec![f64::NAN, 1.0], vec![0.5, 0.5]], TimeKind::Discrete),
            Err(Error::NotStochastic(_))
        ));
    }

    #[test]
    fn cycle_adjoint_is_reverse_cycle() {
        let c = cycle3();
        let a = c.adjoint();
        for i in 0..3 {
            assert!((a.kernel()[(i, (i + 2) % 3)] - 1.0).abs() < 1e-15);
        }
        assert!(!c.is_reversible(1e-12));
        assert!(c.is_normal(1e-12));
        assert_eq!(c.period(), 3);
    }

    #[test]
    fn lazify_cycle() {
        let c = cycle3().lazify(0.5).unwrap();
        for i in 0..3 {
            assert_eq!(c.kernel()[(i, i)], 0.5);
        }
        assert_eq!(c.period(), 1);
        assert!(cycle3().lazify(1.0).is_err());
        let same = cycle3().lazify(0.0).unwrap();
        assert_eq!(same.kernel(), cycle3().kernel());
    }

    #[test]
    fn two_state_semigroup_closed_form() {
        let c = two_state(0.5, 0.5);
        for t in [0.0, 0.3, 1.0, 7.5] {
            let m = c.semigroup_at(t).unwrap();
            assert!((m[(0, 0)] - (1.0 + (-t).exp()) / 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn semigroup_errors() {
        let c = two_state(0.2, 0.3);
        assert_eq!(c.semigroup_at(-1.0).unwrap_err(), Error::NegativeTime(-1.0));
        let d = c.with_time_kind(TimeKind::Discrete);
        assert_eq!(d.semigroup_at(1.5).unwrap_err(), Error::NonIntegerDiscreteTime(1.5));
        assert!((d.semigroup_at(3.0).unwrap() - linalg::matrix_power(d.kernel(), 3)).amax() < 1e-15);
    }

    #[test]
    fn non_reversible_semigroup_uses_pade() {
        let c = cycle3();
        let t = 1.7;
        let m = c.semigroup_at(t).unwrap();
        // circulant: P_t(0, k) = (1/3) Σ_j e^{t(ω^j − 1)} ω^{-jk}
        for k in 0..3 {
            let mut s = num_complex::Complex64::new(0.0, 0.0);
            for j in 0..3 {
                let w = num_complex::Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / 3.0);
                s += ((w - 1.0) * t).exp() * w.powi(-(k as i32));
            }
            assert!((m[(0, k)] - s.re / 3.0).abs() < 1e-13);
        }
    }

    #[test]
    fn dirichlet_two_state() {
        let c = two_state(0.5, 0.5);
        let f = [1.0, -1.0];
        // ½ Σ π(x)P(x,y)(f(x)−f(y))² = ½ · 2 · ¼ · 4
        assert!((c.dirichlet_form(&f, &f).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(c.dirichlet_form(&[1.0, 1.0], &[2.0, 2.0]).unwrap(), 0.0);
        assert!(matches!(c.dirichlet_form(&[1.0], &f), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn generator_rows_vanish() {
        let g = cycle3().generator();
        assert!(g.max_row_sum() < 1e-12);
    }
}
