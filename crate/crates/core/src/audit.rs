//! Randomized invariant audits shared by the `audit` command and the
//! acceptance run. Each audit is deterministic in its seed and reports the
//! number of checks, the number of violations and the worst excess seen.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bundle::CurveBundle;
use crate::chain::TimeKind;
use crate::curves::{mixing_time, DivergenceCurve, MixingOptions};
use crate::divergence::{self, tv_type_bounds, DivergenceSpec};
use crate::error::Result;
use crate::functional::{self, FunctionalKind, FunctionalOptions};
use crate::random;
use crate::spectral;
use crate::zoo::hypercube::{hypercube, hypercube_product};
use crate::zoo::pak::pak_identity_pack;
use crate::zoo::product_example::ProductExample;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditOutcome {
    pub name: String,
    pub checks: usize,
    pub violations: usize,
    /// Largest amount by which a checked inequality or identity was off.
    pub worst: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl AuditOutcome {
    pub fn passes(&self) -> bool {
        self.violations == 0
    }
}

#[derive(Default)]
struct Tally {
    checks: usize,
    violations: usize,
    worst: f64,
    first: Option<String>,
}

impl Tally {
    /// Record `excess`; a violation when it exceeds `tol`.
    fn check(&mut self, excess: f64, tol: f64, what: impl FnOnce() -> String) {
        self.checks += 1;
        if excess.is_nan() || excess > tol {
            self.violations += 1;
            if self.first.is_none() {
                self.first = Some(what());
            }
        }
        if excess > self.worst || excess.is_nan() {
            self.worst = excess;
        }
    }

    fn merge(mut self, o: Tally) -> Tally {
        self.checks += o.checks;
        self.violations += o.violations;
        if o.worst > self.worst || o.worst.is_nan() {
            self.worst = o.worst;
        }
        if self.first.is_none() {
            self.first = o.first;
        }
        self
    }

    fn finish(self, name: &str, tolerance: f64) -> AuditOutcome {
        AuditOutcome {
            name: name.into(),
            checks: self.checks,
            violations: self.violations,
            worst: self.worst,
            tolerance,
            detail: self.first.unwrap_or_default(),
        }
    }
}

/// Case counts for each audit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AuditSizes {
    pub measure_pairs: usize,
    pub renyi_chains: usize,
    pub decay_chains: usize,
    pub functional_chains: usize,
    pub perturbation_cases: usize,
    pub lower_bound_chains: usize,
}

impl Default for AuditSizes {
    fn default() -> Self {
        AuditSizes {
            measure_pairs: 1000,
            renyi_chains: 50,
            decay_chains: 20,
            functional_chains: 20,
            perturbation_cases: 100,
            lower_bound_chains: 50,
        }
    }
}

impl AuditSizes {
    /// Reduced counts for smoke runs.
    pub fn quick() -> Self {
        AuditSizes {
            measure_pairs: 200,
            renyi_chains: 10,
            decay_chains: 4,
            functional_chains: 4,
            perturbation_cases: 20,
            lower_bound_chains: 10,
        }
    }
}

/// Slack scaled to the size of the compared values.
fn slack(tol: f64, vals: &[f64]) -> f64 {
    tol * vals.iter().fold(1.0f64, |m, v| m.max(v.abs()))
}

pub const DIVERGENCE_SLACK: f64 = 1e-12;

/// Pinsker, monotonicity in α, TV-type sandwiches and the conjugate bound on
/// random pairs of dimension 2 to 20.
pub fn divergence_properties(seed: u64, pairs: usize) -> Result<AuditOutcome> {
    let tol = DIVERGENCE_SLACK;
    let orders = [0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 4.0, 8.0];
    let tallies: Vec<Tally> = (0..pairs)
        .into_par_iter()
        .map(|i| -> Result<Tally> {
            let mut r = random::rng(seed, i as u64);
            let n = 2 + (i % 19);
            let (a, b) = random::random_measure_pair(&mut r, n);
            let mut t = Tally::default();
            let tv = divergence::divergence(&a, &b, DivergenceSpec::TV)?;
            let renyi = |o: f64| if o == 1.0 { DivergenceSpec::KL } else { DivergenceSpec::Renyi(o) };
            let alpha = |o: f64| if o == 1.0 { DivergenceSpec::KL } else { DivergenceSpec::Alpha(o) };
            for o in [0.25, 0.5, 1.0] {
                let r = divergence::divergence(&a, &b, renyi(o))?;
                let lhs = 2.0 * o * tv * tv;
                t.check(lhs - r, slack(tol, &[lhs, r]), || format!("Pinsker α={o}, n={n}: {lhs} > {r}"));
            }
            for (family, limit) in [(renyi as fn(f64) -> DivergenceSpec, true), (alpha, false)] {
                let mut vals: Vec<f64> =
                    orders.iter().map(|&o| divergence::divergence(&a, &b, family(o))).collect::<Result<_>>()?;
                if limit {
                    vals.push(divergence::divergence(&a, &b, DivergenceSpec::RenyiInf)?);
                }
                for (k, w) in vals.windows(2).enumerate() {
                    let next = orders.get(k + 1).copied().unwrap_or(f64::INFINITY);
                    t.check(w[0] - w[1], slack(tol, w), || {
                        format!("{} not monotone between α={} and {next}", family(orders[k]), orders[k])
                    });
                }
            }
            for spec in [
                DivergenceSpec::Hellinger2,
                DivergenceSpec::JensenShannon,
                DivergenceSpec::LeCam,
                DivergenceSpec::Alpha(0.5),
                DivergenceSpec::Alpha(0.25),
                DivergenceSpec::Renyi(0.5),
            ] {
                let d = divergence::divergence(&a, &b, spec)?;
                let bounds = tv_type_bounds(spec)?;
                let (lo, hi) = (bounds.lower(tv), bounds.upper(tv));
                t.check(lo - d, slack(tol, &[lo, d]), || format!("{spec} below ψ(TV)"));
                t.check(d - hi, slack(tol, &[hi, d]), || format!("{spec} above Ψ(TV)"));
            }
            for spec in [
                DivergenceSpec::TV,
                DivergenceSpec::Hellinger2,
                DivergenceSpec::JensenShannon,
                DivergenceSpec::LeCam,
                DivergenceSpec::ChiP(1.0),
                DivergenceSpec::Alpha(0.5),
            ] {
                let (f0, fs0) = spec.f0_fstar0().expect("f-divergence");
                let d = divergence::divergence(&a, &b, spec)?;
                let bound = (f0 + fs0) * tv;
                t.check(d - bound, slack(tol, &[d, bound]), || format!("{spec} above (f(0)+f*(0))·TV"));
            }
            Ok(t)
        })
        .collect::<Result<_>>()?;
    Ok(tallies.into_iter().fold(Tally::default(), Tally::merge).finish("divergence-properties", tol))
}

/// Worst-case `R∞(2t) = R₂(t)` on random reversible continuized chains.
pub fn renyi_inf_identity(seed: u64, chains: usize) -> Result<AuditOutcome> {
    let tol = 1e-8;
    let ts: Vec<f64> = (1..=100).map(|k| k as f64 * 0.1).collect();
    let tallies: Vec<Tally> = (0..chains)
        .into_par_iter()
        .map(|i| -> Result<Tally> {
            let mut r = random::rng(seed ^ 0x52, i as u64);
            let n = 2 + i % 7;
            let c = random::random_reversible(&mut r, n, TimeKind::Continuized)?;
            let mut t = Tally::default();
            for &s in &ts {
                let r2 = divergence::worst_case(&c, s, DivergenceSpec::Renyi(2.0))?;
                let rinf = divergence::worst_case(&c, 2.0 * s, DivergenceSpec::RenyiInf)?;
                t.check((r2 - rinf).abs(), tol, || format!("chain {i}, t={s}: R2 {r2} vs R∞(2t) {rinf}"));
            }
            Ok(t)
        })
        .collect::<Result<_>>()?;
    Ok(tallies.into_iter().fold(Tally::default(), Tally::merge).finish("renyi-inf-identity", tol))
}

pub const DECAY_SLACK: f64 = 1e-9;

/// α-divergence decay at rate `4(α−1)λ/α` and KL decay at rate `4ρ̂(1)`,
/// pointwise in the start state.
pub fn decay_certificates(seed: u64, chains: usize, opts: &FunctionalOptions) -> Result<AuditOutcome> {
    let us = [0.0, 0.25, 0.5, 1.0, 2.0];
    let vs = [0.1, 0.5, 1.0, 2.0, 4.0];
    let mut total = Tally::default();
    for i in 0..chains {
        let mut r = random::rng(seed ^ 0xDE, i as u64);
        let n = 3 + i % 4;
        let c = random::random_reversible(&mut r, n, TimeKind::Continuized)?;
        let lambda = spectral::spectral_gap(&c);
        let mut t = Tally::default();
        for a in [1.25, 1.5, 2.0] {
            let rate = 4.0 * (a - 1.0) * lambda / a;
            let d = functional::decay_audit(&c, DivergenceSpec::Alpha(a), rate, &us, &vs)?;
            t.check(d.worst_excess, DECAY_SLACK, || format!("chain {i}: α={a} decay excess {}", d.worst_excess));
        }
        let rho1 = functional::nonlinear_constant(&c, 1.0, FunctionalKind::Lsi, opts)?.value;
        let d = functional::decay_audit(&c, DivergenceSpec::KL, 4.0 * rho1, &us, &vs)?;
        t.check(d.worst_excess, DECAY_SLACK, || format!("chain {i}: KL decay excess {} (ρ̂(1) = {rho1})", d.worst_excess));
        total = total.merge(t);
    }
    Ok(total.finish("decay-certificates", DECAY_SLACK))
}

/// `λ̂(2)` against the eigensolver gap, `ρ̂(2)` against the classical lower
/// bound, and monotonicity in p for both kinds.
pub fn functional_constants(seed: u64, chains: usize, opts: &FunctionalOptions) -> Result<AuditOutcome> {
    let tol = 1e-6;
    let grid = [1.0, 1.5, 2.0, 3.0, 4.0];
    let mut total = Tally::default();
    for i in 0..chains {
        let mut r = random::rng(seed ^ 0xF0, i as u64);
        let n = 2 + i % 5;
        let c = random::random_reversible(&mut r, n, TimeKind::Continuized)?;
        let gap = spectral::spectral_gap(&c);
        let mut t = Tally::default();
        let lam2 = functional::nonlinear_constant(&c, 2.0, FunctionalKind::Poincare, opts)?.value;
        t.check((lam2 - gap).abs(), tol, || format!("chain {i}: λ̂(2) = {lam2} vs gap {gap}"));
        let rho2 = functional::nonlinear_constant(&c, 2.0, FunctionalKind::Lsi, opts)?.value;
        let lb = functional::lsi_lower_bound(&c);
        t.check(lb - rho2, tol, || format!("chain {i}: ρ̂(2) = {rho2} below bound {lb}"));
        for kind in [FunctionalKind::Lsi, FunctionalKind::Poincare] {
            let m = functional::monotonicity_audit(&c, &grid, kind, opts)?;
            t.check(m.violations.len() as f64, 0.0, || format!("chain {i}: {kind} monotonicity {:?}", m.points));
        }
        total = total.merge(t);
    }
    Ok(total.finish("functional-constants", tol))
}

/// `W = (1−ε)U + εV` with ε halved from ½ until the perturbation condition
/// holds at `b = 0`; then `A` must be `(Q, ε, 0)`-bounded, the spectrum must
/// sit inside the enclosure and the strip count must match the multiplicity.
pub fn perturbation_suite(seed: u64, cases: usize) -> Result<AuditOutcome> {
    let tallies: Vec<Tally> = (0..cases)
        .into_par_iter()
        .map(|i| -> Result<Tally> {
            let mut r = random::rng(seed ^ 0x5E, i as u64);
            let n = 3 + i % 6;
            let tk = if i % 2 == 0 { TimeKind::Continuized } else { TimeKind::Discrete };
            let pi = random::random_measure(&mut r, n);
            let u = random::random_metropolis(&mut r, &pi, tk)?;
            let v = random::random_pi_preserving(&mut r, &pi, tk)?;
            let mut t = Tally::default();
            let mut eps = 0.5;
            for _ in 0..40 {
                let w = random::perturbed(&u, &v, eps)?;
                let cert = spectral::perturbation_certificate(&w, 0.0)?;
                if cert.condition_ok {
                    let wk = w.kernel();
                    let ws = w.adjoint_kernel();
                    let q = (wk + &ws) * 0.5;
                    let a_op = (wk - &ws) * 0.5;
                    let bounded = spectral::qab_check(&q, &a_op, w.stationary(), eps, 0.0)?;
                    t.check(if bounded { 0.0 } else { 1.0 }, 0.0, || format!("case {i}: (Q, ε, 0) check failed at ε={eps}"));
                    t.check(if cert.enclosure_ok { 0.0 } else { 1.0 }, 0.0, || format!("case {i}: eigenvalue outside enclosure"));
                    let strip = cert.strip_applicable && cert.strip_count == cert.multiplicity;
                    t.check(if strip { 0.0 } else { 1.0 }, 0.0, || {
                        format!("case {i}: strip count {} vs multiplicity {}", cert.strip_count, cert.multiplicity)
                    });
                    return Ok(t);
                }
                eps *= 0.5;
            }
            t.check(1.0, 0.0, || format!("case {i}: no ε ≥ 2^-40 meets the condition"));
            Ok(t)
        })
        .collect::<Result<_>>()?;
    Ok(tallies.into_iter().fold(Tally::default(), Tally::merge).finish("perturbation-suite", 0.0))
}

/// Eigenvalue lower bounds never exceed the measured worst-case L¹ mixing
/// time, in both time kinds, on reversible and non-reversible chains.
pub fn eigenvalue_lower_bounds(seed: u64, chains: usize) -> Result<AuditOutcome> {
    let eps_grid = [0.5, 0.25, 0.1];
    let tallies: Vec<Tally> = (0..chains)
        .into_par_iter()
        .map(|i| -> Result<Tally> {
            let mut r = random::rng(seed ^ 0x44, i as u64);
            let n = 3 + i % 6;
            let mut t = Tally::default();
            for tk in [TimeKind::Continuized, TimeKind::Discrete] {
                let c = if i % 2 == 0 {
                    random::random_reversible(&mut r, n, tk)?
                } else {
                    random::random_general(&mut r, n, tk)?
                };
                let summary = spectral::spectral_summary(&c)?;
                let curve = DivergenceCurve::matrix(std::sync::Arc::new(c), DivergenceSpec::Lp(1.0))?;
                for &e in &eps_grid {
                    let b = spectral::eigenvalue_lower_bounds(&summary, e)?;
                    let bound = if tk == TimeKind::Continuized { b.continuized } else { b.discrete };
                    let m = mixing_time(&curve, e, &MixingOptions::default())?;
                    t.check(bound - m.t_hi, 1e-9 * m.t_hi.max(1.0), || {
                        format!("chain {i} ({tk}), ε={e}: bound {bound} > measured {}", m.t_hi)
                    });
                }
            }
            Ok(t)
        })
        .collect::<Result<_>>()?;
    Ok(tallies.into_iter().fold(Tally::default(), Tally::merge).finish("eigenvalue-lower-bounds", 0.0))
}

/// Derived kernels keep π: adjoint, lazify, semigroup, Pak transform.
pub fn stationarity_preserved(seed: u64, chains: usize) -> Result<AuditOutcome> {
    let tol = 1e-10;
    let mut t = Tally::default();
    for i in 0..chains {
        let mut r = random::rng(seed ^ 0x57, i as u64);
        let n = 2 + i % 9;
        let c = random::random_general(&mut r, n, TimeKind::Continuized)?;
        let pi = c.stationary();
        let res = |m: &nalgebra::DMatrix<f64>| crate::chain::stationarity_residual(m, pi);
        t.check(res(&c.adjoint_kernel()), tol, || format!("chain {i}: adjoint"));
        t.check(res(c.lazify(0.3)?.kernel()), tol, || format!("chain {i}: lazify"));
        t.check(res(&c.semigroup_at(1.7)?), tol, || format!("chain {i}: semigroup"));
        t.check(res(crate::zoo::pak::pak_transform(&c, 0.2)?.kernel()), tol, || format!("chain {i}: Pak"));
    }
    Ok(t.finish("stationarity-preserved", tol))
}

/// Zoo closed forms against dense chains: hypercube classes, Pak identities,
/// product example at g = 64.
pub fn zoo_consistency() -> Result<AuditOutcome> {
    let mut t = Tally::default();
    for n in 2..=8 {
        let b = hypercube(n)?;
        let prod = hypercube_product(n, TimeKind::Continuized)?;
        let pi = prod.stationary();
        for &s in &[0.5, 2.0, 8.0] {
            let pt = prod.semigroup_factorized(s)?;
            for spec in [DivergenceSpec::TV, DivergenceSpec::Separation, DivergenceSpec::Lp(2.0), DivergenceSpec::KL] {
                let d = divergence::worst_case_of(&pt, &pi, spec)?;
                let c = b.curve(spec)?.eval(s)?;
                t.check((c - d).abs(), 1e-9, || format!("hypercube n={n} {spec} t={s}: {c} vs {d}"));
            }
        }
    }
    let base = crate::zoo::hypercube::hypercube_chain(6, TimeKind::Discrete)?;
    let ts: Vec<f64> = (1..=50).map(|k| k as f64).collect();
    let (_, pack) = pak_identity_pack(&base, 0.1, &ts)?;
    t.check(pack.worst_defect(), 1e-10, || format!("Pak identities off by {}", pack.worst_defect()));
    let ex = ProductExample::new(0.3, 64f64.ln())?;
    let specs = [DivergenceSpec::KL, DivergenceSpec::Lp(2.0), DivergenceSpec::Renyi(2.0), DivergenceSpec::TV];
    let d = ex.dense_agreement(&specs, &[0.5, 2.0, 8.0])?;
    t.check(d, 1e-8, || format!("product example off by {d}"));
    Ok(t.finish("zoo-consistency", 1e-8))
}

/// Every audit, in a fixed order.
pub fn run_all(seed: u64, sizes: &AuditSizes) -> Result<Vec<AuditOutcome>> {
    let fopts = FunctionalOptions { seed, ..FunctionalOptions::default() };
    Ok(vec![
        divergence_properties(seed, sizes.measure_pairs)?,
        renyi_inf_identity(seed, sizes.renyi_chains)?,
        decay_certificates(seed, sizes.decay_chains, &fopts)?,
        functional_constants(seed, sizes.functional_chains, &fopts)?,
        perturbation_suite(seed, sizes.perturbation_cases)?,
        eigenvalue_lower_bounds(seed, sizes.lower_bound_chains)?,
        stationarity_preserved(seed, 20)?,
        zoo_consistency()?,
    ])
}
