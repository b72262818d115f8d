//! Empirical cutoff diagnosis for families of chains indexed by `n`.
//!
//! A family has cutoff in a divergence when `t_n(η)/t_n(ε) → 1` for all
//! `0 < η < ε < M`, and precutoff when the ratios stay bounded. Limits cannot
//! be observed at finitely many `n`, so [`cutoff_diagnosis`] applies trend
//! rules whose thresholds are stored verbatim in the report. With
//! `d_n = r_n(η, ε) − 1` over the pairs `η < ε` of the grid:
//!
//! - **cutoff**: for every pair, `d_n` is weakly decreasing over the last
//!   `trend_points` indices and the final `d_n ≤ δ_c`;
//! - **no-cutoff**: otherwise, when some pair has a flat trend over the last
//!   `trend_points` indices (spread of the ratios at most `flat_tol · d_n`)
//!   with final ratio `≥ 1 + δ_c + margin`;
//! - **precutoff-only**: otherwise, when every ratio at every index is `≤ C`;
//! - **inconclusive**: otherwise.
//!
//! The product condition `λ_n t_n(ε) → ∞` is read as "increasing in `n` and
//! growing by at least `growth_factor` from the first to the last index";
//! discrete-time families use `λ′_n = min{1, −ln κ_n}` instead of `λ_n`.
//! The window is the median over pairs of `t_n(η) − t_n(ε)`, also reported in
//! units of `λ_n^{-1}`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bundle::{CurveBundle, SpectralTriple};
use crate::chain::TimeKind;
use crate::curves::{mixing_time, MixingOptions};
use crate::divergence::DivergenceSpec;
use crate::error::{Error, Result};

/// Smallest number of usable indices a diagnosis accepts.
pub const MIN_INDICES: usize = 4;

/// ε grid used when none is given.
pub const DEFAULT_EPS_GRID: [f64; 6] = [0.4, 0.25, 0.1, 0.05, 0.02, 0.01];

pub type BundleBuilder = Arc<dyn Fn(usize) -> Result<Box<dyn CurveBundle>> + Send + Sync>;

#[derive(Clone)]
pub struct ChainFamily {
    pub name: String,
    pub indices: Vec<usize>,
    pub builder: BundleBuilder,
    pub specs: Vec<DivergenceSpec>,
}

impl fmt::Debug for ChainFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ChainFamily").field("name", &self.name).field("indices", &self.indices).finish()
    }
}

impl ChainFamily {
    pub fn new(name: impl Into<String>, indices: Vec<usize>, builder: BundleBuilder) -> Result<Self> {
        if indices.is_empty() || indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter("family indices must be non-empty and strictly increasing".into()));
        }
        Ok(ChainFamily { name: name.into(), indices, builder, specs: vec![DivergenceSpec::TV] })
    }

    pub fn with_specs(mut self, specs: Vec<DivergenceSpec>) -> Self {
        self.specs = specs;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub delta_c: f64,
    pub c_bound: f64,
    pub growth_factor: f64,
    pub flat_tol: f64,
    pub flat_margin: f64,
    pub trend_points: usize,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds { delta_c: 0.15, c_bound: 4.0, growth_factor: 2.0, flat_tol: 0.1, flat_margin: 0.05, trend_points: 3 }
    }
}

impl Thresholds {
    pub fn validate(&self) -> Result<()> {
        let ok = self.delta_c > 0.0
            && self.c_bound > 1.0
            && self.growth_factor >= 1.0
            && self.flat_tol >= 0.0
            && self.flat_margin >= 0.0
            && self.trend_points >= 2;
        if !ok {
            return Err(Error::InvalidParameter(format!("bad thresholds {self:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Cutoff,
    PrecutoffOnly,
    NoCutoff,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Cutoff => "cutoff",
            Verdict::PrecutoffOnly => "precutoff-only",
            Verdict::NoCutoff => "no-cutoff",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// Map key for an ε value: the shortest decimal that parses back exactly.
pub fn eps_key(eps: f64) -> String {
    format!("{eps}")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyRow {
    pub n: usize,
    pub lambda: Option<f64>,
    pub kappa: Option<f64>,
    pub lambda_prime: Option<f64>,
    /// Mixing time per ε, keyed by [`eps_key`]; failed cells are absent.
    pub mix: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub missing: Option<String>,
}

impl FamilyRow {
    pub fn t(&self, eps: f64) -> Option<f64> {
        self.mix.get(&eps_key(eps)).copied()
    }

    fn spectral(&self) -> Option<SpectralTriple> {
        Some(SpectralTriple { lambda: self.lambda?, kappa: self.kappa?, lambda_prime: self.lambda_prime? })
    }

    fn complete(&self, eps: &[f64]) -> bool {
        self.missing.is_none() && self.spectral().is_some() && eps.iter().all(|&e| self.t(e).is_some())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyTable {
    pub family: String,
    pub spec: String,
    pub time_kind: TimeKind,
    /// Descending.
    pub eps: Vec<f64>,
    pub rows: Vec<FamilyRow>,
    /// Some row or cell failed.
    pub partial: bool,
}

fn profile_row(family: &ChainFamily, n: usize, eps: &[f64], spec: DivergenceSpec, opts: &MixingOptions) -> (FamilyRow, Option<TimeKind>) {
    let mut row = FamilyRow { n, lambda: None, kappa: None, lambda_prime: None, mix: BTreeMap::new(), missing: None };
    let bundle = match (family.builder)(n) {
        Ok(b) => b,
        Err(e) => {
            row.missing = Some(format!("builder: {e}"));
            return (row, None);
        }
    };
    let tk = bundle.time_kind();
    match bundle.spectral() {
        Ok(s) => {
            row.lambda = Some(s.lambda);
            row.kappa = Some(s.kappa);
            row.lambda_prime = Some(s.lambda_prime);
        }
        Err(e) => row.missing = Some(format!("spectral: {e}")),
    }
    let curve = match bundle.curve(spec) {
        Ok(c) => c,
        Err(e) => {
            row.missing = Some(format!("curve: {e}"));
            return (row, Some(tk));
        }
    };
    let mut failures = Vec::new();
    for &e in eps {
        match mixing_time(&curve, e, opts) {
            Ok(m) => {
                row.mix.insert(eps_key(e), m.t);
            }
            Err(err) => failures.push(format!("ε = {e}: {err}")),
        }
    }
    if !failures.is_empty() && row.missing.is_none() {
        row.missing = Some(failures.join("; "));
    }
    (row, Some(tk))
}

/// Mixing times and spectral quantities for every `(n, ε)`; per-n failures
/// are recorded in the row and flag the table as partial.
pub fn family_profile(
    family: &ChainFamily,
    eps_grid: &[f64],
    spec: DivergenceSpec,
    opts: &MixingOptions,
) -> Result<FamilyTable> {
    spec.validate()?;
    if eps_grid.is_empty() {
        return Err(Error::InvalidParameter("ε grid is empty".into()));
    }
    if let Some(e) = eps_grid.iter().find(|e| !(**e > 0.0 && e.is_finite())) {
        return Err(Error::InvalidParameter(format!("ε = {e} must be positive and finite")));
    }
    if spec == DivergenceSpec::TV || spec == DivergenceSpec::Separation {
        if let Some(e) = eps_grid.iter().find(|e| **e >= 1.0) {
            return Err(Error::InvalidParameter(format!("ε = {e} is not below the maximum 1 of {spec}")));
        }
    }
    let mut eps: Vec<f64> = eps_grid.to_vec();
    eps.sort_by(|a, b| b.total_cmp(a));
    if eps.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidParameter("ε grid has duplicates".into()));
    }
    let results: Vec<(FamilyRow, Option<TimeKind>)> =
        family.indices.par_iter().map(|&n| profile_row(family, n, &eps, spec, opts)).collect();
    let time_kind = results.iter().find_map(|(_, tk)| *tk).unwrap_or(TimeKind::Continuized);
    let rows: Vec<FamilyRow> = results.into_iter().map(|(r, _)| r).collect();
    let partial = rows.iter().any(|r| !r.complete(&eps));
    Ok(FamilyTable { family: family.name.clone(), spec: spec.to_string(), time_kind, eps, rows, partial })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioSeries {
    pub eta: f64,
    pub eps: f64,
    /// `t_n(η)/t_n(ε)` per usable index.
    pub ratios: Vec<f64>,
    pub weakly_decreasing: bool,
    pub flat: bool,
    pub final_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductTrend {
    pub eps: f64,
    /// `rate_n · t_n(ε)` per usable index.
    pub values: Vec<f64>,
    pub increasing: bool,
    pub growth: f64,
    pub diverges: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowEstimate {
    pub n: usize,
    pub width: f64,
    pub width_times_lambda: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutoffReport {
    pub family: String,
    pub spec: String,
    pub time_kind: TimeKind,
    pub thresholds: Thresholds,
    pub eps: Vec<f64>,
    pub table: Vec<FamilyRow>,
    pub partial: bool,
    /// Indices of the rows the diagnosis used.
    pub indices: Vec<usize>,
    pub ratios: Vec<RatioSeries>,
    /// `"lambda"` or `"lambda_prime"`.
    pub product_rate: String,
    pub product_trend: Vec<ProductTrend>,
    pub product_condition: bool,
    pub verdict: Verdict,
    pub window: Vec<WindowEstimate>,
}

impl CutoffReport {
    pub fn ratio(&self, eta: f64, eps: f64) -> Option<&RatioSeries> {
        self.ratios.iter().find(|r| r.eta == eta && r.eps == eps)
    }

    pub fn trend(&self, eps: f64) -> Option<&ProductTrend> {
        self.product_trend.iter().find(|p| p.eps == eps)
    }

    /// Long-format CSV of the table: `n,lambda,kappa,lambda_prime,epsilon,t`.
    pub fn table_csv(&self) -> String {
        let mut s = String::from("n,lambda,kappa,lambda_prime,epsilon,t\n");
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for r in &self.table {
            for &e in &self.eps {
                s.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    r.n,
                    opt(r.lambda),
                    opt(r.kappa),
                    opt(r.lambda_prime),
                    e,
                    opt(r.t(e))
                ));
            }
        }
        s
    }
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

/// Apply the decision rule to a table. Uses only the stored table, so a
/// report can be re-derived from its own `table` field.
pub fn cutoff_diagnosis(table: &FamilyTable, thresholds: &Thresholds) -> Result<CutoffReport> {
    thresholds.validate()?;
    let usable: Vec<&FamilyRow> = table.rows.iter().filter(|r| r.complete(&table.eps)).collect();
    if usable.len() < MIN_INDICES {
        return Err(Error::InsufficientIndices(usable.len()));
    }
    let k = thresholds.trend_points.min(usable.len());
    let eps = &table.eps;

    let mut ratios = Vec::new();
    for (i, &e) in eps.iter().enumerate() {
        for &eta in &eps[i + 1..] {
            let rs: Vec<f64> = usable.iter().map(|r| r.t(eta).unwrap() / r.t(e).unwrap()).collect();
            let dev: Vec<f64> = rs.iter().map(|r| r - 1.0).collect();
            let tail = &dev[dev.len() - k..];
            let weakly_decreasing = tail.windows(2).all(|w| w[1] <= w[0] + 1e-12 * w[0].abs().max(1.0));
            let final_deviation = *dev.last().unwrap();
            let rtail = &rs[rs.len() - k..];
            let spread = rtail.iter().copied().fold(f64::NEG_INFINITY, f64::max)
                - rtail.iter().copied().fold(f64::INFINITY, f64::min);
            let flat = spread <= thresholds.flat_tol * final_deviation
                && *rs.last().unwrap() >= 1.0 + thresholds.delta_c + thresholds.flat_margin;
            ratios.push(RatioSeries { eta, eps: e, ratios: rs, weakly_decreasing, flat, final_deviation });
        }
    }

    let discrete = table.time_kind == TimeKind::Discrete;
    let rate = |r: &FamilyRow| if discrete { r.lambda_prime.unwrap() } else { r.lambda.unwrap() };
    let product_trend: Vec<ProductTrend> = eps
        .iter()
        .map(|&e| {
            let values: Vec<f64> = usable.iter().map(|r| rate(r) * r.t(e).unwrap()).collect();
            let increasing = values.windows(2).all(|w| w[1] > w[0]);
            let growth = values.last().unwrap() / values[0];
            let diverges = increasing && growth >= thresholds.growth_factor;
            ProductTrend { eps: e, values, increasing, growth, diverges }
        })
        .collect();
    let product_condition = product_trend.iter().all(|p| p.diverges);

    let window = usable
        .iter()
        .map(|r| {
            let mut w: Vec<f64> = Vec::new();
            for (i, &e) in eps.iter().enumerate() {
                for &eta in &eps[i + 1..] {
                    w.push(r.t(eta).unwrap() - r.t(e).unwrap());
                }
            }
            let width = if w.is_empty() { 0.0 } else { median(&mut w) };
            WindowEstimate { n: r.n, width, width_times_lambda: width * r.lambda.unwrap() }
        })
        .collect();

    let verdict = if ratios.iter().all(|s| s.weakly_decreasing && s.final_deviation <= thresholds.delta_c) {
        Verdict::Cutoff
    } else if ratios.iter().any(|s| s.flat) {
        Verdict::NoCutoff
    } else if ratios.iter().all(|s| s.ratios.iter().all(|&r| r <= thresholds.c_bound)) {
        Verdict::PrecutoffOnly
    } else {
        Verdict::Inconclusive
    };

    Ok(CutoffReport {
        family: table.family.clone(),
        spec: table.spec.clone(),
        time_kind: table.time_kind,
        thresholds: *thresholds,
        eps: eps.clone(),
        table: table.rows.clone(),
        partial: table.partial,
        indices: usable.iter().map(|r| r.n).collect(),
        ratios,
        product_rate: if discrete { "lambda_prime" } else { "lambda" }.into(),
        product_trend,
        product_condition,
        verdict,
        window,
    })
}

/// Re-run the decision rule on the table stored inside a report.
pub fn rediagnose(report: &CutoffReport) -> Result<CutoffReport> {
    let table = FamilyTable {
        family: report.family.clone(),
        spec: report.spec.clone(),
        time_kind: report.time_kind,
        eps: report.eps.clone(),
        rows: report.table.clone(),
        partial: report.partial,
    };
    cutoff_diagnosis(&table, &report.thresholds)
}

/// Profile and diagnose in one call.
pub fn analyze(
    family: &ChainFamily,
    eps_grid: &[f64],
    spec: DivergenceSpec,
    thresholds: &Thresholds,
    opts: &MixingOptions,
) -> Result<CutoffReport> {
    cutoff_diagnosis(&family_profile(family, eps_grid, spec, opts)?, thresholds)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TypeBucket {
    L2Type,
    TvType,
    Kl,
    Separation,
}

impl TypeBucket {
    pub const ALL: [TypeBucket; 4] = [TypeBucket::L2Type, TypeBucket::TvType, TypeBucket::Kl, TypeBucket::Separation];

    /// Representative divergences of each bucket.
    pub fn representatives(&self) -> Vec<DivergenceSpec> {
        match self {
            TypeBucket::L2Type => vec![DivergenceSpec::Lp(2.0), DivergenceSpec::Renyi(2.0), DivergenceSpec::Alpha(1.5)],
            TypeBucket::TvType => vec![DivergenceSpec::TV, DivergenceSpec::Hellinger2],
            TypeBucket::Kl => vec![DivergenceSpec::KL],
            TypeBucket::Separation => vec![DivergenceSpec::Separation],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpecVerdict {
    pub spec: String,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BucketRow {
    pub bucket: TypeBucket,
    pub members: Vec<SpecVerdict>,
    /// The shared verdict, or `None` when members disagree.
    pub verdict: Option<Verdict>,
}

impl BucketRow {
    pub fn agrees(&self) -> bool {
        self.verdict.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypeClassification {
    pub family: String,
    pub rows: Vec<BucketRow>,
    /// Buckets whose shared verdicts differ from one another.
    pub across_bucket_findings: Vec<String>,
}

impl TypeClassification {
    pub fn within_bucket_agreement(&self) -> bool {
        self.rows.iter().all(BucketRow::agrees)
    }

    pub fn verdict(&self, bucket: TypeBucket) -> Option<Verdict> {
        self.rows.iter().find(|r| r.bucket == bucket).and_then(|r| r.verdict)
    }
}

/// One verdict per bucket in `buckets`, from the bucket's representatives.
pub fn classify_types(
    family: &ChainFamily,
    buckets: &[TypeBucket],
    eps_grid: &[f64],
    thresholds: &Thresholds,
    opts: &MixingOptions,
) -> Result<TypeClassification> {
    let mut rows = Vec::new();
    for &bucket in buckets {
        let mut members = Vec::new();
        for spec in bucket.representatives() {
            let report = analyze(family, eps_grid, spec, thresholds, opts)?;
            members.push(SpecVerdict { spec: spec.to_string(), verdict: report.verdict });
        }
        let first = members[0].verdict;
        let verdict = members.iter().all(|m| m.verdict == first).then_some(first);
        rows.push(BucketRow { bucket, members, verdict });
    }
    let mut across_bucket_findings = Vec::new();
    for (i, a) in rows.iter().enumerate() {
        for b in &rows[i + 1..] {
            if let (Some(va), Some(vb)) = (a.verdict, b.verdict) {
                if va != vb {
                    across_bucket_findings.push(format!("{:?}: {va}, {:?}: {vb}", a.bucket, b.bucket));
                }
            }
        }
    }
    Ok(TypeClassification { family: family.name.clone(), rows, across_bucket_findings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::FnBundle;

    fn synthetic(indices: Vec<usize>, shape: fn(f64, f64) -> f64) -> ChainFamily {
        let builder: BundleBuilder = Arc::new(move |n| {
            let nf = n as f64;
            Ok(Box::new(FnBundle {
                label: format!("synthetic(n={n})"),
                time_kind: TimeKind::Continuized,
                spectral: SpectralTriple::new(1.0 / nf, (-1.0 / nf).exp()),
                horizon: 1e4 * nf,
                f: Arc::new(move |_, t| Ok(shape(nf, t))),
            }) as Box<dyn CurveBundle>)
        });
        ChainFamily::new("synthetic", indices, builder).unwrap()
    }

    #[test]
    fn empty_grid_rejected() {
        let f = synthetic(vec![1, 2, 3, 4], |n, t| (-t / n).exp());
        assert!(family_profile(&f, &[], DivergenceSpec::TV, &MixingOptions::default()).is_err());
    }

    #[test]
    fn builder_failure_marks_row() {
        let inner = synthetic(vec![1], |n, t| (-t / n).exp()).builder;
        let builder: BundleBuilder = Arc::new(move |n| {
            if n == 3 {
                Err(Error::InvalidParameter("no".into()))
            } else {
                inner(n)
            }
        });
        let f = ChainFamily::new("f", vec![1, 2, 3, 4, 5], builder).unwrap();
        let t = family_profile(&f, &[0.5, 0.1], DivergenceSpec::KL, &MixingOptions::default()).unwrap();
        assert!(t.partial);
        assert!(t.rows[2].missing.is_some());
        assert!(t.rows[0].missing.is_none());
        let r = cutoff_diagnosis(&t, &Thresholds::default()).unwrap();
        assert_eq!(r.indices, vec![1, 2, 4, 5]);
    }

    #[test]
    fn insufficient_indices() {
        let f = synthetic(vec![1, 2, 3], |n, t| (-t / n).exp());
        let t = family_profile(&f, &[0.5, 0.1], DivergenceSpec::KL, &MixingOptions::default()).unwrap();
        assert_eq!(cutoff_diagnosis(&t, &Thresholds::default()).unwrap_err(), Error::InsufficientIndices(3));
    }

    #[test]
    fn exponential_family_has_no_cutoff() {
        let f = synthetic(vec![4, 8, 16, 32, 64], |n, t| (-t / n).exp());
        let eps = [0.4, 0.25, 0.1, 0.05];
        let t = family_profile(&f, &eps, DivergenceSpec::KL, &MixingOptions::default()).unwrap();
        let r = cutoff_diagnosis(&t, &Thresholds::default()).unwrap();
        assert_eq!(r.verdict, Verdict::NoCutoff);
        let s = r.ratio(0.05, 0.4).unwrap();
        for v in &s.ratios {
            assert!((v - 0.05f64.ln() / 0.4f64.ln()).abs() < 1e-5);
        }
        // λ t(ε) = ln(1/ε) is constant: no product-condition divergence
        assert!(!r.product_condition);
    }

    #[test]
    fn sharpening_profile_has_cutoff() {
        // t(ε) = n ln n + n ln(1/ε): ratios → 1 like 1/ln n
        let f = synthetic(vec![1000, 10_000, 100_000, 1_000_000, 10_000_000], |n, t| {
            (-(t - n * n.ln()) / n).exp().min(1.0)
        });
        let eps = [0.4, 0.1];
        let t = family_profile(&f, &eps, DivergenceSpec::KL, &MixingOptions::default()).unwrap();
        let r = cutoff_diagnosis(&t, &Thresholds::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Cutoff, "{:?}", r.ratios);
        assert!(r.product_condition);
        let w = &r.window[0];
        assert!((w.width_times_lambda - 4f64.ln()).abs() < 1e-4);
    }

    #[test]
    fn report_is_reproducible_from_table() {
        let f = synthetic(vec![2, 4, 8, 16], |n, t| (-t * t / n).exp());
        let r = analyze(&f, &[0.3, 0.1, 0.02], DivergenceSpec::KL, &Thresholds::default(), &MixingOptions::default())
            .unwrap();
        assert_eq!(rediagnose(&r).unwrap(), r);
        let again =
            analyze(&f, &[0.3, 0.1, 0.02], DivergenceSpec::KL, &Thresholds::default(), &MixingOptions::default())
                .unwrap();
        assert_eq!(serde_json::to_string(&r).unwrap(), serde_json::to_string(&again).unwrap());
    }

    #[test]
    fn eps_keys_round_trip() {
        for e in [0.4, 0.25, 0.1, 0.05, 0.02, 0.01, 1e-7] {
            assert_eq!(eps_key(e).parse::<f64>().unwrap(), e);
        }
    }
}
