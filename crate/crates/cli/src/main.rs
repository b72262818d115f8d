//! `cutofflab`: divergence curves, mixing times, spectral and functional
//! constants, cutoff reports for chain families, and the property audit.
//!
//! Exit codes: 0 success, 1 audit violation, 2 usage or invalid input,
//! 3 numerical failure during computation.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod expr;
mod source;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use cutofflab::audit::{self, AuditSizes};
use cutofflab::curves::{mixing_time, sample_curve, uniform_grid, MixingOptions};
use cutofflab::cutoff::{analyze, Thresholds, DEFAULT_EPS_GRID};
use cutofflab::divergence::pointwise;
use cutofflab::functional::{lsi_lower_bound, nonlinear_constant, FunctionalKind, FunctionalOptions};
use cutofflab::spectral::{spectral_gap, spectral_summary};
use cutofflab::{DivergenceSpec, TimeKind};
use num_complex::Complex64;
use serde::Serialize;

use source::{Source, SourceArgs};

const CURVE_HELP: &str = "\
Output: CSV with header `t,value` (worst case over start states), or
`t,value,state` with --state. Values use shortest round-trip decimals;
`inf` marks an infinite divergence.

Divergence tokens: tv, kl, chi2, chip:P, alpha:A, renyi:A, rinf, hell2, js,
lecam, bhatt, lp:P (lp:inf for the sup distance), sep, rrinf.";

const MIXING_HELP: &str = "\
Output: JSON {\"epsilon\", \"t\", \"t_lo\", \"t_hi\"} for one ε, or an array of
such objects for a list. The curve is ≤ ε at t_hi and > ε just before t_lo;
t = t_hi. Discrete chains return integer times with t_hi − t_lo = 1.";

const SPECTRAL_HELP: &str = "\
Output: JSON {\"lambda\", \"kappa\", \"lambda_prime\", \"beta1\", \"gamma1\",
\"eigenvalues\"}. lambda is the spectral gap of (P + P*)/2, kappa the second
singular value of P on L2(pi), lambda_prime = min(1, -ln kappa). beta1 is the
eigenvalue of P of largest modulus below 1 and gamma1 the one of largest real
part below 1; both and every entry of eigenvalues are {\"re\", \"im\"}.";

const CONSTANTS_HELP: &str = "\
Output: JSON {\"p\", \"kind\", \"value\", \"lower_bound\", \"restarts\"}. value is the
smallest quotient found by multi-start descent, an upper bound on the true
constant. lower_bound is a rigorous bound valid for every p on reversible
chains (the spectral gap for poincare, gap/(2 + ln((1-pi_min)/pi_min)) for
lsi), and null for non-reversible chains.";

const FAMILY_HELP: &str = "\
Parameter maps (--cn, --pn, --lng) are expressions in n:
  expr := term (('+'|'-') term)*     term := unary (('*'|'/') unary)*
  unary := '-' unary | primary
  primary := number | n | '(' expr ')' | ln unary | sqrt unary | pow(expr, expr)
e.g. --cn \"1/(n*sqrt(ln n))\".

Output: JSON report {\"family\", \"spec\", \"time_kind\", \"thresholds\", \"eps\",
\"table\": [{\"n\", \"lambda\", \"kappa\", \"lambda_prime\", \"mix\": {eps: t}}],
\"partial\", \"indices\", \"ratios\": [{\"eta\", \"eps\", \"ratios\", \"weakly_decreasing\",
\"flat\", \"final_deviation\"}], \"product_rate\", \"product_trend\": [{\"eps\",
\"values\", \"increasing\", \"growth\", \"diverges\"}], \"product_condition\",
\"verdict\", \"window\": [{\"n\", \"width\", \"width_times_lambda\"}]}. A table row that
failed also carries \"missing\". With --out FILE.json the table is also written
as CSV to FILE.csv with header `n,lambda,kappa,lambda_prime,epsilon,t`.

Verdicts: cutoff, no-cutoff, precutoff-only, inconclusive.";

const AUDIT_HELP: &str = "\
Runs the invariant suite and prints one PASS/FAIL line per audit. Exit code 1
when any audit reports a violation. --out writes a JSON array of
{\"name\", \"checks\", \"violations\", \"worst\", \"tolerance\", \"detail\"}.";

#[derive(Parser)]
#[command(name = "cutofflab", version, about = "Finite Markov chain divergences, mixing times and cutoff diagnosis")]
struct Cli {
    /// Worker threads (default: logical cores).
    #[arg(long, global = true, env = "CUTOFFLAB_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List zoo families and their parameters as JSON.
    Zoo {
        /// Write to this file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample a divergence curve on a uniform time grid.
    #[command(after_help = CURVE_HELP)]
    Curve(CurveArgs),
    /// Mixing times t(ε) = inf{t : d(t) ≤ ε}.
    #[command(after_help = MIXING_HELP)]
    Mixing(MixingArgs),
    /// Spectral summary of a dense chain.
    #[command(after_help = SPECTRAL_HELP)]
    Spectral(SpectralArgs),
    /// Estimate a nonlinear log-Sobolev or Poincaré constant.
    #[command(after_help = CONSTANTS_HELP)]
    Constants(ConstantsArgs),
    /// Mixing-time table and cutoff verdict for a family.
    #[command(after_help = FAMILY_HELP)]
    Family(FamilyArgs),
    /// Run the property audit suite.
    #[command(after_help = AUDIT_HELP)]
    Audit(AuditArgs),
}

#[derive(Args)]
struct CurveArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Zoo index n.
    #[arg(long)]
    n: Option<usize>,
    /// Divergence token: tv, sep, kl, chi2, chip:P, alpha:A, renyi:A, rinf, rrinf, hell2, js, lecam, bhatt, lp:P.
    #[arg(long, default_value = "tv")]
    spec: DivergenceSpec,
    /// Last time on the grid.
    #[arg(long)]
    tmax: f64,
    /// Grid step (default 0.1 continuized, 1 discrete).
    #[arg(long)]
    dt: Option<f64>,
    /// Start state (label or index) or `all`; chain files only.
    #[arg(long)]
    state: Option<String>,
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MixingArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Zoo index n.
    #[arg(long)]
    n: Option<usize>,
    /// Divergence token: tv, sep, kl, chi2, chip:P, alpha:A, renyi:A, rinf, rrinf, hell2, js, lecam, bhatt, lp:P.
    #[arg(long, default_value = "tv")]
    spec: DivergenceSpec,
    /// One ε or a comma-separated list.
    #[arg(long, value_delimiter = ',', required = true)]
    eps: Vec<f64>,
    /// Relative bisection tolerance.
    #[arg(long, default_value_t = 1e-6)]
    rel_tol: f64,
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SpectralArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Zoo index n.
    #[arg(long)]
    n: Option<usize>,
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Lsi,
    Poincare,
}

#[derive(Args)]
struct ConstantsArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Zoo index n.
    #[arg(long)]
    n: Option<usize>,
    /// Exponent p of the functional inequality.
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    /// Log-Sobolev or Poincaré type.
    #[arg(long, value_enum, default_value = "lsi")]
    kind: KindArg,
    /// Random starts of the optimizer.
    #[arg(long, default_value_t = 32)]
    restarts: usize,
    /// Seed for the random starts.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FamilyArgs {
    /// Family name: hypercube, hypercube-discrete, pak, product_example.
    #[arg(long, visible_alias = "family")]
    zoo: String,
    /// Strictly increasing indices, e.g. 25,50,100,200.
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<usize>,
    /// Divergence token: tv, sep, kl, chi2, chip:P, alpha:A, renyi:A, rinf, rrinf, hell2, js, lecam, bhatt, lp:P.
    #[arg(long, default_value = "tv")]
    spec: DivergenceSpec,
    /// ε grid (default 0.4,0.25,0.1,0.05,0.02,0.01).
    #[arg(long, value_delimiter = ',')]
    eps: Vec<f64>,
    #[command(flatten)]
    params: source::ZooParams,
    /// Largest final r − 1 for a cutoff verdict.
    #[arg(long, default_value_t = 0.15)]
    delta_c: f64,
    /// Largest ratio compatible with precutoff.
    #[arg(long, default_value_t = 4.0)]
    ratio_cap: f64,
    /// Required growth of rate·t(ε) across the family.
    #[arg(long, default_value_t = 2.0)]
    growth: f64,
    /// Write the JSON report here and the table next to it as .csv.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AuditArgs {
    /// Seed for the random chains.
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Reduced sample sizes.
    #[arg(long)]
    quick: bool,
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Why a command stopped.
enum Failure {
    Usage(anyhow::Error),
    Numeric(anyhow::Error),
    Audit,
}

trait Phase<T> {
    fn usage(self) -> Result<T, Failure>;
    fn numeric(self) -> Result<T, Failure>;
}

impl<T, E: Into<anyhow::Error>> Phase<T> for Result<T, E> {
    fn usage(self) -> Result<T, Failure> {
        self.map_err(|e| Failure::Usage(e.into()))
    }
    fn numeric(self) -> Result<T, Failure> {
        self.map_err(|e| Failure::Numeric(e.into()))
    }
}

fn emit(out: Option<&Path>, body: &str) -> Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(p, body).with_context(|| format!("writing {}", p.display())).usage(),
        None => std::io::stdout().write_all(body.as_bytes()).context("writing stdout").usage(),
    }
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable output");
    s.push('\n');
    s
}

fn check_eps(spec: DivergenceSpec, eps: &[f64]) -> anyhow::Result<()> {
    for &e in eps {
        if !(e > 0.0 && e.is_finite()) {
            bail!("ε = {e} must be positive");
        }
        if matches!(spec, DivergenceSpec::TV | DivergenceSpec::Separation) && e >= 1.0 {
            bail!("ε = {e} must be below 1 for {spec}");
        }
    }
    Ok(())
}

fn num(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v}")
    }
}

fn run_curve(a: CurveArgs) -> Result<(), Failure> {
    let source = a.source.resolve(a.n).usage()?;
    let per_state = match (&source, &a.state) {
        (Source::Chain(chain, _), Some(s)) if s == "all" => Some((0..chain.n()).collect::<Vec<_>>()),
        (Source::Chain(chain, _), Some(s)) => {
            let idx = chain
                .states()
                .iter()
                .position(|l| l == s)
                .or_else(|| s.parse::<usize>().ok().filter(|&i| i < chain.n()))
                .ok_or_else(|| anyhow!("unknown state '{s}'"))
                .usage()?;
            Some(vec![idx])
        }
        (Source::Zoo(..), Some(_)) => return Err(Failure::Usage(anyhow!("--state needs --chain"))),
        (_, None) => None,
    };
    let time_kind = match &source {
        Source::Chain(c, _) => c.time_kind(),
        Source::Zoo(source::ZooName::Hypercube | source::ZooName::Product, _) => TimeKind::Continuized,
        Source::Zoo(..) => TimeKind::Discrete,
    };
    let dt = a.dt.unwrap_or(if time_kind == TimeKind::Discrete { 1.0 } else { 0.1 });
    if time_kind == TimeKind::Discrete && (dt.fract() != 0.0 || a.tmax.fract() != 0.0) {
        return Err(Failure::Usage(anyhow!("discrete time needs integer --tmax and --dt")));
    }
    let grid = uniform_grid(a.tmax, dt).usage()?;
    // integer multiples of dt: round away the accumulated representation error
    let grid: Vec<f64> = if time_kind == TimeKind::Discrete { grid.iter().map(|t| t.round()).collect() } else { grid };

    let mut body = String::new();
    match (per_state, source) {
        (Some(states), Source::Chain(chain, _)) => {
            body.push_str("t,value,state\n");
            let rows: Vec<Vec<f64>> = {
                use rayon::prelude::*;
                grid.par_iter()
                    .map(|&t| states.iter().map(|&x| pointwise(&chain, x, t, a.spec)).collect())
                    .collect::<cutofflab::Result<_>>()
                    .numeric()?
            };
            for (t, vals) in grid.iter().zip(rows) {
                for (x, v) in states.iter().zip(vals) {
                    body.push_str(&format!("{},{},{}\n", num(*t), num(v), chain.states()[*x]));
                }
            }
        }
        (_, source) => {
            let bundle = a.source.bundle(source).usage()?;
            let curve = bundle.curve(a.spec).usage()?;
            let samples = sample_curve(&curve, &grid).numeric()?;
            body.push_str("t,value\n");
            for (t, v) in samples.points {
                body.push_str(&format!("{},{}\n", num(t), num(v)));
            }
        }
    }
    emit(a.out.as_deref(), &body)
}

#[derive(Serialize)]
struct MixingOut {
    epsilon: f64,
    t: f64,
    t_lo: f64,
    t_hi: f64,
}

fn run_mixing(a: MixingArgs) -> Result<(), Failure> {
    check_eps(a.spec, &a.eps).usage()?;
    if !(a.rel_tol > 0.0) {
        return Err(Failure::Usage(anyhow!("--rel-tol must be positive")));
    }
    let source = a.source.resolve(a.n).usage()?;
    let bundle = a.source.bundle(source).usage()?;
    let curve = bundle.curve(a.spec).usage()?;
    let opts = MixingOptions { rel_tol: a.rel_tol, ..MixingOptions::default() };
    let results: Vec<MixingOut> = a
        .eps
        .iter()
        .map(|&e| mixing_time(&curve, e, &opts).map(|r| MixingOut { epsilon: e, t: r.t, t_lo: r.t_lo, t_hi: r.t_hi }))
        .collect::<cutofflab::Result<_>>()
        .numeric()?;
    let body = if results.len() == 1 { json(&results[0]) } else { json(&results) };
    emit(a.out.as_deref(), &body)
}

#[derive(Serialize)]
struct ComplexOut {
    re: f64,
    im: f64,
}

impl From<Complex64> for ComplexOut {
    fn from(z: Complex64) -> Self {
        ComplexOut { re: z.re, im: z.im }
    }
}

#[derive(Serialize)]
struct SpectralOut {
    lambda: f64,
    kappa: f64,
    lambda_prime: f64,
    beta1: ComplexOut,
    gamma1: ComplexOut,
    eigenvalues: Vec<ComplexOut>,
}

fn run_spectral(a: SpectralArgs) -> Result<(), Failure> {
    let source = a.source.resolve(a.n).usage()?;
    let chain = a.source.dense(source).usage()?;
    let s = spectral_summary(&chain).numeric()?;
    let out = SpectralOut {
        lambda: s.lambda,
        kappa: s.kappa,
        lambda_prime: s.lambda_prime,
        beta1: s.beta1.into(),
        gamma1: s.gamma1.into(),
        eigenvalues: s.eigenvalues.into_iter().map(Into::into).collect(),
    };
    emit(a.out.as_deref(), &json(&out))
}

#[derive(Serialize)]
struct ConstantsOut {
    p: f64,
    kind: FunctionalKind,
    value: f64,
    lower_bound: Option<f64>,
    restarts: usize,
}

fn run_constants(a: ConstantsArgs) -> Result<(), Failure> {
    if !(a.p > 0.0 && a.p.is_finite()) {
        return Err(Failure::Usage(anyhow!("--p must be positive and finite")));
    }
    if a.restarts == 0 {
        return Err(Failure::Usage(anyhow!("--restarts must be at least 1")));
    }
    let source = a.source.resolve(a.n).usage()?;
    let chain = a.source.dense(source).usage()?;
    let opts = FunctionalOptions { restarts: a.restarts, seed: a.seed, ..FunctionalOptions::default() };
    if chain.n() > opts.state_cap {
        return Err(Failure::Usage(anyhow!("chain has {} states; the optimizer handles at most {}", chain.n(), opts.state_cap)));
    }
    let kind = match a.kind {
        KindArg::Lsi => FunctionalKind::Lsi,
        KindArg::Poincare => FunctionalKind::Poincare,
    };
    let est = nonlinear_constant(&chain, a.p, kind, &opts).numeric()?;
    let lower_bound = chain.is_reversible(1e-10).then(|| match kind {
        FunctionalKind::Lsi => lsi_lower_bound(&chain),
        FunctionalKind::Poincare => spectral_gap(&chain),
    });
    let out = ConstantsOut { p: a.p, kind, value: est.value, lower_bound, restarts: est.restarts_used };
    emit(a.out.as_deref(), &json(&out))
}

fn run_family(a: FamilyArgs) -> Result<(), Failure> {
    let eps = if a.eps.is_empty() { DEFAULT_EPS_GRID.to_vec() } else { a.eps.clone() };
    check_eps(a.spec, &eps).usage()?;
    let thresholds =
        Thresholds { delta_c: a.delta_c, c_bound: a.ratio_cap, growth_factor: a.growth, ..Thresholds::default() };
    thresholds.validate().usage()?;
    let family = source::family(&a.zoo, a.n.clone(), &a.params).usage()?;
    let report = analyze(&family, &eps, a.spec, &thresholds, &MixingOptions::default()).numeric()?;
    match &a.out {
        Some(path) => {
            emit(Some(path), &json(&report))?;
            emit(Some(&path.with_extension("csv")), &report.table_csv())
        }
        None => emit(None, &json(&report)),
    }
}

fn run_audit(a: AuditArgs) -> Result<(), Failure> {
    let sizes = if a.quick { AuditSizes::quick() } else { AuditSizes::default() };
    let outcomes = audit::run_all(a.seed, &sizes).numeric()?;
    let mut lines = String::new();
    for o in &outcomes {
        lines.push_str(&format!(
            "{} {}: {} checks, {} violations, worst {:e} (tolerance {:e}){}\n",
            if o.passes() { "PASS" } else { "FAIL" },
            o.name,
            o.checks,
            o.violations,
            o.worst,
            o.tolerance,
            if o.detail.is_empty() { String::new() } else { format!("; {}", o.detail) }
        ));
    }
    emit(None, &lines)?;
    if let Some(path) = &a.out {
        emit(Some(path), &json(&outcomes))?;
    }
    if outcomes.iter().all(|o| o.passes()) {
        Ok(())
    } else {
        Err(Failure::Audit)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match cli.command {
        Command::Zoo { out } => emit(out.as_deref(), &json(&cutofflab::zoo::catalog())),
        Command::Curve(a) => run_curve(a),
        Command::Mixing(a) => run_mixing(a),
        Command::Spectral(a) => run_spectral(a),
        Command::Constants(a) => run_constants(a),
        Command::Family(a) => run_family(a),
        Command::Audit(a) => run_audit(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Audit) => ExitCode::from(1),
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Numeric(e)) => {
            eprintln!("numerical failure: {e:#}");
            ExitCode::from(3)
        }
    }
}

