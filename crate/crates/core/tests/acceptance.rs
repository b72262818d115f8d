//! Acceptance run: one PASS/FAIL line per criterion, each with the measured
//! quantities and the wall time against its budget. Exits nonzero when any
//! criterion fails.

use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use cutofflab::audit;
use cutofflab::curves::MixingOptions;
use cutofflab::cutoff::{analyze, CutoffReport, Thresholds, Verdict, DEFAULT_EPS_GRID};
use cutofflab::functional::FunctionalOptions;
use cutofflab::spectral::spectral_summary;
use cutofflab::zoo::families::{
    default_pak_c, default_product_ln_g, default_product_p, hypercube_family, pak_family, product_family,
};
use cutofflab::zoo::hypercube::{hypercube_chain, hypercube_gap};
use cutofflab::zoo::pak::pak_identity_pack;
use cutofflab::zoo::product_example::ProductExample;
use cutofflab::{DivergenceSpec, Result, TimeKind};

const SEED: u64 = 7;

struct Outcome {
    pass: bool,
    detail: String,
}

fn criterion(name: &str, budget_secs: u64, run: impl FnOnce() -> Result<Outcome>) -> bool {
    let start = Instant::now();
    let out = run();
    let elapsed = start.elapsed();
    let in_time = elapsed <= Duration::from_secs(budget_secs);
    let (pass, detail) = match out {
        Ok(o) => (o.pass && in_time, o.detail),
        Err(e) => (false, format!("error: {e}")),
    };
    println!(
        "{} {name}: {detail}; {:.2}s of {budget_secs}s",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64()
    );
    pass
}

fn report(spec: DivergenceSpec, family: &cutofflab::ChainFamily) -> Result<CutoffReport> {
    analyze(family, &DEFAULT_EPS_GRID, spec, &Thresholds::default(), &MixingOptions::default())
}

fn audit_line(o: &audit::AuditOutcome) -> Outcome {
    let mut detail = format!("{} checks, {} violations, worst {:.3e}", o.checks, o.violations, o.worst);
    if !o.detail.is_empty() {
        detail.push_str(&format!(" (first: {})", o.detail));
    }
    Outcome { pass: o.passes(), detail }
}

fn main() -> ExitCode {
    let mut all = true;

    all &= criterion("hypercube spectral gap", 5, || {
        let mut worst = 0.0f64;
        for n in [2usize, 4, 8, 16, 32] {
            worst = worst.max((hypercube_gap(n)? - 1.0 / n as f64).abs());
        }
        for n in [2usize, 4, 8] {
            let s = spectral_summary(&hypercube_chain(n, TimeKind::Continuized)?)?;
            worst = worst.max((s.lambda - 1.0 / n as f64).abs());
        }
        Ok(Outcome { pass: worst <= 1e-10, detail: format!("max |λ_n − 1/n| = {worst:.2e}") })
    });

    all &= criterion("hypercube cutoff", 120, || {
        let r = report(DivergenceSpec::TV, &hypercube_family(vec![25, 50, 100, 200, 400])?)?;
        let r400 = *r.ratio(0.05, 0.4).expect("pair in grid").ratios.last().unwrap();
        let growth = r.trend(0.25).expect("ε in grid").growth;
        let pass = r.verdict == Verdict::Cutoff && (r400 - 1.0).abs() <= 0.15 && growth >= 2.0;
        Ok(Outcome {
            pass,
            detail: format!("verdict {}, r_400(0.05, 0.4) = {r400:.4}, λt(0.25) growth {growth:.3}×", r.verdict),
        })
    });

    all &= criterion("Pak identities", 10, || {
        let base = hypercube_chain(6, TimeKind::Discrete)?;
        let ts: Vec<f64> = (1..=50).map(|t| t as f64).collect();
        let (_, pack) = pak_identity_pack(&base, 0.1, &ts)?;
        let tv = pack.checks.iter().map(|c| c.tv_defect()).fold(0.0, f64::max);
        let lp = pack.lambda_prime_defect().unwrap_or(f64::INFINITY);
        Ok(Outcome {
            pass: tv <= 1e-10 && lp <= 1e-10,
            detail: format!("max TV defect {tv:.2e}, λ′ defect {lp:.2e}, all identities {:.2e}", pack.worst_defect()),
        })
    });

    all &= criterion("Pak classification", 180, || {
        let f = pak_family(vec![25, 50, 100, 200], Arc::new(default_pak_c))?;
        let tv = report(DivergenceSpec::TV, &f)?;
        let l2 = report(DivergenceSpec::Renyi(2.0), &f)?;
        let r = tv.ratio(0.05, 0.4).unwrap().ratios.clone();
        Ok(Outcome {
            pass: tv.verdict == Verdict::NoCutoff && l2.verdict == Verdict::Cutoff,
            detail: format!(
                "TV {}, R2 {}; TV r(0.05, 0.4) = {:.3?} vs ln η/ln ε = {:.3}",
                tv.verdict,
                l2.verdict,
                r,
                0.05f64.ln() / 0.4f64.ln()
            ),
        })
    });

    all &= criterion("product-chain classification", 60, || {
        let f = product_family(vec![6, 10, 14, 18], Arc::new(default_product_p), Arc::new(default_product_ln_g))?;
        let kl = report(DivergenceSpec::KL, &f)?;
        let l2 = report(DivergenceSpec::Lp(2.0), &f)?;
        let ex = ProductExample::new(0.3, 64f64.ln())?;
        let specs = [
            DivergenceSpec::KL,
            DivergenceSpec::Lp(2.0),
            DivergenceSpec::ChiSquare,
            DivergenceSpec::Renyi(2.0),
            DivergenceSpec::Alpha(1.5),
            DivergenceSpec::RenyiInf,
            DivergenceSpec::TV,
            DivergenceSpec::Separation,
        ];
        let dense = ex.dense_agreement(&specs, &[0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0])?;
        Ok(Outcome {
            pass: kl.verdict == Verdict::NoCutoff && l2.verdict == Verdict::Cutoff && dense <= 1e-8,
            detail: format!("KL {}, L2 {}, dense gap at g = 64: {dense:.2e}", kl.verdict, l2.verdict),
        })
    });

    all &= criterion("divergence property suite", 30, || {
        Ok(audit_line(&audit::divergence_properties(SEED, 1000)?))
    });

    all &= criterion("reversible R∞/R2 identity", 30, || Ok(audit_line(&audit::renyi_inf_identity(SEED, 50)?)));

    let fopts = FunctionalOptions { seed: SEED, ..FunctionalOptions::default() };
    all &= criterion("decay certificates", 120, || Ok(audit_line(&audit::decay_certificates(SEED, 20, &fopts)?)));

    all &= criterion("functional constants", 300, || {
        Ok(audit_line(&audit::functional_constants(SEED, 20, &fopts)?))
    });

    all &= criterion("perturbation suite", 60, || Ok(audit_line(&audit::perturbation_suite(SEED, 100)?)));

    all &= criterion("non-normal lower bounds", 60, || Ok(audit_line(&audit::eigenvalue_lower_bounds(SEED, 50)?)));

    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
