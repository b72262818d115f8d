//! Resolve `--chain FILE` or `--zoo NAME` arguments into chains, curve
//! bundles and families. Everything here runs before any heavy computation,
//! so failures are usage errors.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, ValueEnum};
use cutofflab::bundle::ChainBundle;
use cutofflab::zoo::families::{self, ParamMap};
use cutofflab::zoo::hypercube::{hypercube, hypercube_chain, hypercube_discrete, DENSE_MAX_DIM};
use cutofflab::zoo::pak::{pak_hypercube, pak_transform};
use cutofflab::zoo::product_example::{product_example, ProductExample};
use cutofflab::{ChainFamily, CurveBundle, FiniteChain, TimeKind};

use crate::expr::Expr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TimeArg {
    Continuized,
    Discrete,
}

impl From<TimeArg> for TimeKind {
    fn from(t: TimeArg) -> TimeKind {
        match t {
            TimeArg::Continuized => TimeKind::Continuized,
            TimeArg::Discrete => TimeKind::Discrete,
        }
    }
}

/// Zoo members the commands accept by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZooName {
    Hypercube,
    HypercubeDiscrete,
    Pak,
    Product,
}

impl ZooName {
    pub fn parse(s: &str) -> Result<ZooName> {
        Ok(match s {
            "hypercube" => ZooName::Hypercube,
            "hypercube-discrete" => ZooName::HypercubeDiscrete,
            "pak" => ZooName::Pak,
            "product_example" | "product" => ZooName::Product,
            other => bail!("unknown zoo family '{other}'; see `cutofflab zoo`"),
        })
    }
}

/// Parameters shared by every command that takes a chain.
#[derive(Debug, Clone, Args)]
pub struct SourceArgs {
    /// Chain file: `.json` ({states, kernel, time_kind}) or plain text (n, then n rows).
    #[arg(long, conflicts_with = "zoo")]
    pub chain: Option<PathBuf>,
    /// Time kind for plain-text chain files.
    #[arg(long, value_enum, default_value = "continuized")]
    pub time: TimeArg,
    /// Zoo family name: hypercube, hypercube-discrete, pak, product_example.
    #[arg(long, visible_alias = "family")]
    pub zoo: Option<String>,
    #[command(flatten)]
    pub params: ZooParams,
}

#[derive(Debug, Clone, Args)]
pub struct ZooParams {
    /// Base family of a Pak transform; only `hypercube` is supported.
    #[arg(long, default_value = "hypercube")]
    pub base: String,
    /// c_n for pak, as an expression in n.
    #[arg(long, default_value = "1/(n*sqrt(ln n))")]
    pub cn: String,
    /// p_n for product_example, as an expression in n.
    #[arg(long, default_value = "1/(2*ln n)")]
    pub pn: String,
    /// ln g_n for product_example, as an expression in n.
    #[arg(long, default_value = "n*n")]
    pub lng: String,
}

impl ZooParams {
    fn map(src: &str, what: &str) -> Result<ParamMap> {
        let e = Expr::parse(src).map_err(|e| anyhow!("--{what} '{src}': {e}"))?;
        Ok(Arc::new(move |n| e.eval(n)))
    }

    fn value(src: &str, what: &str, n: usize) -> Result<f64> {
        let e = Expr::parse(src).map_err(|e| anyhow!("--{what} '{src}': {e}"))?;
        e.eval_finite(n as f64).map_err(|e| anyhow!("--{what} '{src}': {e}"))
    }

    fn check_base(&self) -> Result<()> {
        if self.base != "hypercube" {
            bail!("--base '{}' is not supported; only hypercube", self.base);
        }
        Ok(())
    }
}

pub fn load_chain(path: &Path, time: TimeArg) -> Result<FiniteChain> {
    let src = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let chain = if path.extension().is_some_and(|e| e == "json") {
        cutofflab::io::parse_json(&src)
    } else {
        cutofflab::io::parse_text(&src, time.into())
    };
    chain.with_context(|| format!("loading {}", path.display()))
}

/// What a single-chain command operates on.
pub enum Source {
    Chain(FiniteChain, String),
    Zoo(ZooName, usize),
}

impl SourceArgs {
    pub fn resolve(&self, n: Option<usize>) -> Result<Source> {
        match (&self.chain, &self.zoo) {
            (Some(path), _) => Ok(Source::Chain(load_chain(path, self.time)?, path.display().to_string())),
            (None, Some(name)) => {
                let name = ZooName::parse(name)?;
                let n = n.ok_or_else(|| anyhow!("--zoo needs --n"))?;
                if n < 2 {
                    bail!("--n must be at least 2");
                }
                if name == ZooName::Pak {
                    self.params.check_base()?;
                }
                Ok(Source::Zoo(name, n))
            }
            (None, None) => bail!("give either --chain FILE or --zoo NAME"),
        }
    }

    /// Curve bundle for `curve` and `mixing`.
    pub fn bundle(&self, source: Source) -> Result<Box<dyn CurveBundle>> {
        let p = &self.params;
        Ok(match source {
            Source::Chain(chain, label) => Box::new(ChainBundle::new(chain, label)),
            Source::Zoo(ZooName::Hypercube, n) => Box::new(hypercube(n)?),
            Source::Zoo(ZooName::HypercubeDiscrete, n) => Box::new(hypercube_discrete(n)?),
            Source::Zoo(ZooName::Pak, n) => Box::new(pak_hypercube(n, ZooParams::value(&p.cn, "cn", n)?)?),
            Source::Zoo(ZooName::Product, n) => {
                Box::new(product_example(ZooParams::value(&p.pn, "pn", n)?, ZooParams::value(&p.lng, "lng", n)?)?)
            }
        })
    }

    /// Dense chain for `spectral` and `constants`; zoo members must be small.
    pub fn dense(&self, source: Source) -> Result<FiniteChain> {
        let p = &self.params;
        let cube = |n: usize, tk| {
            if n > DENSE_MAX_DIM {
                bail!("dense hypercube needs n ≤ {DENSE_MAX_DIM}, got {n}");
            }
            Ok(hypercube_chain(n, tk)?)
        };
        Ok(match source {
            Source::Chain(chain, _) => chain,
            Source::Zoo(ZooName::Hypercube, n) => cube(n, TimeKind::Continuized)?,
            Source::Zoo(ZooName::HypercubeDiscrete, n) => cube(n, TimeKind::Discrete)?,
            Source::Zoo(ZooName::Pak, n) => {
                pak_transform(&cube(n, TimeKind::Discrete)?, ZooParams::value(&p.cn, "cn", n)?)?
            }
            Source::Zoo(ZooName::Product, n) => {
                ProductExample::new(ZooParams::value(&p.pn, "pn", n)?, ZooParams::value(&p.lng, "lng", n)?)?
                    .dense_chain()?
            }
        })
    }
}

/// Family for the `family` command.
pub fn family(name: &str, indices: Vec<usize>, params: &ZooParams) -> Result<ChainFamily> {
    if indices.iter().any(|&n| n < 2) {
        bail!("family indices must be at least 2");
    }
    Ok(match ZooName::parse(name)? {
        ZooName::Hypercube => families::hypercube_family(indices)?,
        ZooName::HypercubeDiscrete => families::hypercube_discrete_family(indices)?,
        ZooName::Pak => {
            params.check_base()?;
            families::pak_family(indices, ZooParams::map(&params.cn, "cn")?)?
        }
        ZooName::Product => families::product_family(
            indices,
            ZooParams::map(&params.pn, "pn")?,
            ZooParams::map(&params.lng, "lng")?,
        )?,
    })
}
