//! Example families with structure-exploiting curves.
//!
//! - [`hypercube`]: lazy walk on `{0,1}^n`, lumped to Hamming weights.
//! - [`pak`]: `Q = (1 − c)P + cΠ` over the discrete hypercube walk.
//! - [`product_example`]: slow coin times fast complete graph, in log space.
//!
//! Every closed form has a dense counterpart for small sizes and the tests
//! compare the two.

pub mod hypercube;
pub mod pak;
pub mod families;
pub mod product_example;

use serde::Serialize;

pub use hypercube::{hypercube, hypercube_chain, hypercube_discrete, hypercube_gap};
pub use pak::{pak_hypercube, pak_identity_pack, pak_transform};
pub use product_example::{product_example, ProductExample};

#[derive(Debug, Clone, Serialize)]
pub struct ZooParameter {
    pub name: &'static str,
    pub description: &'static str,
    pub default: Option<&'static str>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ZooEntry {
    pub name: &'static str,
    pub time_kind: &'static str,
    pub description: &'static str,
    pub parameters: Vec<ZooParameter>,
}

/// The families the `family` and `curve` commands accept by name.
pub fn catalog() -> Vec<ZooEntry> {
    let n = ZooParameter { name: "n", description: "family index list, e.g. 25,50,100", default: None };
    vec![
        ZooEntry {
            name: "hypercube",
            time_kind: "continuized",
            description: "lazy walk on {0,1}^n; lambda = 1/n; curves on n+1 weight classes",
            parameters: vec![n.clone()],
        },
        ZooEntry {
            name: "hypercube-discrete",
            time_kind: "discrete",
            description: "the same walk in discrete time; kappa = 1 - 1/n",
            parameters: vec![n.clone()],
        },
        ZooEntry {
            name: "pak",
            time_kind: "discrete",
            description: "Q_n = (1-c_n) P_n + c_n Pi_n over a discrete base family",
            parameters: vec![
                n.clone(),
                ZooParameter { name: "base", description: "base family; only hypercube", default: Some("hypercube") },
                ZooParameter { name: "cn", description: "expression in n for c_n in (0,1)", default: Some("1/(n*sqrt(ln n))") },
            ],
        },
        ZooEntry {
            name: "product_example",
            time_kind: "continuized",
            description: "two-state chain (weight p_n) times complete graph on g_n states (weight 1-p_n)",
            parameters: vec![
                n,
                ZooParameter { name: "pn", description: "expression in n for p_n in (0,1/2)", default: Some("1/(2*ln n)") },
                ZooParameter { name: "lng", description: "expression in n for ln g_n > 0", default: Some("n*n") },
            ],
        },
    ]
}
