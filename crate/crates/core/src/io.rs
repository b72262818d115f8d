//! Chain import and export.
//!
//! Plain text: first line `n`, then `n` rows of `n` whitespace-separated
//! decimals. Time kind is supplied by the caller.
//!
//! JSON: `{"states": [...], "kernel": [[...]], "time_kind": "discrete"|"continuized"}`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::chain::{FiniteChain, TimeKind};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChainJson {
    pub states: Vec<String>,
    pub kernel: Vec<Vec<f64>>,
    pub time_kind: TimeKind,
}

pub fn parse_text(src: &str, time_kind: TimeKind) -> Result<FiniteChain> {
    let mut tokens = src.split_whitespace();
    let n: usize = tokens
        .next()
        .ok_or_else(|| Error::Parse("empty input".into()))?
        .parse()
        .map_err(|e| Error::Parse(format!("bad state count: {e}")))?;
    let mut vals = Vec::with_capacity(n * n);
    for tok in tokens {
        vals.push(tok.parse::<f64>().map_err(|e| Error::Parse(format!("bad entry '{tok}': {e}")))?);
    }
    if vals.len() != n * n {
        return Err(Error::Parse(format!("expected {} entries, found {}", n * n, vals.len())));
    }
    FiniteChain::new(DMatrix::from_row_slice(n, n, &vals), time_kind)
}

pub fn to_text(chain: &FiniteChain) -> String {
    let n = chain.n();
    let mut out = format!("{n}\n");
    for i in 0..n {
        let row: Vec<String> = (0..n).map(|j| format!("{:e}", chain.kernel()[(i, j)])).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

pub fn parse_json(src: &str) -> Result<FiniteChain> {
    let doc: ChainJson = serde_json::from_str(src).map_err(|e| Error::Parse(e.to_string()))?;
    from_json(doc)
}

pub fn from_json(doc: ChainJson) -> Result<FiniteChain> {
    let n = doc.kernel.len();
    for row in &doc.kernel {
        if row.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: row.len() });
        }
    }
    let k = DMatrix::from_fn(n, n, |i, j| doc.kernel[i][j]);
    let states = if doc.states.is_empty() { (0..n).map(|i| i.to_string()).collect() } else { doc.states };
    FiniteChain::with_states(states, k, doc.time_kind)
}

pub fn to_json(chain: &FiniteChain) -> ChainJson {
    let n = chain.n();
    ChainJson {
        states: chain.states().to_vec(),
        kernel: (0..n).map(|i| (0..n).map(|j| chain.kernel()[(i, j)]).collect()).collect(),
        time_kind: chain.time_kind(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let c = parse_text("2\n0.8 0.2\n0.3 0.7\n", TimeKind::Discrete).unwrap();
        let back = parse_text(&to_text(&c), TimeKind::Discrete).unwrap();
        assert_eq!(c.kernel(), back.kernel());
    }

    #[test]
    fn text_errors() {
        assert!(matches!(parse_text("", TimeKind::Discrete), Err(Error::Parse(_))));
        assert!(matches!(parse_text("2\n1 0 0", TimeKind::Discrete), Err(Error::Parse(_))));
        assert!(matches!(parse_text("2\n1 0 x 1", TimeKind::Discrete), Err(Error::Parse(_))));
    }

    #[test]
    fn json_round_trip() {
        let src = r#"{"states":["a","b"],"kernel":[[0.5,0.5],[0.25,0.75]],"time_kind":"continuized"}"#;
        let c = parse_json(src).unwrap();
        assert_eq!(c.states(), &["a".to_string(), "b".to_string()]);
        assert_eq!(c.time_kind(), TimeKind::Continuized);
        let again = serde_json::to_string(&to_json(&c)).unwrap();
        assert_eq!(parse_json(&again).unwrap().kernel(), c.kernel());
    }
}
