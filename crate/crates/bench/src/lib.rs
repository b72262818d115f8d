//! Shared fixtures for the criterion benchmarks under `benches/`.

use cutofflab::random::{random_general, random_reversible, rng};
use cutofflab::{FiniteChain, TimeKind};

/// Seeded reversible chain on `n` states.
pub fn reversible(n: usize, time_kind: TimeKind) -> FiniteChain {
    random_reversible(&mut rng(1, n as u64), n, time_kind).expect("generator yields a valid chain")
}

/// Seeded non-reversible chain on `n` states.
pub fn general(n: usize, time_kind: TimeKind) -> FiniteChain {
    random_general(&mut rng(2, n as u64), n, time_kind).expect("generator yields a valid chain")
}
