//! Finite-state Markov chains in discrete and continuized time: worst-case
//! divergence curves, spectral and functional constants, mixing times, and
//! empirical cutoff diagnosis for chain families.
//!
//! The entry point is [`FiniteChain`], a validated row-stochastic kernel with
//! its stationary law. Divergences between measures live in [`divergence`],
//! curves `t ↦ max_x D(δ_x P_t ‖ π)` and mixing times in [`curves`].

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` deliberately rejects NaN

pub mod audit;
pub mod bundle;
pub mod chain;
pub mod curves;
pub mod cutoff;
pub mod divergence;
pub mod error;
pub mod fpq;
pub mod functional;
pub mod io;
pub mod linalg;
pub mod product;
pub mod random;
pub mod spectral;
pub mod zoo;

pub use bundle::{CurveBundle, SpectralTriple};
pub use chain::{build_chain, FiniteChain, GeneratorView, TimeKind};
pub use curves::{mixing_time, sample_curve, DivergenceCurve, MixingOptions, MixingTimeResult};
pub use cutoff::{analyze, classify_types, cutoff_diagnosis, family_profile, ChainFamily, CutoffReport, Thresholds, Verdict};
pub use divergence::{divergence, DivergenceSpec};
pub use error::{Error, Result};
pub use product::ProductChain;
pub use spectral::{spectral_summary, SpectralSummary};
