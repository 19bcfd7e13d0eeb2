//! Measurement and modeling of the majority illusion: the condition where a
//! globally rare binary attribute appears locally common because the nodes
//! carrying it sit disproportionately in other nodes' neighborhoods.
//!
//! The crate provides:
//!
//! - a simple undirected [`graph::Graph`] with degree distributions, joint
//!   degree distribution and assortativity;
//! - synthetic [`generators`] (configuration model on power-law degree
//!   sequences, Erdős–Rényi);
//! - binary [`attributes`] with degree-attribute correlation and
//!   friendship-paradox metrics;
//! - Monte-Carlo [`tuning`] of assortativity and degree-attribute
//!   correlation;
//! - the [`illusion`] measurements: empirical fraction, mean-field model,
//!   Gaussian approximation and threshold cascades;
//! - dataset [`ingest`] with provenance, and the [`sweep`] experiment
//!   harness behind the `netillusion` CLI.

pub mod attributes;
pub mod error;
pub mod generators;
pub mod graph;
pub mod illusion;
pub mod ingest;
pub mod rng;
pub mod sweep;
pub mod tuning;

pub use error::{Error, Result};
