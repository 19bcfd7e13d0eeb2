//! Binary node attributes: assignment, the degree-attribute joint profile,
//! and friendship-paradox strength metrics.
//!
//! Nodes with attribute value 1 are called active. The degree-attribute
//! correlation is computed from its closed form
//! `rho_kx = P(x=1) (<k>_{x=1} - <k>) / (sigma_x sigma_k)`,
//! which the tests cross-check against a direct Pearson correlation over
//! per-node `(k, x)` pairs.

use std::collections::BTreeMap;
use std::io::{self, BufRead, Write};

use rand::seq::SliceRandom;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{degree_stats, Graph, NodeId};
use crate::rng::rng_from_seed;

/// Per-node binary state. Mutable only through swaps that conserve the
/// active count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttributeAssignment {
    x: Vec<bool>,
    active_count: usize,
}

impl AttributeAssignment {
    pub fn new(x: Vec<bool>) -> AttributeAssignment {
        let active_count = x.iter().filter(|&&b| b).count();
        AttributeAssignment { x, active_count }
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn is_active(&self, v: NodeId) -> bool {
        self.x[v as usize]
    }

    pub fn active_count(&self) -> usize {
        self.active_count
    }

    pub fn active_fraction(&self) -> f64 {
        self.active_count as f64 / self.x.len() as f64
    }

    pub fn active_nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.x
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| i as NodeId)
    }

    /// Exchanges the states of an active and an inactive node.
    pub(crate) fn swap(&mut self, active: NodeId, inactive: NodeId) {
        debug_assert!(self.x[active as usize] && !self.x[inactive as usize]);
        self.x[active as usize] = false;
        self.x[inactive as usize] = true;
    }
}

/// Activates exactly `round(fraction * N)` nodes chosen uniformly without
/// replacement.
pub fn activate_random(g: &Graph, fraction: f64, seed: u64) -> Result<AttributeAssignment> {
    let n = g.node_count();
    let count = (fraction * n as f64).round() as i64;
    if count < 1 || count as usize > n - 1 {
        return Err(Error::DegenerateActivation(format!(
            "fraction {} rounds to {} of {} nodes",
            fraction, count, n
        )));
    }
    let mut rng = rng_from_seed(seed);
    let mut ids: Vec<NodeId> = (0..n as NodeId).collect();
    let (chosen, _) = ids.partial_shuffle(&mut rng, count as usize);
    let mut x = vec![false; n];
    for &v in chosen.iter() {
        x[v as usize] = true;
    }
    Ok(AttributeAssignment::new(x))
}

/// Activates the `round(fraction * N)` highest-degree nodes; ties broken by
/// node id. This is the greedy maximum of `<k>_{x=1}` at fixed count.
pub fn activate_top_degrees(g: &Graph, fraction: f64) -> Result<AttributeAssignment> {
    let n = g.node_count();
    let count = (fraction * n as f64).round() as i64;
    if count < 1 || count as usize > n - 1 {
        return Err(Error::DegenerateActivation(format!(
            "fraction {} rounds to {} of {} nodes",
            fraction, count, n
        )));
    }
    let mut ids: Vec<NodeId> = (0..n as NodeId).collect();
    ids.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
    let mut x = vec![false; n];
    for &v in &ids[..count as usize] {
        x[v as usize] = true;
    }
    Ok(AttributeAssignment::new(x))
}

/// Active and total node counts per degree class; the empirical `P(x=1|k)`.
#[derive(Debug, Clone)]
pub struct ActivationByDegree {
    per_k: BTreeMap<u32, (u64, u64)>,
}

impl ActivationByDegree {
    pub fn from_assignment(g: &Graph, a: &AttributeAssignment) -> ActivationByDegree {
        assert_eq!(g.node_count(), a.len(), "assignment size mismatch");
        let mut per_k: BTreeMap<u32, (u64, u64)> = BTreeMap::new();
        for v in 0..g.node_count() as NodeId {
            let entry = per_k.entry(g.degree(v)).or_insert((0, 0));
            entry.1 += 1;
            if a.is_active(v) {
                entry.0 += 1;
            }
        }
        ActivationByDegree { per_k }
    }

    /// `P(x=1 | k)`. Degrees absent from the graph are an error, never an
    /// implicit zero.
    pub fn p_active_given(&self, k: u32) -> Result<f64> {
        self.per_k
            .get(&k)
            .map(|&(active, total)| active as f64 / total as f64)
            .ok_or(Error::UnobservedDegree(k))
    }

    pub fn map(&self) -> BTreeMap<u32, f64> {
        self.per_k
            .iter()
            .map(|(&k, &(a, t))| (k, a as f64 / t as f64))
            .collect()
    }
}

/// Joint degree-attribute profile of one assignment on one graph.
#[derive(Debug, Clone)]
pub struct AttributeProfile {
    pub p_active: f64,
    pub rho_kx: f64,
    pub sigma_x: f64,
    pub mean_degree_active: f64,
    activation: ActivationByDegree,
}

impl AttributeProfile {
    pub fn p_active_given_k(&self) -> BTreeMap<u32, f64> {
        self.activation.map()
    }

    pub fn p_active_given(&self, k: u32) -> Result<f64> {
        self.activation.p_active_given(k)
    }

    pub fn activation(&self) -> &ActivationByDegree {
        &self.activation
    }
}

/// Computes the attribute profile, including `rho_kx` from the closed form of
/// the degree-attribute correlation.
///
/// Errors when the correlation is undefined: all nodes active, none active,
/// or a regular graph (`sigma_k = 0`).
pub fn attribute_profile(g: &Graph, a: &AttributeAssignment) -> Result<AttributeProfile> {
    assert_eq!(g.node_count(), a.len(), "assignment size mismatch");
    let n = g.node_count();
    let active = a.active_count();
    if active == 0 {
        return Err(Error::CorrelationUndefined("no active nodes"));
    }
    if active == n {
        return Err(Error::CorrelationUndefined("all nodes active"));
    }
    let stats = degree_stats(g);
    let sigma_k = stats.sigma_k();
    if sigma_k <= 0.0 {
        return Err(Error::CorrelationUndefined("regular graph, sigma_k = 0"));
    }
    let p_active = active as f64 / n as f64;
    let sigma_x = (p_active * (1.0 - p_active)).sqrt();
    let active_degree_sum: u64 = a.active_nodes().map(|v| g.degree(v) as u64).sum();
    let mean_degree_active = active_degree_sum as f64 / active as f64;
    let rho_kx = (p_active * (mean_degree_active - stats.mean_degree()) / (sigma_x * sigma_k))
        .clamp(-1.0, 1.0);
    Ok(AttributeProfile {
        p_active,
        rho_kx,
        sigma_x,
        mean_degree_active,
        activation: ActivationByDegree::from_assignment(g, a),
    })
}

/// Friendship-paradox strengths for one configuration.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ParadoxMetrics {
    /// Probability a random neighbor (directed edge end) is active.
    pub neighbor_active_prob: f64,
    /// Probability a random node is active.
    pub node_active_prob: f64,
    /// Generalized friendship paradox strength, `Q(x=1) - P(x=1)`.
    pub gfp_strength: f64,
    /// Friendship paradox strength, `<k>_q - <k>`.
    pub fp_strength: f64,
}

/// Measures both paradox strengths. `Q(x=1)` is the fraction of directed
/// edge ends that point at active nodes.
pub fn paradox_metrics(g: &Graph, a: &AttributeAssignment) -> ParadoxMetrics {
    assert_eq!(g.node_count(), a.len(), "assignment size mismatch");
    let stats = degree_stats(g);
    let active_degree_sum: u64 = a.active_nodes().map(|v| g.degree(v) as u64).sum();
    let neighbor_active_prob = active_degree_sum as f64 / (2 * g.edge_count()) as f64;
    let node_active_prob = a.active_count() as f64 / g.node_count() as f64;
    ParadoxMetrics {
        neighbor_active_prob,
        node_active_prob,
        gfp_strength: neighbor_active_prob - node_active_prob,
        fp_strength: stats.paradox_strength(),
    }
}

/// Writes one `label value` pair per line, sorted by label.
pub fn write_assignment<W: Write>(g: &Graph, a: &AttributeAssignment, mut w: W) -> io::Result<()> {
    let mut rows: Vec<(u64, u8)> = (0..g.node_count() as NodeId)
        .map(|v| (g.label(v), a.is_active(v) as u8))
        .collect();
    rows.sort_unstable();
    for (label, value) in rows {
        writeln!(w, "{} {}", label, value)?;
    }
    Ok(())
}

/// Reads an assignment written by [`write_assignment`]. Every node of the
/// graph must be covered exactly once.
pub fn read_assignment<R: BufRead>(g: &Graph, r: R) -> Result<AttributeAssignment> {
    let mut x = vec![None; g.node_count()];
    let mut seen = 0usize;
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let parse = |tok: Option<&str>| -> Result<u64> {
            tok.ok_or_else(|| Error::Parse {
                line: i + 1,
                message: "expected `label value`".into(),
            })?
            .parse()
            .map_err(|e| Error::Parse {
                line: i + 1,
                message: format!("{e}"),
            })
        };
        let label = parse(tokens.next())?;
        let value = parse(tokens.next())?;
        if value > 1 {
            return Err(Error::Parse {
                line: i + 1,
                message: format!("attribute value must be 0 or 1, got {value}"),
            });
        }
        let v = g
            .labels()
            .binary_search(&label)
            .map_err(|_| Error::UnknownLabel(label))?;
        if x[v].replace(value == 1).is_none() {
            seen += 1;
        }
    }
    if seen != g.node_count() {
        return Err(Error::IncompleteAssignment {
            got: seen,
            expected: g.node_count(),
        });
    }
    Ok(AttributeAssignment::new(
        x.into_iter().map(|b| b.unwrap()).collect(),
    ))
}
