//! Undirected simple-graph representation and structural statistics.
//!
//! A [`Graph`] is immutable after construction. Node ids are dense
//! `0..node_count()` internally; the original labels from an input file are
//! kept in a remap table. Self-loops and duplicate edges are dropped at build
//! time and the counts recorded in a [`BuildReport`].

use std::collections::BTreeMap;
use std::io::{self, Write};

use serde::Serialize;

use crate::error::{Error, Result};

/// Internal node id, dense in `0..node_count()`.
pub type NodeId = u32;

/// Counts of inputs discarded while building a simple graph.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct BuildReport {
    pub self_loops_dropped: u64,
    pub duplicate_edges_dropped: u64,
}

/// Undirected simple graph: adjacency lists, canonical edge list, degrees and
/// the label remap table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<NodeId>>,
    edges: Vec<(NodeId, NodeId)>,
    degrees: Vec<u32>,
    labels: Vec<u64>,
}

impl Graph {
    /// Builds a graph from an edge list over arbitrary non-negative labels.
    ///
    /// Labels are remapped to dense ids in ascending label order. Nodes are
    /// the endpoints of kept edges, so rebuilding from the emitted edge list
    /// reproduces the graph exactly.
    pub fn from_edge_list(raw: &[(u64, u64)]) -> Result<(Graph, BuildReport)> {
        if raw.is_empty() {
            return Err(Error::EmptyGraph);
        }
        let mut report = BuildReport::default();
        let mut kept: Vec<(u64, u64)> = Vec::with_capacity(raw.len());
        for &(a, b) in raw {
            if a == b {
                report.self_loops_dropped += 1;
            } else {
                kept.push((a.min(b), a.max(b)));
            }
        }
        kept.sort_unstable();
        let before = kept.len();
        kept.dedup();
        report.duplicate_edges_dropped += (before - kept.len()) as u64;
        if kept.is_empty() {
            return Err(Error::EmptyGraph);
        }

        let mut labels: Vec<u64> = kept.iter().flat_map(|&(a, b)| [a, b]).collect();
        labels.sort_unstable();
        labels.dedup();
        let index_of = |label: u64| labels.binary_search(&label).expect("label indexed") as NodeId;

        let edges: Vec<(NodeId, NodeId)> = kept
            .iter()
            .map(|&(a, b)| (index_of(a), index_of(b)))
            .collect();
        Ok((Self::assemble(labels, edges), report))
    }

    /// Builds a graph over an explicit node universe, preserving nodes that
    /// end up isolated. Used by generators and by dataset loading, where the
    /// node set is declared rather than inferred from edges.
    pub fn from_labeled(node_labels: &[u64], raw: &[(u64, u64)]) -> Result<(Graph, BuildReport)> {
        if node_labels.is_empty() {
            return Err(Error::EmptyGraph);
        }
        let mut labels = node_labels.to_vec();
        labels.sort_unstable();
        labels.dedup();
        let lookup = |label: u64| -> Result<NodeId> {
            labels
                .binary_search(&label)
                .map(|i| i as NodeId)
                .map_err(|_| Error::UnknownLabel(label))
        };

        let mut report = BuildReport::default();
        let mut edges: Vec<(NodeId, NodeId)> = Vec::with_capacity(raw.len());
        for &(a, b) in raw {
            if a == b {
                report.self_loops_dropped += 1;
                lookup(a)?;
                continue;
            }
            let (u, v) = (lookup(a)?, lookup(b)?);
            edges.push((u.min(v), u.max(v)));
        }
        edges.sort_unstable();
        let before = edges.len();
        edges.dedup();
        report.duplicate_edges_dropped += (before - edges.len()) as u64;
        if edges.is_empty() {
            return Err(Error::EmptyGraph);
        }
        Ok((Self::assemble(labels, edges), report))
    }

    /// Builds from dense ids `0..n`; labels are the identity map.
    pub fn from_dense_edges(n: usize, raw: &[(NodeId, NodeId)]) -> Result<(Graph, BuildReport)> {
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        let mut report = BuildReport::default();
        let mut edges: Vec<(NodeId, NodeId)> = Vec::with_capacity(raw.len());
        for &(a, b) in raw {
            assert!((a as usize) < n && (b as usize) < n, "node id out of range");
            if a == b {
                report.self_loops_dropped += 1;
            } else {
                edges.push((a.min(b), a.max(b)));
            }
        }
        edges.sort_unstable();
        let before = edges.len();
        edges.dedup();
        report.duplicate_edges_dropped += (before - edges.len()) as u64;
        if edges.is_empty() {
            return Err(Error::EmptyGraph);
        }
        let labels = (0..n as u64).collect();
        Ok((Self::assemble(labels, edges), report))
    }

    /// Rebuilds from already-simple parts. Tuning uses this after edge swaps;
    /// the edge list must be canonical-pair unique with no self-loops.
    pub(crate) fn from_simple_parts(labels: Vec<u64>, mut edges: Vec<(NodeId, NodeId)>) -> Graph {
        for e in edges.iter_mut() {
            *e = (e.0.min(e.1), e.0.max(e.1));
        }
        edges.sort_unstable();
        debug_assert!(edges.windows(2).all(|w| w[0] != w[1]));
        debug_assert!(edges.iter().all(|&(a, b)| a != b));
        Self::assemble(labels, edges)
    }

    fn assemble(labels: Vec<u64>, edges: Vec<(NodeId, NodeId)>) -> Graph {
        let n = labels.len();
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in &edges {
            adjacency[u as usize].push(v);
            adjacency[v as usize].push(u);
        }
        for nbrs in adjacency.iter_mut() {
            nbrs.sort_unstable();
        }
        let degrees = adjacency.iter().map(|a| a.len() as u32).collect();
        Graph {
            adjacency,
            edges,
            degrees,
            labels,
        }
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Canonical edge list: pairs `(u, v)` with `u < v`, ascending.
    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    pub fn degree(&self, v: NodeId) -> u32 {
        self.degrees[v as usize]
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.adjacency[v as usize]
    }

    /// Original label of an internal node id.
    pub fn label(&self, v: NodeId) -> u64 {
        self.labels[v as usize]
    }

    pub fn labels(&self) -> &[u64] {
        &self.labels
    }

    pub fn mean_degree(&self) -> f64 {
        2.0 * self.edge_count() as f64 / self.node_count() as f64
    }

    /// Emits the edge list in the text exchange format: `# nodes: N` header,
    /// one `u v` pair per line over original labels, sorted ascending.
    pub fn write_edge_list<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "# nodes: {}", self.node_count())?;
        let mut lines: Vec<(u64, u64)> = self
            .edges
            .iter()
            .map(|&(u, v)| {
                let (a, b) = (self.label(u), self.label(v));
                (a.min(b), a.max(b))
            })
            .collect();
        lines.sort_unstable();
        for (a, b) in lines {
            writeln!(w, "{} {}", a, b)?;
        }
        Ok(())
    }
}

/// Degree distribution `p(k)`, neighbor-degree distribution `q(k) = k p(k)/<k>`
/// and their moments. Probabilities are derived from exact counts on demand.
#[derive(Debug, Clone)]
pub struct DegreeStats {
    degree_counts: BTreeMap<u32, u64>,
    n: u64,
    /// Total directed edge ends, `sum_k k * count(k) = 2|E|`.
    two_e: u64,
}

impl DegreeStats {
    fn new(g: &Graph) -> DegreeStats {
        let mut degree_counts = BTreeMap::new();
        for &d in g.degrees() {
            *degree_counts.entry(d).or_insert(0u64) += 1;
        }
        DegreeStats {
            degree_counts,
            n: g.node_count() as u64,
            two_e: 2 * g.edge_count() as u64,
        }
    }

    pub fn node_count(&self) -> u64 {
        self.n
    }

    /// Degrees observed in the graph, ascending, with node counts.
    pub fn degree_counts(&self) -> &BTreeMap<u32, u64> {
        &self.degree_counts
    }

    pub fn p(&self, k: u32) -> f64 {
        self.degree_counts.get(&k).map_or(0.0, |&c| c as f64 / self.n as f64)
    }

    pub fn q(&self, k: u32) -> f64 {
        self.degree_counts
            .get(&k)
            .map_or(0.0, |&c| (k as u64 * c) as f64 / self.two_e as f64)
    }

    pub fn p_map(&self) -> BTreeMap<u32, f64> {
        self.degree_counts.keys().map(|&k| (k, self.p(k))).collect()
    }

    pub fn q_map(&self) -> BTreeMap<u32, f64> {
        self.degree_counts.keys().map(|&k| (k, self.q(k))).collect()
    }

    pub fn mean_degree(&self) -> f64 {
        self.two_e as f64 / self.n as f64
    }

    fn moment(&self, pow: u32) -> f64 {
        let total: u128 = self
            .degree_counts
            .iter()
            .map(|(&k, &c)| (k as u128).pow(pow) * c as u128)
            .sum();
        total as f64 / self.n as f64
    }

    /// Population standard deviation of `p(k)`.
    pub fn sigma_k(&self) -> f64 {
        let m1 = self.mean_degree();
        (self.moment(2) - m1 * m1).max(0.0).sqrt()
    }

    /// Mean of `q(k)`; the average degree at the end of a random edge.
    pub fn mean_q_degree(&self) -> f64 {
        let total: u128 = self
            .degree_counts
            .iter()
            .map(|(&k, &c)| (k as u128) * (k as u128) * c as u128)
            .sum();
        total as f64 / self.two_e as f64
    }

    /// Population standard deviation of `q(k)`.
    pub fn sigma_q(&self) -> f64 {
        self.sigma_q_sq().max(0.0).sqrt()
    }

    pub(crate) fn sigma_q_sq(&self) -> f64 {
        let m3: u128 = self
            .degree_counts
            .iter()
            .map(|(&k, &c)| (k as u128).pow(3) * c as u128)
            .sum();
        let mq = self.mean_q_degree();
        m3 as f64 / self.two_e as f64 - mq * mq
    }

    /// Friendship-paradox strength, `<k>_q - <k> = sigma_k^2 / <k>`.
    pub fn paradox_strength(&self) -> f64 {
        self.mean_q_degree() - self.mean_degree()
    }
}

/// Computes the degree distributions and their moments.
pub fn degree_stats(g: &Graph) -> DegreeStats {
    DegreeStats::new(g)
}

/// Joint degree distribution `e(k, k')` over directed edge ends, stored as
/// exact counts out of `2|E|` samples.
#[derive(Debug, Clone)]
pub struct JointDegreeDistribution {
    counts: BTreeMap<(u32, u32), u64>,
    q_counts: BTreeMap<u32, u64>,
    total: u64,
}

impl JointDegreeDistribution {
    pub fn e(&self, k: u32, k_prime: u32) -> f64 {
        self.counts
            .get(&(k, k_prime))
            .map_or(0.0, |&c| c as f64 / self.total as f64)
    }

    /// Marginal `q(k) = sum_{k'} e(k, k')`.
    pub fn q(&self, k: u32) -> f64 {
        self.q_counts.get(&k).map_or(0.0, |&c| c as f64 / self.total as f64)
    }

    pub fn contains_degree(&self, k: u32) -> bool {
        self.q_counts.contains_key(&k)
    }

    /// Non-zero entries as probabilities, ascending in `(k, k')`.
    pub fn iter(&self) -> impl Iterator<Item = ((u32, u32), f64)> + '_ {
        self.counts
            .iter()
            .map(move |(&kk, &c)| (kk, c as f64 / self.total as f64))
    }

    /// Neighbor degrees `k'` seen from degree-`k` ends, with conditional
    /// probabilities `e(k,k')/q(k)`.
    pub fn neighbor_degrees_of(&self, k: u32) -> impl Iterator<Item = (u32, f64)> + '_ {
        let q_count = self.q_counts.get(&k).copied().unwrap_or(0);
        self.counts
            .range((k, 0)..=(k, u32::MAX))
            .map(move |(&(_, kp), &c)| (kp, c as f64 / q_count as f64))
    }
}

/// Tabulates `e(k, k')` from both orientations of every edge.
pub fn joint_degree_distribution(g: &Graph) -> JointDegreeDistribution {
    let mut counts: BTreeMap<(u32, u32), u64> = BTreeMap::new();
    let mut q_counts: BTreeMap<u32, u64> = BTreeMap::new();
    for &(u, v) in g.edges() {
        let (ku, kv) = (g.degree(u), g.degree(v));
        *counts.entry((ku, kv)).or_insert(0) += 1;
        *counts.entry((kv, ku)).or_insert(0) += 1;
        *q_counts.entry(ku).or_insert(0) += 1;
        *q_counts.entry(kv).or_insert(0) += 1;
    }
    JointDegreeDistribution {
        counts,
        q_counts,
        total: 2 * g.edge_count() as u64,
    }
}

/// Degree assortativity: `r = (sum_{kk'} k k' e(k,k') - <k>_q^2) / sigma_q^2`.
///
/// Errors on regular graphs (`sigma_q = 0`), where the coefficient is
/// undefined; sweeps must skip such graphs rather than propagate a NaN.
pub fn assortativity(g: &Graph) -> Result<f64> {
    let stats = degree_stats(g);
    let sigma_q_sq = stats.sigma_q_sq();
    if sigma_q_sq <= 0.0 {
        return Err(Error::AssortativityUndefined);
    }
    // sum over directed ends of k_u * k_v, exact in integers
    let cross: u128 = g
        .edges()
        .iter()
        .map(|&(u, v)| g.degree(u) as u128 * g.degree(v) as u128)
        .sum();
    let mean_cross = (2 * cross) as f64 / (2 * g.edge_count() as u64) as f64;
    let mq = stats.mean_q_degree();
    Ok((mean_cross - mq * mq) / sigma_q_sq)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle4() -> Graph {
        Graph::from_edge_list(&[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap().0
    }

    fn star(leaves: u64) -> Graph {
        let edges: Vec<(u64, u64)> = (1..=leaves).map(|l| (0, l)).collect();
        Graph::from_edge_list(&edges).unwrap().0
    }

    #[test]
    fn four_cycle_degrees() {
        let g = cycle4();
        assert_eq!(g.node_count(), 4);
        assert_eq!(g.edge_count(), 4);
        assert!(g.degrees().iter().all(|&d| d == 2));
    }

    #[test]
    fn drops_self_loops_and_duplicates() {
        let (g, report) = Graph::from_edge_list(&[(0, 1), (0, 1), (2, 2), (1, 2)]).unwrap();
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
        assert_eq!(report.duplicate_edges_dropped, 1);
        assert_eq!(report.self_loops_dropped, 1);
    }

    #[test]
    fn empty_edge_list_is_an_error() {
        assert!(matches!(Graph::from_edge_list(&[]), Err(Error::EmptyGraph)));
        assert!(matches!(
            Graph::from_edge_list(&[(3, 3)]),
            Err(Error::EmptyGraph)
        ));
    }

    #[test]
    fn adjacency_is_symmetric() {
        let g = star(5);
        for u in 0..g.node_count() as NodeId {
            for &v in g.neighbors(u) {
                assert!(g.neighbors(v).contains(&u));
            }
        }
        let degree_sum: u32 = g.degrees().iter().sum();
        assert_eq!(degree_sum as usize, 2 * g.edge_count());
    }

    #[test]
    fn labels_remap_preserves_originals() {
        let (g, _) = Graph::from_edge_list(&[(100, 7), (7, 42)]).unwrap();
        assert_eq!(g.labels(), &[7, 42, 100]);
        assert_eq!(g.degree(0), 2); // label 7 is the middle of the path
    }

    #[test]
    fn star_degree_stats() {
        let g = star(5);
        let s = degree_stats(&g);
        assert!((s.mean_degree() - 10.0 / 6.0).abs() < 1e-12);
        assert!((s.mean_q_degree() - 3.0).abs() < 1e-12);
        let lhs = s.mean_q_degree() - s.mean_degree();
        let rhs = s.sigma_k().powi(2) / s.mean_degree();
        assert!((lhs - rhs).abs() < 1e-9);
    }

    #[test]
    fn complete_graph_has_no_paradox() {
        let mut edges = Vec::new();
        for i in 0..5u64 {
            for j in (i + 1)..5 {
                edges.push((i, j));
            }
        }
        let (g, _) = Graph::from_edge_list(&edges).unwrap();
        let s = degree_stats(&g);
        assert_eq!(s.sigma_k(), 0.0);
        assert!((s.mean_q_degree() - 4.0).abs() < 1e-12);
        assert!((s.mean_degree() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn q_is_degree_weighted_p() {
        let g = star(7);
        let s = degree_stats(&g);
        for (&k, _) in s.degree_counts() {
            let expect = k as f64 * s.p(k) / s.mean_degree();
            assert!((s.q(k) - expect).abs() < 1e-12);
        }
        let p_total: f64 = s.p_map().values().sum();
        let q_total: f64 = s.q_map().values().sum();
        assert!((p_total - 1.0).abs() < 1e-12);
        assert!((q_total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn joint_distribution_four_cycle() {
        let j = joint_degree_distribution(&cycle4());
        assert!((j.e(2, 2) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn joint_distribution_star() {
        let g = star(6);
        let j = joint_degree_distribution(&g);
        assert!((j.e(6, 1) - 0.5).abs() < 1e-12);
        assert!((j.e(1, 6) - 0.5).abs() < 1e-12);
        assert_eq!(j.e(1, 1), 0.0);
    }

    #[test]
    fn joint_distribution_path() {
        let (g, _) = Graph::from_edge_list(&[(0, 1), (1, 2)]).unwrap();
        let j = joint_degree_distribution(&g);
        assert!((j.e(1, 2) - 0.5).abs() < 1e-12);
        assert!((j.e(2, 1) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn joint_marginal_is_q() {
        let (g, _) = Graph::from_edge_list(&[(0, 1), (1, 2), (2, 3), (3, 1), (0, 4)]).unwrap();
        let s = degree_stats(&g);
        let j = joint_degree_distribution(&g);
        for (&k, _) in s.degree_counts() {
            if k > 0 {
                assert!((j.q(k) - s.q(k)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn star_assortativity_is_minus_one() {
        let r = assortativity(&star(9)).unwrap();
        assert!((r + 1.0).abs() < 1e-9);
    }

    #[test]
    fn regular_graph_assortativity_errors() {
        assert!(matches!(
            assortativity(&cycle4()),
            Err(Error::AssortativityUndefined)
        ));
    }

    #[test]
    fn edge_list_roundtrip_is_identity() {
        let (g, _) =
            Graph::from_edge_list(&[(5, 2), (2, 9), (9, 5), (1, 9), (2, 2), (5, 2)]).unwrap();
        let mut buf = Vec::new();
        g.write_edge_list(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let pairs: Vec<(u64, u64)> = text
            .lines()
            .filter(|l| !l.starts_with('#'))
            .map(|l| {
                let mut it = l.split_whitespace();
                (
                    it.next().unwrap().parse().unwrap(),
                    it.next().unwrap().parse().unwrap(),
                )
            })
            .collect();
        let (g2, _) = Graph::from_edge_list(&pairs).unwrap();
        assert_eq!(g, g2);
    }

    #[test]
    fn from_labeled_keeps_isolated_nodes() {
        let (g, _) = Graph::from_labeled(&[0, 1, 2, 3], &[(0, 1)]).unwrap();
        assert_eq!(g.node_count(), 4);
        assert_eq!(g.degree(2), 0);
    }
}
