//! Dataset loading: SNAP-style edge lists and a minimal GML subset, plus the
//! preprocessing pipeline (mutual-link reduction, largest connected
//! component, simplification) with per-step provenance.
//!
//! The library never touches the network; `scripts/fetch_datasets.sh`
//! downloads the real-world files into the data directory.

use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{assortativity, BuildReport, Graph, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    EdgeList,
    Gml,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PreprocessStep {
    /// Keep an edge only when both directions are present (directed input).
    Mutualize,
    /// Restrict to the largest connected component.
    LargestComponent,
    /// Drop self-loops and collapse duplicate edges.
    Simplify,
}

impl PreprocessStep {
    fn name(self) -> &'static str {
        match self {
            PreprocessStep::Mutualize => "mutualize",
            PreprocessStep::LargestComponent => "largest_component",
            PreprocessStep::Simplify => "simplify",
        }
    }
}

/// Where a dataset lives and how to normalize it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetSpec {
    pub name: String,
    pub path: PathBuf,
    pub format: Format,
    #[serde(default)]
    pub directed: bool,
    #[serde(default)]
    pub preprocessing: Vec<PreprocessStep>,
}

impl DatasetSpec {
    pub fn validate(&self) -> Result<()> {
        if self.preprocessing.contains(&PreprocessStep::Mutualize) && !self.directed {
            return Err(Error::InvalidConfig(format!(
                "dataset {}: mutualize is only valid for directed input",
                self.name
            )));
        }
        Ok(())
    }

    pub fn from_toml_file(path: &Path) -> Result<DatasetSpec> {
        let text = std::fs::read_to_string(path)?;
        let spec: DatasetSpec = toml::from_str(&text)?;
        spec.validate()?;
        Ok(spec)
    }
}

/// Node and edge counts after one preprocessing step.
#[derive(Debug, Clone, Serialize)]
pub struct StepRecord {
    pub step: String,
    pub nodes: u64,
    pub edges: u64,
}

/// What the loader did, step by step, and what came out.
#[derive(Debug, Clone, Serialize)]
pub struct ProvenanceReport {
    pub dataset: String,
    pub raw_nodes: u64,
    pub raw_edges: u64,
    pub steps: Vec<StepRecord>,
    pub build: BuildReport,
    pub final_nodes: u64,
    pub final_edges: u64,
    pub mean_degree: f64,
    pub assortativity: Option<f64>,
    pub warnings: Vec<String>,
}

/// Edge data as parsed, before any preprocessing. `nodes` is the explicit
/// universe when the input declares one (GML node blocks, or a `# nodes:`
/// header over dense labels); otherwise the endpoints define the node set.
#[derive(Debug, Clone)]
struct WorkingSet {
    nodes: Option<Vec<u64>>,
    edges: Vec<(u64, u64)>,
    directed: bool,
}

impl WorkingSet {
    fn node_count(&self) -> u64 {
        match &self.nodes {
            Some(nodes) => nodes.len() as u64,
            None => {
                let distinct: HashSet<u64> =
                    self.edges.iter().flat_map(|&(a, b)| [a, b]).collect();
                distinct.len() as u64
            }
        }
    }
}

/// Raw edges plus the declared node count when the file carries one.
pub type ParsedEdgeList = (Vec<(u64, u64)>, Option<u64>);

/// Declared node ids, edges, and the directed flag.
pub type ParsedGml = (Vec<u64>, Vec<(u64, u64)>, bool);

/// Parses the text edge-list format: one edge per line, two whitespace
/// separated integer tokens, `#` lines ignored. A `# nodes: N` header is
/// honored as the node universe when all labels are dense in `0..N`.
pub fn parse_edge_list<R: Read>(reader: R) -> Result<ParsedEdgeList> {
    let mut edges = Vec::new();
    let mut declared: Option<u64> = None;
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(comment) = trimmed.strip_prefix('#') {
            if declared.is_none() {
                declared = parse_declared_nodes(comment);
            }
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let parse = |tok: Option<&str>| -> Result<u64> {
            tok.ok_or_else(|| Error::Parse {
                line: i + 1,
                message: "expected two node ids".into(),
            })?
            .parse()
            .map_err(|e| Error::Parse {
                line: i + 1,
                message: format!("{e}"),
            })
        };
        let a = parse(tokens.next())?;
        let b = parse(tokens.next())?;
        edges.push((a, b));
    }
    Ok((edges, declared))
}

/// Extracts `N` from comments like `nodes: 123` or SNAP's `Nodes: 9877
/// Edges: 25998` (first integer after a token starting with "nodes").
fn parse_declared_nodes(comment: &str) -> Option<u64> {
    let mut tokens = comment.split_whitespace();
    while let Some(tok) = tokens.next() {
        let lowered = tok.to_ascii_lowercase();
        if lowered == "nodes" || lowered == "nodes:" {
            let next = tokens.next()?;
            return next.trim_end_matches(':').parse().ok();
        }
    }
    None
}

/// Minimal GML reader: node `id`s, edge `source`/`target` pairs and the
/// `directed` flag. Every other attribute is skipped.
pub fn parse_gml<R: Read>(reader: R) -> Result<ParsedGml> {
    let mut text = String::new();
    BufReader::new(reader).read_to_string(&mut text)?;
    let tokens = tokenize_gml(&text);

    let mut nodes = Vec::new();
    let mut edges = Vec::new();
    let mut directed = false;
    let mut stack: Vec<String> = Vec::new();
    let mut pending_key: Option<String> = None;
    let mut node_id: Option<u64> = None;
    let mut edge_ends: (Option<u64>, Option<u64>) = (None, None);

    for token in tokens {
        match token.as_str() {
            "[" => {
                stack.push(pending_key.take().unwrap_or_default());
                if stack.last().map(String::as_str) == Some("node") {
                    node_id = None;
                } else if stack.last().map(String::as_str) == Some("edge") {
                    edge_ends = (None, None);
                }
            }
            "]" => {
                let closed = stack.pop().ok_or_else(|| Error::Parse {
                    line: 0,
                    message: "unbalanced ] in gml".into(),
                })?;
                match closed.as_str() {
                    "node" => nodes.push(node_id.ok_or_else(|| Error::Parse {
                        line: 0,
                        message: "gml node without id".into(),
                    })?),
                    "edge" => {
                        let (s, t) = edge_ends;
                        let s = s.ok_or_else(|| Error::Parse {
                            line: 0,
                            message: "gml edge without source".into(),
                        })?;
                        let t = t.ok_or_else(|| Error::Parse {
                            line: 0,
                            message: "gml edge without target".into(),
                        })?;
                        edges.push((s, t));
                    }
                    _ => {}
                }
                pending_key = None;
            }
            _ => {
                if let Some(key) = pending_key.take() {
                    // key/value pair
                    let context = stack.last().map(String::as_str).unwrap_or_default();
                    let value = token.parse::<u64>().ok();
                    match (context, key.as_str()) {
                        ("node", "id") => node_id = value,
                        ("edge", "source") => edge_ends.0 = value,
                        ("edge", "target") => edge_ends.1 = value,
                        ("graph", "directed") => directed = value == Some(1),
                        _ => {}
                    }
                } else {
                    pending_key = Some(token);
                }
            }
        }
    }
    if !stack.is_empty() {
        return Err(Error::Parse {
            line: 0,
            message: "unbalanced [ in gml".into(),
        });
    }
    nodes.sort_unstable();
    nodes.dedup();
    Ok((nodes, edges, directed))
}

fn tokenize_gml(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if c == '[' || c == ']' {
            chars.next();
            tokens.push(c.to_string());
        } else if c == '"' {
            chars.next();
            let mut s = String::new();
            for ch in chars.by_ref() {
                if ch == '"' {
                    break;
                }
                s.push(ch);
            }
            tokens.push(s);
        } else {
            let mut s = String::new();
            while let Some(&ch) = chars.peek() {
                if ch.is_whitespace() || ch == '[' || ch == ']' {
                    break;
                }
                s.push(ch);
                chars.next();
            }
            tokens.push(s);
        }
    }
    tokens
}

/// Keeps an undirected pair only when both directed orientations are present.
/// Output pairs are canonical `(min, max)`, sorted, deduplicated.
pub fn mutualize(directed_edges: &[(u64, u64)]) -> Vec<(u64, u64)> {
    let forward: HashSet<(u64, u64)> = directed_edges.iter().copied().collect();
    let mut kept: Vec<(u64, u64)> = directed_edges
        .iter()
        .filter(|&&(a, b)| forward.contains(&(b, a)))
        .map(|&(a, b)| (a.min(b), a.max(b)))
        .collect();
    kept.sort_unstable();
    kept.dedup();
    kept
}

fn simplify_pairs(edges: &[(u64, u64)]) -> Vec<(u64, u64)> {
    let mut out: Vec<(u64, u64)> = edges
        .iter()
        .filter(|&&(a, b)| a != b)
        .map(|&(a, b)| (a.min(b), a.max(b)))
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Induced subgraph on the largest connected component. Ties between equal
/// sized components are broken by the smallest minimum original node label.
pub fn largest_component(g: &Graph) -> Graph {
    let n = g.node_count();
    let mut component = vec![usize::MAX; n];
    let mut members: Vec<Vec<NodeId>> = Vec::new();
    for start in 0..n as NodeId {
        if component[start as usize] != usize::MAX {
            continue;
        }
        let id = members.len();
        let mut frontier = vec![start];
        component[start as usize] = id;
        let mut comp = vec![start];
        while let Some(v) = frontier.pop() {
            for &u in g.neighbors(v) {
                if component[u as usize] == usize::MAX {
                    component[u as usize] = id;
                    frontier.push(u);
                    comp.push(u);
                }
            }
        }
        members.push(comp);
    }
    let best = members
        .iter()
        .enumerate()
        .min_by_key(|(_, comp)| {
            let min_label = comp.iter().map(|&v| g.label(v)).min().unwrap();
            (std::cmp::Reverse(comp.len()), min_label)
        })
        .map(|(i, _)| i)
        .expect("graph is nonempty");

    let labels: Vec<u64> = members[best].iter().map(|&v| g.label(v)).collect();
    let edges: Vec<(u64, u64)> = g
        .edges()
        .iter()
        .filter(|&&(u, v)| component[u as usize] == best && component[v as usize] == best)
        .map(|&(u, v)| (g.label(u), g.label(v)))
        .collect();
    Graph::from_labeled(&labels, &edges)
        .expect("largest component of a nonempty graph has an edge")
        .0
}

/// Largest component on a raw labeled pair list, used mid-pipeline before
/// the graph is built. Isolated declared nodes form singleton components.
fn largest_component_pairs(state: &WorkingSet) -> WorkingSet {
    let mut labels: Vec<u64> = match &state.nodes {
        Some(nodes) => nodes.clone(),
        None => state.edges.iter().flat_map(|&(a, b)| [a, b]).collect(),
    };
    labels.sort_unstable();
    labels.dedup();
    let index: HashMap<u64, usize> = labels.iter().enumerate().map(|(i, &l)| (l, i)).collect();

    let mut dsu: Vec<usize> = (0..labels.len()).collect();
    fn find(dsu: &mut [usize], mut v: usize) -> usize {
        while dsu[v] != v {
            dsu[v] = dsu[dsu[v]];
            v = dsu[v];
        }
        v
    }
    for &(a, b) in &state.edges {
        let (ra, rb) = (find(&mut dsu, index[&a]), find(&mut dsu, index[&b]));
        if ra != rb {
            dsu[ra] = rb;
        }
    }
    let mut groups: HashMap<usize, (usize, u64)> = HashMap::new();
    for (i, &label) in labels.iter().enumerate() {
        let root = find(&mut dsu, i);
        let entry = groups.entry(root).or_insert((0, label));
        entry.0 += 1;
        entry.1 = entry.1.min(label);
    }
    let best_root = *groups
        .iter()
        .min_by_key(|(_, &(size, min_label))| (std::cmp::Reverse(size), min_label))
        .expect("nonempty")
        .0;

    let keep: HashSet<u64> = labels
        .iter()
        .enumerate()
        .filter(|&(i, _)| find(&mut dsu, i) == best_root)
        .map(|(_, &l)| l)
        .collect();
    WorkingSet {
        nodes: Some(keep.iter().copied().collect()),
        edges: state
            .edges
            .iter()
            .filter(|&&(a, b)| keep.contains(&a) && keep.contains(&b))
            .copied()
            .collect(),
        directed: state.directed,
    }
}

/// Loads, preprocesses in the listed order, builds the simple graph, and
/// verifies against the known statistics table when the dataset is one of
/// the studied networks (warning-level by default).
pub fn load_dataset(spec: &DatasetSpec, data_root: &Path) -> Result<(Graph, ProvenanceReport)> {
    spec.validate()?;
    let path = if spec.path.is_absolute() {
        spec.path.clone()
    } else {
        data_root.join(&spec.path)
    };
    let file = File::open(&path).map_err(|e| {
        Error::InvalidConfig(format!("dataset {}: cannot open {}: {e}", spec.name, path.display()))
    })?;

    let mut state = match spec.format {
        Format::EdgeList => {
            let (edges, declared) = parse_edge_list(file)?;
            let nodes = declared.and_then(|n| {
                let dense = edges.iter().all(|&(a, b)| a < n && b < n);
                dense.then(|| (0..n).collect())
            });
            WorkingSet {
                nodes,
                edges,
                directed: spec.directed,
            }
        }
        Format::Gml => {
            let (nodes, edges, _gml_directed) = parse_gml(file)?;
            WorkingSet {
                nodes: Some(nodes),
                edges,
                directed: spec.directed,
            }
        }
    };

    let raw_nodes = state.node_count();
    let raw_edges = state.edges.len() as u64;
    let mut steps = Vec::new();
    for &step in &spec.preprocessing {
        state = match step {
            PreprocessStep::Mutualize => {
                if !state.directed {
                    return Err(Error::InvalidConfig(
                        "mutualize applied to undirected data".into(),
                    ));
                }
                WorkingSet {
                    nodes: state.nodes.clone(),
                    edges: mutualize(&state.edges),
                    directed: false,
                }
            }
            PreprocessStep::Simplify => WorkingSet {
                nodes: state.nodes.clone(),
                edges: simplify_pairs(&state.edges),
                directed: false,
            },
            PreprocessStep::LargestComponent => largest_component_pairs(&state),
        };
        steps.push(StepRecord {
            step: step.name().to_string(),
            nodes: state.node_count(),
            edges: state.edges.len() as u64,
        });
    }

    let (graph, build) = match &state.nodes {
        Some(nodes) => Graph::from_labeled(nodes, &state.edges)?,
        None => Graph::from_edge_list(&state.edges)?,
    };
    let r = assortativity(&graph).ok();
    let mut report = ProvenanceReport {
        dataset: spec.name.clone(),
        raw_nodes,
        raw_edges,
        steps,
        build,
        final_nodes: graph.node_count() as u64,
        final_edges: graph.edge_count() as u64,
        mean_degree: graph.mean_degree(),
        assortativity: r,
        warnings: Vec::new(),
    };
    if let Some(expected) = known_expectation(&spec.name) {
        report.warnings = expected.compare(&report);
    }
    Ok((graph, report))
}

/// Published statistics for the studied real-world networks.
#[derive(Debug, Clone, Copy)]
pub struct DatasetExpectation {
    pub nodes: u64,
    pub edges: u64,
    pub mean_degree: f64,
    pub assortativity: f64,
}

impl DatasetExpectation {
    pub const MEAN_DEGREE_TOL: f64 = 0.05;
    pub const ASSORTATIVITY_TOL: f64 = 0.0005;

    pub fn compare(&self, report: &ProvenanceReport) -> Vec<String> {
        let mut warnings = Vec::new();
        if report.final_nodes != self.nodes {
            warnings.push(format!(
                "nodes: got {}, table says {}",
                report.final_nodes, self.nodes
            ));
        }
        if report.final_edges != self.edges {
            warnings.push(format!(
                "edges: got {}, table says {}",
                report.final_edges, self.edges
            ));
        }
        if (report.mean_degree - self.mean_degree).abs() > Self::MEAN_DEGREE_TOL {
            warnings.push(format!(
                "mean degree: got {:.4}, table says {:.1}",
                report.mean_degree, self.mean_degree
            ));
        }
        match report.assortativity {
            Some(r) if (r - self.assortativity).abs() <= Self::ASSORTATIVITY_TOL => {}
            Some(r) => warnings.push(format!(
                "assortativity: got {:.4}, table says {:.4}",
                r, self.assortativity
            )),
            None => warnings.push("assortativity undefined".into()),
        }
        warnings
    }
}

/// Table values for the studied datasets, keyed by the conventional names
/// used in the shipped dataset specs.
pub fn known_expectation(name: &str) -> Option<DatasetExpectation> {
    match name {
        "hepth" => Some(DatasetExpectation {
            nodes: 9_877,
            edges: 25_998,
            mean_degree: 5.3,
            assortativity: 0.2283,
        }),
        "digg" => Some(DatasetExpectation {
            nodes: 25_454,
            edges: 175_892,
            mean_degree: 13.8,
            assortativity: 0.1160,
        }),
        "blogs" => Some(DatasetExpectation {
            nodes: 1_490,
            edges: 19_090,
            mean_degree: 25.6,
            assortativity: -0.2212,
        }),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mutualize_keeps_reciprocal_pairs_once() {
        assert_eq!(mutualize(&[(0, 1), (1, 0), (1, 2)]), vec![(0, 1)]);
        assert!(mutualize(&[(0, 1), (1, 2), (2, 0)]).is_empty());
        assert_eq!(
            mutualize(&[(0, 1), (1, 0), (1, 2), (2, 1)]),
            vec![(0, 1), (1, 2)]
        );
    }

    #[test]
    fn edge_list_parser_skips_comments() {
        let text = "# Nodes: 4 Edges: 3\n0 1\n\n1 2\n# trailing comment\n2 3\n";
        let (edges, declared) = parse_edge_list(text.as_bytes()).unwrap();
        assert_eq!(edges, vec![(0, 1), (1, 2), (2, 3)]);
        assert_eq!(declared, Some(4));
    }

    #[test]
    fn edge_list_parse_error_carries_line() {
        let err = parse_edge_list("0 1\nbogus\n".as_bytes()).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn gml_minimal_parse() {
        let text = r#"
            graph [
              directed 1
              node [ id 1 label "a b [c]" value 1 ]
              node [ id 2 ]
              node [ id 3 extra [ nested 4 ] ]
              edge [ source 1 target 2 ]
              edge [ source 2 target 3 weight 2 ]
            ]
        "#;
        let (nodes, edges, directed) = parse_gml(text.as_bytes()).unwrap();
        assert_eq!(nodes, vec![1, 2, 3]);
        assert_eq!(edges, vec![(1, 2), (2, 3)]);
        assert!(directed);
    }

    #[test]
    fn largest_component_tie_breaks_on_min_label() {
        // two triangles; the one containing label 0 wins the tie
        let (g, _) =
            Graph::from_edge_list(&[(5, 6), (6, 7), (7, 5), (0, 1), (1, 2), (2, 0)]).unwrap();
        let lcc = largest_component(&g);
        assert_eq!(lcc.labels(), &[0, 1, 2]);
    }

    #[test]
    fn largest_component_of_connected_graph_is_identity() {
        let (g, _) = Graph::from_edge_list(&[(0, 1), (1, 2), (2, 3)]).unwrap();
        assert_eq!(largest_component(&g), g);
    }

    #[test]
    fn largest_component_drops_satellites() {
        let (g, _) = Graph::from_edge_list(&[(0, 1), (0, 2), (0, 3), (7, 8)]).unwrap();
        let lcc = largest_component(&g);
        assert_eq!(lcc.labels(), &[0, 1, 2, 3]);
        assert_eq!(lcc.edge_count(), 3);
    }

    #[test]
    fn declared_nodes_header_parsing() {
        assert_eq!(parse_declared_nodes(" nodes: 10"), Some(10));
        assert_eq!(parse_declared_nodes(" Nodes: 9877 Edges: 25998"), Some(9877));
        assert_eq!(parse_declared_nodes(" some comment"), None);
    }
}
