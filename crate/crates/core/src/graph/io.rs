//! Text formats: edge lists, label files and probability-matrix files.
//!
//! Every vertex id in a file is 1-based; block ids are 1-based as well.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::{Adjacency, Lambda, LambdaFile, LabeledGraph};

const VERTICES_HEADER: &str = "#vertices";

/// Parsed edge-list file: the optional declared vertex count and the 1-based edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeList {
    pub declared_vertices: Option<usize>,
    pub edges: Vec<(usize, usize)>,
}

impl EdgeList {
    /// Declared count, or the largest id mentioned by an edge.
    pub fn num_vertices(&self) -> usize {
        self.declared_vertices
            .unwrap_or_else(|| self.edges.iter().map(|&(a, b)| a.max(b)).max().unwrap_or(0))
    }
}

fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn strip_comment(line: &str) -> &str {
    line.split_once('#').map_or(line, |(head, _)| head).trim()
}

fn parse_pair(path: &Path, lineno: usize, line: &str, what: &str) -> Result<(usize, usize)> {
    let mut tokens = line.split_whitespace();
    let (Some(a), Some(b), None) = (tokens.next(), tokens.next(), tokens.next()) else {
        return Err(Error::parse(path, lineno, format!("expected two integers ({what}), got {line:?}")));
    };
    let parse = |t: &str| -> Result<usize> {
        match t.parse::<usize>() {
            Ok(x) if x >= 1 => Ok(x),
            _ => Err(Error::parse(path, lineno, format!("{t:?} is not a positive integer"))),
        }
    };
    Ok((parse(a)?, parse(b)?))
}

/// Parses an edge list: one `i j` pair per line, `#` comments, optional
/// `#vertices N` on the first line. Self-loops are rejected.
pub fn parse_edge_list(path: &Path, text: &str) -> Result<EdgeList> {
    let mut declared = None;
    let mut edges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let trimmed = raw.trim();
        if idx == 0 {
            if let Some(rest) = trimmed.strip_prefix(VERTICES_HEADER) {
                let count = rest.trim().parse::<usize>().map_err(|_| {
                    Error::parse(path, lineno, format!("malformed vertex-count header {trimmed:?}"))
                })?;
                declared = Some(count);
                continue;
            }
        }
        let line = strip_comment(trimmed);
        if line.is_empty() {
            continue;
        }
        let (a, b) = parse_pair(path, lineno, line, "an edge")?;
        if a == b {
            return Err(Error::parse(path, lineno, format!("self-loop at vertex {a}")));
        }
        if let Some(n) = declared {
            if a > n || b > n {
                return Err(Error::parse(path, lineno, format!("vertex beyond declared count {n}")));
            }
        }
        edges.push((a, b));
    }
    Ok(EdgeList {
        declared_vertices: declared,
        edges,
    })
}

pub fn read_edge_list(path: &Path) -> Result<EdgeList> {
    parse_edge_list(path, &read_to_string(path)?)
}

/// Parses `vertex block` lines into 1-based pairs, checking `1 <= block <= K`
/// and rejecting vertices listed twice.
pub fn parse_labels(path: &Path, text: &str, num_blocks: usize) -> Result<Vec<(usize, usize)>> {
    let mut out = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        let (v, b) = parse_pair(path, idx + 1, line, "a vertex and a block")?;
        if b > num_blocks {
            return Err(Error::parse(path, idx + 1, format!("block {b} outside 1..={num_blocks}")));
        }
        if !seen.insert(v) {
            return Err(Error::parse(path, idx + 1, format!("vertex {v} labelled twice")));
        }
        out.push((v, b));
    }
    Ok(out)
}

pub fn read_labels(path: &Path, num_blocks: usize) -> Result<Vec<(usize, usize)>> {
    parse_labels(path, &read_to_string(path)?, num_blocks)
}

fn check_label_range(path: &Path, labels: &[(usize, usize)], n: usize) -> Result<()> {
    if let Some(&(v, _)) = labels.iter().find(|&&(v, _)| v > n) {
        return Err(Error::parse(
            path,
            0,
            format!("vertex {v} is not in the graph's {n} vertices (declare isolated vertices with a '#vertices N' header)"),
        ));
    }
    Ok(())
}

fn adjacency_from(list: &EdgeList) -> Adjacency {
    Adjacency::from_edges(list.num_vertices(), list.edges.iter().map(|&(a, b)| (a - 1, b - 1)))
}

/// Builds a graph whose labelled vertices are the seeds. Seeds come first
/// internally (ascending id), then the remaining vertices (ascending id);
/// the original ids are kept as external ids.
pub fn graph_from_parts(
    list: &EdgeList,
    labels: &[(usize, usize)],
    num_blocks: usize,
    labels_path: &Path,
) -> Result<LabeledGraph> {
    let n = list.num_vertices();
    check_label_range(labels_path, labels, n)?;
    let mut block_of = vec![None; n];
    for &(v, b) in labels {
        block_of[v - 1] = Some(b - 1);
    }
    let seeds: Vec<usize> = (0..n).filter(|&v| block_of[v].is_some()).collect();
    let ambiguous: Vec<usize> = (0..n).filter(|&v| block_of[v].is_none()).collect();
    let order: Vec<usize> = seeds.iter().chain(&ambiguous).copied().collect();
    let adj = adjacency_from(list).induced(&order);
    let seed_labels = seeds.iter().map(|&v| block_of[v].expect("seed")).collect();
    LabeledGraph::new(adj, num_blocks, seed_labels, None)?.with_external_ids(order.iter().map(|v| v + 1).collect())
}

/// Loads an edge list plus a seed-label file.
pub fn load_edge_list(edges_path: &Path, labels_path: &Path, num_blocks: usize) -> Result<LabeledGraph> {
    let list = read_edge_list(edges_path)?;
    let labels = read_labels(labels_path, num_blocks)?;
    graph_from_parts(&list, &labels, num_blocks, labels_path)
}

/// Loads a fully labelled graph: no seeds, every vertex carries a true label.
pub fn load_labeled_dataset(edges_path: &Path, labels_path: &Path, num_blocks: usize) -> Result<LabeledGraph> {
    let list = read_edge_list(edges_path)?;
    let labels = read_labels(labels_path, num_blocks)?;
    let n = list.num_vertices();
    check_label_range(labels_path, &labels, n)?;
    let mut truth = vec![usize::MAX; n];
    for &(v, b) in &labels {
        truth[v - 1] = b - 1;
    }
    if let Some(v) = truth.iter().position(|&b| b == usize::MAX) {
        return Err(Error::parse(labels_path, 0, format!("vertex {} has no label", v + 1)));
    }
    LabeledGraph::new(adjacency_from(&list), num_blocks, vec![], Some(truth))
}

pub fn read_lambda<T: Scalar>(path: &Path) -> Result<Lambda<T>> {
    let text = read_to_string(path)?;
    let file: LambdaFile = serde_json::from_str(&text).map_err(|source| Error::Json {
        path: path.into(),
        source,
    })?;
    file.to_lambda()
}

pub fn write_lambda<T: Scalar>(path: &Path, lambda: &Lambda<T>) -> Result<()> {
    let text = serde_json::to_string_pretty(&LambdaFile::from_lambda(lambda)).expect("lambda serializes");
    fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

fn create(path: &Path) -> Result<BufWriter<fs::File>> {
    Ok(BufWriter::new(fs::File::create(path).map_err(|e| Error::io(path, e))?))
}

/// Writes the graph with a `#vertices` header, using external ids.
pub fn write_edge_list(path: &Path, graph: &LabeledGraph) -> Result<()> {
    let mut out = create(path)?;
    let io = |e| Error::io(path, e);
    writeln!(out, "{VERTICES_HEADER} {}", graph.num_vertices()).map_err(io)?;
    let mut edges: Vec<(usize, usize)> = graph
        .adjacency()
        .edges()
        .map(|(i, j)| {
            let (a, b) = (graph.external_id(i), graph.external_id(j));
            (a.min(b), a.max(b))
        })
        .collect();
    edges.sort_unstable();
    for (a, b) in edges {
        writeln!(out, "{a} {b}").map_err(io)?;
    }
    out.flush().map_err(io)
}

/// Writes `vertex block` lines (both 1-based) for 0-based `(vertex, block)` pairs.
pub fn write_labels(path: &Path, graph: &LabeledGraph, entries: impl IntoIterator<Item = (usize, usize)>) -> Result<()> {
    let mut out = create(path)?;
    let io = |e| Error::io(path, e);
    for (v, b) in entries {
        writeln!(out, "{} {}", graph.external_id(v), b + 1).map_err(io)?;
    }
    out.flush().map_err(io)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> &'static Path {
        Path::new("test.txt")
    }

    #[test]
    fn reversed_duplicate_collapses() {
        let list = parse_edge_list(p(), "1 2\n2 1").unwrap();
        let adj = adjacency_from(&list);
        assert_eq!(adj.num_vertices(), 2);
        assert_eq!(adj.num_edges(), 1);
    }

    #[test]
    fn self_loop_reports_line() {
        let err = parse_edge_list(p(), "3 3").unwrap_err();
        match err {
            Error::Parse { line, message, .. } => {
                assert_eq!(line, 1);
                assert!(message.contains("self-loop"));
            }
            other => panic!("{other}"),
        }
    }

    #[test]
    fn malformed_line_reports_line() {
        let err = parse_edge_list(p(), "1 2\n# comment\n2 x\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        assert!(parse_edge_list(p(), "1 2 3").is_err());
        assert!(parse_edge_list(p(), "0 2").is_err());
    }

    #[test]
    fn header_declares_isolated_vertices() {
        let list = parse_edge_list(p(), "#vertices 6\n1 2 # trailing comment\n").unwrap();
        assert_eq!(list.num_vertices(), 6);
        assert!(parse_edge_list(p(), "#vertices 2\n1 3\n").is_err());
    }

    #[test]
    fn seeds_first_with_block_sizes() {
        let list = parse_edge_list(p(), "#vertices 10\n1 5\n").unwrap();
        let labels = parse_labels(p(), "1 1\n2 1\n3 1\n4 1\n", 3).unwrap();
        let g = graph_from_parts(&list, &labels, 3, p()).unwrap();
        assert_eq!(g.num_seeds(), 4);
        assert_eq!(g.seed_counts(), vec![4, 0, 0]);
        assert!(g.adjacency().has_edge(0, 4));
    }

    #[test]
    fn seeds_are_moved_to_the_front() {
        let list = parse_edge_list(p(), "1 2\n2 3\n").unwrap();
        let labels = parse_labels(p(), "3 2\n", 2).unwrap();
        let g = graph_from_parts(&list, &labels, 2, p()).unwrap();
        assert_eq!(g.external_ids(), &[3, 1, 2]);
        assert!(g.adjacency().has_edge(0, 2));
        assert!(g.adjacency().has_edge(1, 2));
        assert!(!g.adjacency().has_edge(0, 1));
    }

    #[test]
    fn label_errors() {
        assert!(parse_labels(p(), "1 4\n", 3).is_err());
        assert!(parse_labels(p(), "1 0\n", 3).is_err());
        assert!(parse_labels(p(), "1 1\n1 2\n", 3).is_err());
        let list = parse_edge_list(p(), "1 2\n").unwrap();
        let labels = parse_labels(p(), "5 1\n", 2).unwrap();
        assert!(graph_from_parts(&list, &labels, 2, p()).is_err());
    }
}
