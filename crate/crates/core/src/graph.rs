//! Node-aligned weighted networks and their text formats.
//!
//! All networks in a run share one [`NodeIndex`] so that row `i` means the
//! same node everywhere. Edge lists are tab-separated text:
//!
//! ```text
//! # comment
//! node_a<TAB>node_b<TAB>0.8
//! node_a<TAB>node_c
//! ```
//!
//! The weight column is optional (defaults to `1.0`) and must lie in
//! `(0, 1]`. Undirected edges are stored once with endpoint indices
//! normalized to `i < j`; duplicates and self-loops are rejected rather
//! than silently merged. Label files map a node to a comma-separated label
//! set: `node<TAB>label1,label2`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::matrix::{BoolMatrix, Matrix};
use crate::scalar::{cast, Scalar};

/// Bijection between node identifiers and dense indices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeIndex {
    names: Vec<String>,
    position: HashMap<String, usize>,
}

impl NodeIndex {
    /// Builds an index from identifiers in the given order.
    /// Fails on duplicates.
    pub fn from_names(names: Vec<String>) -> Result<Self> {
        let mut position = HashMap::with_capacity(names.len());
        for (i, name) in names.iter().enumerate() {
            if position.insert(name.clone(), i).is_some() {
                return Err(Error::invalid(format!("duplicate node identifier {name:?}")));
            }
        }
        Ok(NodeIndex { names, position })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.position.get(name).copied()
    }
}

/// Undirected weighted graph over a shared node index.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    index: NodeIndex,
    /// `(i, j, weight)` with `i < j`, sorted by `(i, j)`, no duplicates.
    edges: Vec<(usize, usize, f64)>,
}

impl WeightedGraph {
    /// Builds a graph from `(i, j, weight)` triples; endpoint order within a
    /// triple does not matter.
    pub fn from_edges(index: NodeIndex, raw: Vec<(usize, usize, f64)>) -> Result<Self> {
        let n = index.len();
        let mut seen = BTreeMap::new();
        for (a, b, w) in raw {
            if a >= n || b >= n {
                return Err(Error::invalid(format!(
                    "edge ({a}, {b}) references a node outside the index (n = {n})"
                )));
            }
            if a == b {
                return Err(Error::invalid(format!("self-loop on node {}", index.name(a))));
            }
            validate_weight(w)?;
            let key = (a.min(b), a.max(b));
            if seen.insert(key, w).is_some() {
                return Err(Error::invalid(format!(
                    "duplicate edge between {} and {}",
                    index.name(key.0),
                    index.name(key.1)
                )));
            }
        }
        let edges = seen.into_iter().map(|((i, j), w)| (i, j, w)).collect();
        Ok(WeightedGraph { index, edges })
    }

    pub fn index(&self) -> &NodeIndex {
        &self.index
    }

    pub fn n(&self) -> usize {
        self.index.len()
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    /// Dense symmetric adjacency matrix with zero diagonal.
    pub fn adjacency<S: Scalar>(&self) -> Matrix<S> {
        let n = self.n();
        let mut a = Matrix::zeros(n, n);
        for &(i, j, w) in &self.edges {
            let w = cast::<S>(w);
            a[(i, j)] = w;
            a[(j, i)] = w;
        }
        a
    }

    /// Canonical text form: edges sorted by `(i, j)`, weights printed with
    /// 17 significant digits so `f64` values survive a round trip.
    pub fn to_canonical_string(&self) -> String {
        let mut out = String::new();
        for &(i, j, w) in &self.edges {
            out.push_str(&format!("{}\t{}\t{:.16e}\n", self.index.name(i), self.index.name(j), w));
        }
        out
    }
}

fn validate_weight(w: f64) -> Result<()> {
    if !w.is_finite() || w <= 0.0 || w > 1.0 {
        return Err(Error::invalid(format!("edge weight {w} outside (0, 1]")));
    }
    Ok(())
}

/// Node-by-label binary assignment matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelMatrix {
    index: NodeIndex,
    labels: Vec<String>,
    assign: BoolMatrix,
    /// `seen[i]` is true when node `i` had at least one line in the file.
    seen: Vec<bool>,
}

impl LabelMatrix {
    pub fn index(&self) -> &NodeIndex {
        &self.index
    }

    /// Label identifiers, lexicographically sorted.
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn assignments(&self) -> &BoolMatrix {
        &self.assign
    }

    pub fn node_seen(&self, i: usize) -> bool {
        self.seen[i]
    }
}

struct Line<'a> {
    number: usize,
    fields: Vec<&'a str>,
}

/// Splits content into data lines, skipping blanks and `#` comments.
fn data_lines(content: &str) -> impl Iterator<Item = Line<'_>> {
    content.lines().enumerate().filter_map(|(idx, line)| {
        if line.trim().is_empty() || line.starts_with('#') {
            return None;
        }
        Some(Line { number: idx + 1, fields: line.split('\t').collect() })
    })
}

fn read_to_string(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn edge_fields<'a>(path: &Path, line: &'a Line<'a>) -> Result<(&'a str, &'a str, Option<&'a str>)> {
    match *line.fields.as_slice() {
        [a, b] => Ok((a, b, None)),
        [a, b, w] => Ok((a, b, Some(w))),
        _ => Err(Error::parse(
            path,
            line.number,
            format!("expected 2 or 3 tab-separated fields, found {}", line.fields.len()),
        )),
    }
    .and_then(|(a, b, w)| {
        if a.is_empty() || b.is_empty() {
            Err(Error::parse(path, line.number, "empty node identifier"))
        } else {
            Ok((a, b, w))
        }
    })
}

/// Scans edge-list files and returns the union of node identifiers, sorted
/// lexicographically. The resulting index is independent of file order and
/// of line order within files.
pub fn build_node_index(paths: &[PathBuf]) -> Result<NodeIndex> {
    let mut names = BTreeSet::new();
    for path in paths {
        let content = read_to_string(path)?;
        for line in data_lines(&content) {
            let (a, b, _) = edge_fields(path, &line)?;
            names.insert(a.to_owned());
            names.insert(b.to_owned());
        }
    }
    NodeIndex::from_names(names.into_iter().collect())
}

/// Parses one edge-list file against an existing index.
///
/// Every identifier in the file must resolve through `index`; the index may
/// contain additional nodes (they become isolated in this network).
pub fn load_edge_list(path: &Path, index: &NodeIndex) -> Result<WeightedGraph> {
    let content = read_to_string(path)?;
    let mut seen: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for line in data_lines(&content) {
        let (a, b, w) = edge_fields(path, &line)?;
        let resolve = |name: &str| {
            index.position(name).ok_or_else(|| {
                Error::parse(path, line.number, format!("unknown node identifier {name:?}"))
            })
        };
        let i = resolve(a)?;
        let j = resolve(b)?;
        if i == j {
            return Err(Error::parse(path, line.number, format!("self-loop on {a:?}")));
        }
        let weight = match w {
            None => 1.0,
            Some(text) => text.parse::<f64>().map_err(|_| {
                Error::parse(path, line.number, format!("malformed weight {text:?}"))
            })?,
        };
        if !weight.is_finite() || weight <= 0.0 || weight > 1.0 {
            return Err(Error::parse(
                path,
                line.number,
                format!("edge weight {weight} outside (0, 1]"),
            ));
        }
        let key = (i.min(j), i.max(j));
        if seen.insert(key, weight).is_some() {
            return Err(Error::parse(
                path,
                line.number,
                format!("duplicate edge between {a:?} and {b:?}"),
            ));
        }
    }
    let edges = seen.into_iter().map(|((i, j), w)| (i, j, w)).collect();
    Ok(WeightedGraph { index: index.clone(), edges })
}

/// Writes the canonical edge-list form produced by
/// [`WeightedGraph::to_canonical_string`].
pub fn write_edge_list(graph: &WeightedGraph, path: &Path) -> Result<()> {
    let mut file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(graph.to_canonical_string().as_bytes())
        .map_err(|e| Error::io(path, e))
}

/// Parses a label file against an existing index.
///
/// Repeated lines for one node take the union of their label sets. The
/// label universe is the sorted union of every label in the file; nodes
/// absent from the file get all-zero rows.
pub fn load_labels(path: &Path, index: &NodeIndex) -> Result<LabelMatrix> {
    let content = read_to_string(path)?;
    let mut per_node: Vec<BTreeSet<String>> = vec![BTreeSet::new(); index.len()];
    let mut seen = vec![false; index.len()];
    let mut universe = BTreeSet::new();
    for line in data_lines(&content) {
        let (node, labels) = match line.fields.as_slice() {
            [node, labels] => (*node, *labels),
            _ => {
                return Err(Error::parse(
                    path,
                    line.number,
                    format!("expected 2 tab-separated fields, found {}", line.fields.len()),
                ))
            }
        };
        if node.is_empty() {
            return Err(Error::parse(path, line.number, "empty node identifier"));
        }
        let i = index.position(node).ok_or_else(|| {
            Error::parse(path, line.number, format!("unknown node identifier {node:?}"))
        })?;
        seen[i] = true;
        for token in labels.split(',') {
            if token.is_empty() {
                return Err(Error::parse(path, line.number, "empty label token"));
            }
            universe.insert(token.to_owned());
            per_node[i].insert(token.to_owned());
        }
    }
    let labels: Vec<String> = universe.into_iter().collect();
    let slot: HashMap<&str, usize> =
        labels.iter().enumerate().map(|(l, name)| (name.as_str(), l)).collect();
    let mut assign = BoolMatrix::zeros(index.len(), labels.len());
    for (i, set) in per_node.iter().enumerate() {
        for token in set {
            assign[(i, slot[token.as_str()])] = true;
        }
    }
    Ok(LabelMatrix { index: index.clone(), labels, assign, seen })
}
