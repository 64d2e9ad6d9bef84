//! Relative neighborhood graphs over a precomputed distance matrix.
//!
//! A pair `(i, j)` is joined when no third vertex `k` is strictly closer to
//! both of them than they are to each other:
//!
//! ```text
//! d(i, j) <= max(d(i, k), d(j, k))   for every k != i, j
//! ```
//!
//! The complete topology keeps every pair and exists for ablation runs.

use std::collections::VecDeque;
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use ndarray::{Array2, ArrayView2};
use rayon::prelude::*;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Metric {
    #[default]
    Hyperbolic,
    Euclidean,
}

impl Metric {
    pub fn as_str(self) -> &'static str {
        match self {
            Metric::Hyperbolic => "hyperbolic",
            Metric::Euclidean => "euclidean",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hyperbolic" => Ok(Metric::Hyperbolic),
            "euclidean" => Ok(Metric::Euclidean),
            other => Err(Error::invalid(format!("unknown metric '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Topology {
    #[default]
    RelativeNeighborhood,
    Complete,
}

impl Topology {
    pub fn as_str(self) -> &'static str {
        match self {
            Topology::RelativeNeighborhood => "relative_neighborhood",
            Topology::Complete => "complete",
        }
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Topology {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "relative_neighborhood" | "rng" => Ok(Topology::RelativeNeighborhood),
            "complete" => Ok(Topology::Complete),
            other => Err(Error::invalid(format!("unknown topology '{other}'"))),
        }
    }
}

/// Symmetric, zero-diagonal, nonnegative distance matrix tagged with the
/// metric that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    values: Array2<f64>,
    metric: Metric,
}

impl DistanceMatrix {
    pub fn new(values: Array2<f64>, metric: Metric) -> Result<Self> {
        let n = values.nrows();
        if values.ncols() != n {
            return Err(Error::invalid(format!(
                "distance matrix must be square, got {}x{}",
                n,
                values.ncols()
            )));
        }
        if n < 2 {
            return Err(Error::InsufficientData(format!(
                "a graph needs at least 2 vertices, got {n}"
            )));
        }
        for i in 0..n {
            if values[[i, i]] != 0.0 {
                return Err(Error::invalid(format!("diagonal entry {i} is nonzero")));
            }
            for j in (i + 1)..n {
                let v = values[[i, j]];
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::invalid(format!(
                        "entry ({i}, {j}) = {v} is negative or non-finite"
                    )));
                }
                if values[[j, i]] != v {
                    return Err(Error::invalid(format!(
                        "matrix is asymmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(Self { values, metric })
    }

    pub fn len(&self) -> usize {
        self.values.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.values.nrows() == 0
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[[i, j]]
    }

    pub fn values(&self) -> ArrayView2<'_, f64> {
        self.values.view()
    }

    /// Applies `f` to every entry. `f` must map 0 to 0 and keep values
    /// nonnegative.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.values.mapv(f), self.metric)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub length: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NeighborhoodGraph {
    vertex_count: usize,
    metric: Metric,
    topology: Topology,
    /// Sorted by `(i, j)` with `i < j`.
    edges: Vec<Edge>,
    /// Per vertex, `(neighbor, length)` sorted by neighbor index.
    adjacency: Vec<Vec<(usize, f64)>>,
}

impl NeighborhoodGraph {
    /// Assembles a graph from an edge list. Edges may come in any order and
    /// orientation; duplicates and self-loops are rejected.
    pub fn from_edges(
        vertex_count: usize,
        metric: Metric,
        topology: Topology,
        edges: impl IntoIterator<Item = Edge>,
    ) -> Result<Self> {
        let mut edges: Vec<Edge> = edges
            .into_iter()
            .map(|e| {
                if e.i < e.j {
                    e
                } else {
                    Edge {
                        i: e.j,
                        j: e.i,
                        length: e.length,
                    }
                }
            })
            .collect();
        edges.sort_by(|a, b| (a.i, a.j).cmp(&(b.i, b.j)));

        let mut adjacency = vec![Vec::new(); vertex_count];
        for (idx, e) in edges.iter().enumerate() {
            if e.i == e.j {
                return Err(Error::invalid(format!("self-loop at vertex {}", e.i)));
            }
            if e.j >= vertex_count {
                return Err(Error::invalid(format!(
                    "edge ({}, {}) references a vertex beyond {vertex_count}",
                    e.i, e.j
                )));
            }
            if !(e.length >= 0.0) || !e.length.is_finite() {
                return Err(Error::invalid(format!(
                    "edge ({}, {}) has invalid length {}",
                    e.i, e.j, e.length
                )));
            }
            if idx > 0 && (edges[idx - 1].i, edges[idx - 1].j) == (e.i, e.j) {
                return Err(Error::invalid(format!("duplicate edge ({}, {})", e.i, e.j)));
            }
            adjacency[e.i].push((e.j, e.length));
            adjacency[e.j].push((e.i, e.length));
        }
        for list in &mut adjacency {
            list.sort_by_key(|&(v, _)| v);
        }
        Ok(Self {
            vertex_count,
            metric,
            topology,
            edges,
            adjacency,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn neighbors(&self, v: usize) -> &[(usize, f64)] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adjacency
            .get(a)
            .is_some_and(|list| list.binary_search_by_key(&b, |&(v, _)| v).is_ok())
    }

    /// Unordered vertex pairs `(i, j)`, `i < j`, in sorted order.
    pub fn edge_pairs(&self) -> Vec<(usize, usize)> {
        self.edges.iter().map(|e| (e.i, e.j)).collect()
    }
}

/// Builds the graph, evaluating candidate rows in parallel. The result is
/// identical to [`build_graph_serial`].
pub fn build_graph(distances: &DistanceMatrix, topology: Topology) -> Result<NeighborhoodGraph> {
    let n = distances.len();
    let d = distances.values();
    let edges: Vec<Edge> = match topology {
        Topology::RelativeNeighborhood => (0..n)
            .into_par_iter()
            .map(|i| rng_row(d, i))
            .collect::<Vec<_>>()
            .into_iter()
            .flatten()
            .collect(),
        Topology::Complete => complete_edges(d),
    };
    NeighborhoodGraph::from_edges(n, distances.metric(), topology, edges)
}

/// Single-threaded construction, O(N^3) for the relative neighborhood test.
pub fn build_graph_serial(distances: &DistanceMatrix, topology: Topology) -> Result<NeighborhoodGraph> {
    let n = distances.len();
    let d = distances.values();
    let edges: Vec<Edge> = match topology {
        Topology::RelativeNeighborhood => (0..n).flat_map(|i| rng_row(d, i)).collect(),
        Topology::Complete => complete_edges(d),
    };
    NeighborhoodGraph::from_edges(n, distances.metric(), topology, edges)
}

/// Edges `(i, j)` with `j > i` that pass the relative neighborhood test.
///
/// For `k = i` or `k = j` the term `max(d(i,k), d(j,k))` equals `d(i,j)`
/// itself, so the pair is an edge exactly when the minimum over all `k`
/// of `max(d(i,k), d(j,k))` is not below `d(i,j)`. Scanning every `k`
/// without branching on the excluded indices keeps the inner loop a plain
/// min/max reduction.
fn rng_row(d: ArrayView2<'_, f64>, i: usize) -> Vec<Edge> {
    let n = d.nrows();
    let row_i = d.row(i);
    let mut out = Vec::new();
    for j in (i + 1)..n {
        let row_j = d.row(j);
        let dij = row_i[j];
        let lune = row_i
            .iter()
            .zip(row_j.iter())
            .fold(f64::INFINITY, |acc, (&a, &b)| acc.min(a.max(b)));
        if dij <= lune {
            out.push(Edge { i, j, length: dij });
        }
    }
    out
}

fn complete_edges(d: ArrayView2<'_, f64>) -> Vec<Edge> {
    let n = d.nrows();
    (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| Edge { i, j, length: d[[i, j]] }))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphStats {
    pub edge_count: usize,
    pub min_degree: usize,
    pub max_degree: usize,
    pub mean_degree: f64,
    pub connected: bool,
}

pub fn graph_stats(graph: &NeighborhoodGraph) -> GraphStats {
    let n = graph.vertex_count();
    let degrees: Vec<usize> = (0..n).map(|v| graph.degree(v)).collect();
    let min_degree = degrees.iter().copied().min().unwrap_or(0);
    let max_degree = degrees.iter().copied().max().unwrap_or(0);
    let mean_degree = if n == 0 {
        0.0
    } else {
        degrees.iter().sum::<usize>() as f64 / n as f64
    };
    GraphStats {
        edge_count: graph.edge_count(),
        min_degree,
        max_degree,
        mean_degree,
        connected: is_connected(graph),
    }
}

fn is_connected(graph: &NeighborhoodGraph) -> bool {
    let n = graph.vertex_count();
    if n == 0 {
        return true;
    }
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([0]);
    seen[0] = true;
    let mut visited = 1;
    while let Some(v) = queue.pop_front() {
        for &(u, _) in graph.neighbors(v) {
            if !seen[u] {
                seen[u] = true;
                visited += 1;
                queue.push_back(u);
            }
        }
    }
    visited == n
}

/// Writes the edge list: a header `HNG <N> <E> <metric> <topology>` followed
/// by one `i j length` line per edge, lengths with 17 significant digits.
pub fn write_edge_list<W: Write>(graph: &NeighborhoodGraph, mut out: W) -> std::io::Result<()> {
    writeln!(
        out,
        "HNG {} {} {} {}",
        graph.vertex_count(),
        graph.edge_count(),
        graph.metric(),
        graph.topology()
    )?;
    for e in graph.edges() {
        writeln!(out, "{} {} {:.16e}", e.i, e.j, e.length)?;
    }
    Ok(())
}

pub fn read_edge_list<R: BufRead>(input: R) -> Result<NeighborhoodGraph> {
    let parse_err = |line: usize, message: String| Error::Parse {
        path: "<edge list>".into(),
        line,
        message,
    };
    let mut lines = input.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "missing header".into()))?;
    let header = header.map_err(|e| parse_err(1, e.to_string()))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 5 || fields[0] != "HNG" {
        return Err(parse_err(1, format!("malformed header '{header}'")));
    }
    let n: usize = fields[1].parse().map_err(|_| parse_err(1, "bad vertex count".into()))?;
    let expected: usize = fields[2].parse().map_err(|_| parse_err(1, "bad edge count".into()))?;
    let metric: Metric = fields[3].parse()?;
    let topology: Topology = fields[4].parse()?;

    let mut edges = Vec::with_capacity(expected);
    for (idx, line) in lines {
        let line = line.map_err(|e| parse_err(idx + 1, e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(parse_err(idx + 1, format!("expected 'i j length', got '{line}'")));
        }
        let i = parts[0].parse().map_err(|_| parse_err(idx + 1, "bad vertex index".into()))?;
        let j = parts[1].parse().map_err(|_| parse_err(idx + 1, "bad vertex index".into()))?;
        let length = parts[2].parse().map_err(|_| parse_err(idx + 1, "bad length".into()))?;
        edges.push(Edge { i, j, length });
    }
    if edges.len() != expected {
        return Err(parse_err(
            1,
            format!("header announces {expected} edges, found {}", edges.len()),
        ));
    }
    NeighborhoodGraph::from_edges(n, metric, topology, edges)
}
