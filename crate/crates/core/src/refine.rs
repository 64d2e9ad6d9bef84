//! Neighborhood consistency scoring and single-pass attribute refinement.
//!
//! Each vertex weighs its neighbors by inverse distance,
//! `w_i = h_i^-p / sum_j h_j^-p`. The expected value of attribute `m` at
//! vertex `v` is `z = sum_i w_i a(m, v_i)`, and the consistency of the
//! observed bit `a` is `J = z a + (1 - z)(1 - a)`. Cells with `J < theta`
//! are flipped.

use std::io::Write;

use ndarray::{Array2, Axis, Zip};

use crate::attributes::ImageAttributeMatrix;
use crate::error::{Error, Result};
use crate::graph::NeighborhoodGraph;

pub const DEFAULT_IDW_P: f64 = 2.0;
pub const DEFAULT_THETA: f64 = 0.7;

/// Normalized inverse-distance weights for every vertex's neighbors.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeWeights {
    exponent: f64,
    per_vertex: Vec<Vec<(usize, f64)>>,
}

impl EdgeWeights {
    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    /// `(neighbor, weight)` pairs in the graph's adjacency order.
    pub fn of(&self, v: usize) -> &[(usize, f64)] {
        &self.per_vertex[v]
    }

    pub fn vertex_count(&self) -> usize {
        self.per_vertex.len()
    }
}

/// Inverse distance weights with exponent `p`.
///
/// Zero-length edges take the whole weight, shared equally, which is the
/// limit of the weighting as those lengths shrink to zero.
pub fn compute_edge_weights(graph: &NeighborhoodGraph, p: f64) -> Result<EdgeWeights> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::invalid(format!("IDW exponent must be positive, got {p}")));
    }
    let per_vertex = (0..graph.vertex_count())
        .map(|v| {
            let nbrs = graph.neighbors(v);
            if nbrs.is_empty() {
                return Err(Error::Topology(format!("vertex {v} has no neighbors")));
            }
            Ok(vertex_weights(nbrs, p))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EdgeWeights {
        exponent: p,
        per_vertex,
    })
}

fn vertex_weights(nbrs: &[(usize, f64)], p: f64) -> Vec<(usize, f64)> {
    let zeros = nbrs.iter().filter(|&&(_, h)| h == 0.0).count();
    if zeros > 0 {
        let share = 1.0 / zeros as f64;
        return nbrs
            .iter()
            .map(|&(u, h)| (u, if h == 0.0 { share } else { 0.0 }))
            .collect();
    }
    // (h_min / h)^p lies in (0, 1], so nothing overflows for large p.
    let h_min = nbrs.iter().map(|&(_, h)| h).fold(f64::INFINITY, f64::min);
    let raw: Vec<f64> = nbrs.iter().map(|&(_, h)| (h_min / h).powf(p)).collect();
    let total: f64 = raw.iter().sum();
    nbrs.iter()
        .zip(raw)
        .map(|(&(u, _), r)| (u, r / total))
        .collect()
}

/// Expected attribute values and consistency scores, both `M x N`.
#[derive(Debug, Clone, PartialEq)]
pub struct Consistency {
    pub expected: Array2<f64>,
    pub consistency: Array2<f64>,
}

/// Scores every (attribute, sample) cell against the original attributes.
///
/// The weight carried by agreeing neighbors is divided by the total weight,
/// which equals `J` when the weights sum to one and absorbs their rounding.
/// This makes unanimous agreement score exactly 1, unanimous disagreement
/// exactly 0, and leaves `J` bit-identical when an attribute row is
/// complemented.
pub fn neighborhood_consistency(
    attrs: &ImageAttributeMatrix,
    weights: &EdgeWeights,
    graph: &NeighborhoodGraph,
) -> Result<Consistency> {
    let n = graph.vertex_count();
    if attrs.sample_count() != n {
        return Err(Error::DimensionMismatch(format!(
            "attribute matrix has {} samples, graph has {n} vertices",
            attrs.sample_count()
        )));
    }
    if weights.vertex_count() != n {
        return Err(Error::DimensionMismatch(format!(
            "weights cover {} vertices, graph has {n}",
            weights.vertex_count()
        )));
    }
    let m = attrs.attribute_count();
    let values = attrs.values();
    let mut expected = Array2::<f64>::zeros((m, n));
    let mut consistency = Array2::<f64>::zeros((m, n));

    Zip::from(expected.axis_iter_mut(Axis(0)))
        .and(consistency.axis_iter_mut(Axis(0)))
        .and(values.axis_iter(Axis(0)))
        .par_for_each(|mut z_row, mut j_row, a_row| {
            for v in 0..n {
                let own = a_row[v];
                let (mut agree, mut disagree) = (0.0, 0.0);
                for &(u, w) in weights.of(v) {
                    if a_row[u] == own {
                        agree += w;
                    } else {
                        disagree += w;
                    }
                }
                let total = agree + disagree;
                let j = agree / total;
                j_row[v] = j;
                z_row[v] = if own == 1 { j } else { disagree / total };
            }
        });

    Ok(Consistency {
        expected,
        consistency,
    })
}

/// Outcome of one identify-and-refine pass.
#[derive(Debug, Clone, PartialEq)]
pub struct ConsistencyReport {
    pub observed: ImageAttributeMatrix,
    pub expected: Array2<f64>,
    pub consistency: Array2<f64>,
    /// `(attribute, sample)` cells with `J < theta`, sorted.
    pub flipped: Vec<(usize, usize)>,
    pub theta: f64,
}

impl ConsistencyReport {
    pub fn flip_fraction(&self) -> f64 {
        let cells = self.observed.attribute_count() * self.observed.sample_count();
        self.flipped.len() as f64 / cells as f64
    }

    /// CSV with columns `attribute_index,sample_index,a,z,J,flipped`, one
    /// row per cell in attribute-major order.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "attribute_index,sample_index,a,z,J,flipped")?;
        let (m, n) = (self.observed.attribute_count(), self.observed.sample_count());
        let mut flips = self.flipped.iter().peekable();
        for a in 0..m {
            for s in 0..n {
                let flipped = flips.next_if(|&&cell| cell == (a, s)).is_some();
                writeln!(
                    out,
                    "{a},{s},{},{:.16e},{:.16e},{}",
                    self.observed.get(a, s),
                    self.expected[[a, s]],
                    self.consistency[[a, s]],
                    u8::from(flipped)
                )?;
            }
        }
        Ok(())
    }
}

/// Flips every cell whose consistency is strictly below `theta`.
pub fn identify_and_refine(
    attrs: &ImageAttributeMatrix,
    scores: &Consistency,
    theta: f64,
) -> Result<(ImageAttributeMatrix, ConsistencyReport)> {
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::invalid(format!("theta must lie in [0, 1], got {theta}")));
    }
    let shape = (attrs.attribute_count(), attrs.sample_count());
    if scores.consistency.dim() != shape || scores.expected.dim() != shape {
        return Err(Error::DimensionMismatch(format!(
            "scores are {:?}, attributes are {shape:?}",
            scores.consistency.dim()
        )));
    }
    if let Some(bad) = scores.consistency.iter().find(|j| !(0.0..=1.0).contains(*j)) {
        return Err(Error::invalid(format!("consistency score {bad} outside [0, 1]")));
    }

    let flipped: Vec<(usize, usize)> = scores
        .consistency
        .indexed_iter()
        .filter(|&(_, &j)| j < theta)
        .map(|(idx, _)| idx)
        .collect();
    let mut refined = attrs.clone();
    for &(m, n) in &flipped {
        refined.flip(m, n);
    }
    let report = ConsistencyReport {
        observed: attrs.clone(),
        expected: scores.expected.clone(),
        consistency: scores.consistency.clone(),
        flipped,
        theta,
    };
    Ok((refined, report))
}
