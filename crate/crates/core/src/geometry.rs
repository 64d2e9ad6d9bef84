//! Poincaré ball embedding and hyperbolic distances.
//!
//! Points live in the open unit ball with curvature -1. The distance between
//! two points `x`, `y` is
//!
//! ```text
//! d(x, y) = arcosh(1 + 2 |x - y|^2 / ((1 - |x|^2) (1 - |y|^2)))
//! ```
//!
//! which is the geodesic distance induced by the conformal metric
//! `(2 / (1 - |x|^2))^2 g_e`.

use ndarray::{Array2, ArrayView1, ArrayView2, Axis};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{DistanceMatrix, Metric};

/// Default maximum row norm after embedding.
pub const DEFAULT_MAX_NORM: f64 = 0.9;

/// A single point strictly inside the unit ball.
#[derive(Debug, Clone, PartialEq)]
pub struct PoincarePoint {
    coords: Vec<f64>,
    norm_sq: f64,
}

impl PoincarePoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::invalid("point has dimension 0"));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("point has non-finite coordinates"));
        }
        let norm_sq = squared_norm(&coords);
        if norm_sq >= 1.0 {
            return Err(Error::OutOfDomain {
                norm: norm_sq.sqrt(),
            });
        }
        Ok(Self { coords, norm_sq })
    }

    pub fn origin(dim: usize) -> Self {
        Self {
            coords: vec![0.0; dim],
            norm_sq: 0.0,
        }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq.sqrt()
    }
}

/// Embedded sample set: one row per point, all rows inside the unit ball.
#[derive(Debug, Clone, PartialEq)]
pub struct PoincarePointSet {
    points: Array2<f64>,
    scale_factor: f64,
}

impl PoincarePointSet {
    /// Wraps rows that are already inside the ball (scale factor 1).
    pub fn from_rows(points: Array2<f64>) -> Result<Self> {
        if points.ncols() == 0 {
            return Err(Error::invalid("points have dimension 0"));
        }
        for (i, row) in points.outer_iter().enumerate() {
            if row.iter().any(|c| !c.is_finite()) {
                return Err(Error::invalid(format!("point {i} has non-finite coordinates")));
            }
            let norm_sq = row.dot(&row);
            if norm_sq >= 1.0 {
                return Err(Error::OutOfDomain {
                    norm: norm_sq.sqrt(),
                });
            }
        }
        Ok(Self {
            points,
            scale_factor: 1.0,
        })
    }

    pub fn len(&self) -> usize {
        self.points.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.points.nrows() == 0
    }

    pub fn dim(&self) -> usize {
        self.points.ncols()
    }

    pub fn rows(&self) -> ArrayView2<'_, f64> {
        self.points.view()
    }

    /// Multiplier that was applied to the raw features.
    pub fn scale_factor(&self) -> f64 {
        self.scale_factor
    }

    pub fn point(&self, i: usize) -> PoincarePoint {
        let coords = self.points.row(i).to_vec();
        let norm_sq = squared_norm(&coords);
        PoincarePoint { coords, norm_sq }
    }
}

/// Rescales all rows by one global factor so the largest row norm equals
/// `target_max_norm`. Row order and relative geometry are preserved.
pub fn embed_features(features: ArrayView2<'_, f64>, target_max_norm: f64) -> Result<PoincarePointSet> {
    embed_with(features, target_max_norm, false)
}

/// Like [`embed_features`], but subtracts the column means first.
pub fn embed_features_centered(
    features: ArrayView2<'_, f64>,
    target_max_norm: f64,
) -> Result<PoincarePointSet> {
    embed_with(features, target_max_norm, true)
}

fn embed_with(features: ArrayView2<'_, f64>, target_max_norm: f64, center: bool) -> Result<PoincarePointSet> {
    if !(target_max_norm > 0.0 && target_max_norm < 1.0) {
        return Err(Error::invalid(format!(
            "target max norm must lie in (0, 1), got {target_max_norm}"
        )));
    }
    if features.nrows() == 0 || features.ncols() == 0 {
        return Err(Error::invalid("feature matrix is empty"));
    }
    if features.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("feature matrix contains non-finite values"));
    }

    let mut rows = features.to_owned();
    if center {
        // non-empty, checked above
        let mean = rows.mean_axis(Axis(0)).expect("non-empty rows");
        rows -= &mean;
    }

    let max_norm = rows
        .outer_iter()
        .map(|r| r.dot(&r).sqrt())
        .fold(0.0_f64, f64::max);
    if max_norm == 0.0 {
        return Err(Error::Degenerate("every feature row has zero norm".into()));
    }

    let scale_factor = target_max_norm / max_norm;
    rows.mapv_inplace(|v| v * scale_factor);
    Ok(PoincarePointSet {
        points: rows,
        scale_factor,
    })
}

/// Hyperbolic distance between two points of the ball.
pub fn hyperbolic_distance(a: &PoincarePoint, b: &PoincarePoint) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!(
            "points have dimensions {} and {}",
            a.dim(),
            b.dim()
        )));
    }
    Ok(distance_from_parts(
        squared_distance(a.coords.iter().copied(), b.coords.iter().copied()),
        a.norm_sq,
        b.norm_sq,
    ))
}

/// Euclidean distance between two coordinate vectors of equal length.
pub fn euclidean_distance(a: ArrayView1<'_, f64>, b: ArrayView1<'_, f64>) -> f64 {
    squared_distance(a.iter().copied(), b.iter().copied()).sqrt()
}

/// Full symmetric matrix of hyperbolic distances.
pub fn pairwise_distances(points: &PoincarePointSet) -> Result<DistanceMatrix> {
    pairwise_distances_with(points, Metric::Hyperbolic)
}

/// Pairwise distances under the chosen metric. Rows are computed in
/// parallel; each entry depends only on its two points, so the output does
/// not depend on scheduling.
pub fn pairwise_distances_with(points: &PoincarePointSet, metric: Metric) -> Result<DistanceMatrix> {
    let n = points.len();
    if n < 2 {
        return Err(Error::InsufficientData(format!(
            "pairwise distances need at least 2 points, got {n}"
        )));
    }
    let rows = points.rows();
    let norms_sq: Vec<f64> = rows.outer_iter().map(|r| r.dot(&r)).collect();

    let mut values = Array2::<f64>::zeros((n, n));
    values
        .axis_iter_mut(Axis(0))
        .into_par_iter()
        .enumerate()
        .for_each(|(i, mut out)| {
            let xi = rows.row(i);
            for j in 0..n {
                if i == j {
                    continue;
                }
                let xj = rows.row(j);
                // Order the operands by index so (i, j) and (j, i) evaluate the
                // identical expression.
                let (lo, hi) = if i < j { (i, j) } else { (j, i) };
                let (a, b) = if i < j { (xi, xj) } else { (xj, xi) };
                let sq = squared_distance(a.iter().copied(), b.iter().copied());
                out[j] = match metric {
                    Metric::Hyperbolic => distance_from_parts(sq, norms_sq[lo], norms_sq[hi]),
                    Metric::Euclidean => sq.sqrt(),
                };
            }
        });

    DistanceMatrix::new(values, metric)
}

#[inline]
fn squared_norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

#[inline]
fn squared_distance(a: impl Iterator<Item = f64>, b: impl Iterator<Item = f64>) -> f64 {
    a.zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// `arcosh(1 + e)` evaluated as `ln_1p(e + sqrt(e (e + 2)))`, which stays
/// accurate when `e` is tiny and never sees an argument below 1.
#[inline]
fn distance_from_parts(diff_sq: f64, a_norm_sq: f64, b_norm_sq: f64) -> f64 {
    if diff_sq == 0.0 {
        return 0.0;
    }
    let excess = 2.0 * diff_sq / ((1.0 - a_norm_sq) * (1.0 - b_norm_sq));
    (excess + (excess * (excess + 2.0)).sqrt()).ln_1p()
}
