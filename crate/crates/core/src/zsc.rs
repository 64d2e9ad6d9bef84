//! Linear zero-shot classification.
//!
//! A ridge-regularized linear map `W` (attributes x features) is fitted on
//! training samples, test samples are projected into attribute space, and
//! each is assigned the test class whose attribute column is nearest in
//! cosine distance.

use std::collections::BTreeMap;
use std::io::Write;

use nalgebra::DMatrix;
use ndarray::{Array2, ArrayView2};
use rayon::prelude::*;

use crate::attributes::ImageAttributeMatrix;
use crate::error::{Error, Result};

pub const DEFAULT_RIDGE_LAMBDA: f64 = 1.0;

/// Relative pivot size below which the normal equations count as singular.
const PIVOT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct LinearAttributeMap {
    weights: Array2<f64>,
    ridge_lambda: f64,
}

impl LinearAttributeMap {
    /// `M x d` weight matrix.
    pub fn weights(&self) -> ArrayView2<'_, f64> {
        self.weights.view()
    }

    pub fn ridge_lambda(&self) -> f64 {
        self.ridge_lambda
    }

    /// Projects `N x d` features to `N x M` attribute embeddings.
    pub fn project(&self, features: ArrayView2<'_, f64>) -> Array2<f64> {
        features.dot(&self.weights.t())
    }
}

/// Fits `W` minimizing `|W X^T - A|^2 + lambda |W|^2` for binary targets.
pub fn train_map(
    features: ArrayView2<'_, f64>,
    targets: &ImageAttributeMatrix,
    ridge_lambda: f64,
) -> Result<LinearAttributeMap> {
    train_map_real(features, targets.to_f64().view(), ridge_lambda)
}

/// Same objective with real-valued `M x N` targets. Solves the normal
/// equations `(X^T X + lambda I) W^T = X^T A^T` by Cholesky factorization.
pub fn train_map_real(
    features: ArrayView2<'_, f64>,
    targets: ArrayView2<'_, f64>,
    ridge_lambda: f64,
) -> Result<LinearAttributeMap> {
    let (n, d) = features.dim();
    if n == 0 || d == 0 {
        return Err(Error::InsufficientData("no training samples".into()));
    }
    if targets.ncols() != n {
        return Err(Error::DimensionMismatch(format!(
            "{n} training samples but {} target columns",
            targets.ncols()
        )));
    }
    if !(ridge_lambda >= 0.0 && ridge_lambda.is_finite()) {
        return Err(Error::invalid(format!(
            "ridge lambda must be nonnegative, got {ridge_lambda}"
        )));
    }
    let m = targets.nrows();
    let x = DMatrix::from_fn(n, d, |i, j| features[[i, j]]);
    let a_t = DMatrix::from_fn(n, m, |i, j| targets[[j, i]]);

    let mut gram = x.tr_mul(&x);
    for k in 0..d {
        gram[(k, k)] += ridge_lambda;
    }
    let rhs = x.tr_mul(&a_t);

    let max_diag = (0..d).map(|k| gram[(k, k)]).fold(0.0_f64, f64::max);
    let singular = || {
        Error::IllConditioned(format!(
            "normal equations are singular with lambda = {ridge_lambda}; use a positive ridge lambda"
        ))
    };
    let chol = gram.cholesky().ok_or_else(singular)?;
    let l = chol.l_dirty();
    let min_pivot = (0..d).map(|k| l[(k, k)] * l[(k, k)]).fold(f64::INFINITY, f64::min);
    if !(min_pivot > PIVOT_TOLERANCE * max_diag) {
        return Err(singular());
    }
    let w_t = chol.solve(&rhs);

    let weights = Array2::from_shape_fn((m, d), |(i, j)| w_t[(j, i)]);
    if weights.iter().any(|v| !v.is_finite()) {
        return Err(singular());
    }
    Ok(LinearAttributeMap {
        weights,
        ridge_lambda,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Predictions {
    /// Column index into the candidate class matrix, per sample.
    pub columns: Vec<usize>,
    /// Samples whose projection had zero norm; they fall back to column 0.
    pub zero_norm: usize,
}

/// Nearest class column by cosine distance, ties to the lowest index.
pub fn predict(
    map: &LinearAttributeMap,
    test_features: ArrayView2<'_, f64>,
    class_attrs: ArrayView2<'_, f64>,
) -> Result<Predictions> {
    let (m, d) = map.weights.dim();
    if test_features.ncols() != d {
        return Err(Error::DimensionMismatch(format!(
            "map expects {d} features, test data has {}",
            test_features.ncols()
        )));
    }
    if class_attrs.nrows() != m {
        return Err(Error::DimensionMismatch(format!(
            "map produces {m} attributes, class matrix has {}",
            class_attrs.nrows()
        )));
    }
    if class_attrs.ncols() == 0 {
        return Err(Error::invalid("no candidate classes"));
    }
    let norms: Vec<f64> = class_attrs
        .columns()
        .into_iter()
        .map(|c| c.dot(&c).sqrt())
        .collect();
    if let Some(k) = norms.iter().position(|&v| v == 0.0 || !v.is_finite()) {
        return Err(Error::invalid(format!(
            "class column {k} has zero norm; cosine distance is undefined"
        )));
    }

    let projected = map.project(test_features);
    let results: Vec<(usize, bool)> = projected
        .outer_iter()
        .into_par_iter()
        .map(|u| {
            let u_norm = u.dot(&u).sqrt();
            if u_norm == 0.0 {
                return (0, true);
            }
            let mut best = (0, f64::INFINITY);
            for (k, col) in class_attrs.columns().into_iter().enumerate() {
                let dist = 1.0 - u.dot(&col) / (u_norm * norms[k]);
                if dist < best.1 {
                    best = (k, dist);
                }
            }
            (best.0, false)
        })
        .collect();

    Ok(Predictions {
        zero_norm: results.iter().filter(|r| r.1).count(),
        columns: results.into_iter().map(|r| r.0).collect(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZscResult {
    /// Test class ids, ascending; positions index `confusion`.
    pub classes: Vec<usize>,
    pub per_class_accuracy: BTreeMap<usize, f64>,
    pub mean_class_accuracy: f64,
    /// `confusion[[true, predicted]]` counts by class position.
    pub confusion: Array2<usize>,
    pub zero_norm_projections: usize,
}

impl ZscResult {
    pub fn samples_in(&self, pos: usize) -> usize {
        self.confusion.row(pos).sum()
    }

    pub fn correct_in(&self, pos: usize) -> usize {
        self.confusion[[pos, pos]]
    }

    /// `class_index,n_samples,n_correct,accuracy` per class, then a `mean`
    /// summary row with totals and the mean class accuracy.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "class_index,n_samples,n_correct,accuracy")?;
        let (mut total, mut correct) = (0, 0);
        for (pos, class) in self.classes.iter().enumerate() {
            let (n, c) = (self.samples_in(pos), self.correct_in(pos));
            total += n;
            correct += c;
            writeln!(out, "{class},{n},{c},{:.16e}", self.per_class_accuracy[class])?;
        }
        writeln!(out, "mean,{total},{correct},{:.16e}", self.mean_class_accuracy)
    }

    pub fn write_confusion_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for row in self.confusion.outer_iter() {
            let line: Vec<String> = row.iter().map(|c| c.to_string()).collect();
            writeln!(out, "{}", line.join(","))?;
        }
        Ok(())
    }
}

/// Per-class top-1 accuracy averaged uniformly over `classes`.
pub fn evaluate(predictions: &[usize], true_labels: &[usize], classes: &[usize]) -> Result<ZscResult> {
    if predictions.len() != true_labels.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} predictions for {} labels",
            predictions.len(),
            true_labels.len()
        )));
    }
    let mut classes = classes.to_vec();
    classes.sort_unstable();
    classes.dedup();
    if classes.is_empty() {
        return Err(Error::invalid("no test classes"));
    }
    let position = |c: usize| {
        classes
            .binary_search(&c)
            .map_err(|_| Error::invalid(format!("class {c} is not among the test classes")))
    };

    let k = classes.len();
    let mut confusion = Array2::<usize>::zeros((k, k));
    for (&p, &y) in predictions.iter().zip(true_labels) {
        confusion[[position(y)?, position(p)?]] += 1;
    }

    let mut per_class_accuracy = BTreeMap::new();
    for (pos, &class) in classes.iter().enumerate() {
        let total: usize = confusion.row(pos).sum();
        if total == 0 {
            return Err(Error::UndefinedClass(class));
        }
        per_class_accuracy.insert(class, confusion[[pos, pos]] as f64 / total as f64);
    }
    let mean_class_accuracy = per_class_accuracy.values().sum::<f64>() / k as f64;
    Ok(ZscResult {
        classes,
        per_class_accuracy,
        mean_class_accuracy,
        confusion,
        zero_norm_projections: 0,
    })
}

/// Predicts among `test_classes` (ids into `class_attrs` columns) and scores
/// the result against `true_labels`.
pub fn classify_and_evaluate(
    map: &LinearAttributeMap,
    test_features: ArrayView2<'_, f64>,
    true_labels: &[usize],
    class_attrs: ArrayView2<'_, f64>,
    test_classes: &[usize],
) -> Result<ZscResult> {
    let mut classes = test_classes.to_vec();
    classes.sort_unstable();
    classes.dedup();
    if let Some(&bad) = classes.iter().find(|&&c| c >= class_attrs.ncols()) {
        return Err(Error::invalid(format!("test class {bad} has no attribute column")));
    }
    let candidates = class_attrs.select(ndarray::Axis(1), &classes);
    let predictions = predict(map, test_features, candidates.view())?;
    let predicted: Vec<usize> = predictions.columns.iter().map(|&c| classes[c]).collect();
    let mut result = evaluate(&predicted, true_labels, &classes)?;
    result.zero_norm_projections = predictions.zero_norm;
    Ok(result)
}
