//! Measurements shared by the command-line tool, the examples and the
//! benchmark tests: planted-noise recovery, zero-shot scoring and theta
//! sweeps.

use ndarray::{Array2, ArrayView2};

use crate::attributes::{ClassAttributeMatrix, ImageAttributeMatrix};
use crate::dataset::{split_by_class, FeatureMatrix};
use crate::error::{Error, Result};
use crate::graph::NeighborhoodGraph;
use crate::pipeline::refine_on_graph;
use crate::zsc::{classify_and_evaluate, train_map, ZscResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RecoveryStats {
    pub planted: usize,
    pub reverted: usize,
    pub clean: usize,
    pub clean_flipped: usize,
}

impl RecoveryStats {
    pub fn reverted_fraction(&self) -> f64 {
        if self.planted == 0 {
            return 1.0;
        }
        self.reverted as f64 / self.planted as f64
    }

    pub fn clean_flip_fraction(&self) -> f64 {
        if self.clean == 0 {
            return 0.0;
        }
        self.clean_flipped as f64 / self.clean as f64
    }
}

/// Compares a refinement against the cells known to be corrupted.
pub fn recovery_stats(
    observed: &ImageAttributeMatrix,
    refined: &ImageAttributeMatrix,
    noise_mask: &[(usize, usize)],
) -> Result<RecoveryStats> {
    if observed.values().dim() != refined.values().dim() {
        return Err(Error::DimensionMismatch("observed and refined shapes differ".into()));
    }
    let mut planted = noise_mask.to_vec();
    planted.sort_unstable();
    planted.dedup();
    let changed = observed.differing_cells(refined);
    let reverted = changed
        .iter()
        .filter(|c| planted.binary_search(c).is_ok())
        .count();
    let total = observed.attribute_count() * observed.sample_count();
    Ok(RecoveryStats {
        planted: planted.len(),
        reverted,
        clean: total - planted.len(),
        clean_flipped: changed.len() - reverted,
    })
}

/// A zero-shot evaluation with fixed training features and test data;
/// only the training targets vary between runs.
#[derive(Debug, Clone)]
pub struct ZeroShotTask {
    pub train_features: Array2<f64>,
    pub test_features: Array2<f64>,
    pub test_labels: Vec<usize>,
    pub class_attrs: Array2<f64>,
    pub test_classes: Vec<usize>,
    pub ridge_lambda: f64,
}

impl ZeroShotTask {
    /// Builds the task from separate training and test sets; their classes
    /// must not overlap.
    pub fn new(
        train: &FeatureMatrix,
        test: &FeatureMatrix,
        class_attrs: &ClassAttributeMatrix,
        ridge_lambda: f64,
    ) -> Result<Self> {
        let mut test_classes = test.labels().to_vec();
        test_classes.sort_unstable();
        test_classes.dedup();
        if let Some(c) = train.labels().iter().find(|c| test_classes.binary_search(c).is_ok()) {
            return Err(Error::invalid(format!(
                "class {c} appears in both training and test data; zero-shot classes must be disjoint"
            )));
        }
        if train.dim() != test.dim() {
            return Err(Error::DimensionMismatch(format!(
                "training features have {} columns, test features {}",
                train.dim(),
                test.dim()
            )));
        }
        Ok(Self {
            train_features: train.rows().to_owned(),
            test_features: test.rows().to_owned(),
            test_labels: test.labels().to_vec(),
            class_attrs: class_attrs.values().mapv(f64::from),
            test_classes,
            ridge_lambda,
        })
    }

    pub fn evaluate(&self, targets: &ImageAttributeMatrix) -> Result<ZscResult> {
        let map = train_map(self.train_features.view(), targets, self.ridge_lambda)?;
        classify_and_evaluate(
            &map,
            self.test_features.view(),
            &self.test_labels,
            self.class_attrs.view(),
            &self.test_classes,
        )
    }
}

/// Splits one labelled set into training samples and held-out classes.
#[derive(Debug, Clone)]
pub struct HeldOutSplit {
    pub train: FeatureMatrix,
    pub test: FeatureMatrix,
    pub train_indices: Vec<usize>,
    pub test_indices: Vec<usize>,
}

pub fn hold_out_classes(features: &FeatureMatrix, test_classes: &[usize]) -> Result<HeldOutSplit> {
    let split = split_by_class(features, test_classes)?;
    Ok(HeldOutSplit {
        train: features.select(&split.train),
        test: features.select(&split.test),
        train_indices: split.train,
        test_indices: split.test,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub theta: f64,
    pub flip_fraction: f64,
    pub mean_class_accuracy: f64,
}

/// Refines `initial` on `graph` at every theta and scores each result.
pub fn sweep_theta(
    graph: &NeighborhoodGraph,
    initial: &ImageAttributeMatrix,
    idw_p: f64,
    thetas: &[f64],
    task: &ZeroShotTask,
) -> Result<Vec<SweepRow>> {
    thetas
        .iter()
        .map(|&theta| {
            let (refined, report) = refine_on_graph(graph, initial, idw_p, theta)?;
            Ok(SweepRow {
                theta,
                flip_fraction: report.flip_fraction(),
                mean_class_accuracy: task.evaluate(&refined)?.mean_class_accuracy,
            })
        })
        .collect()
}

/// `0, 0.1, ..., 1.0`.
pub fn default_theta_grid() -> Vec<f64> {
    (0..=10).map(|k| k as f64 / 10.0).collect()
}

pub fn write_sweep_csv<W: std::io::Write>(rows: &[SweepRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "theta,flip_fraction,mean_class_accuracy")?;
    for r in rows {
        writeln!(
            out,
            "{},{:.16e},{:.16e}",
            r.theta, r.flip_fraction, r.mean_class_accuracy
        )?;
    }
    Ok(())
}

/// Mean of each column of `rows` (all rows the same length).
pub fn column_means(rows: ArrayView2<'_, f64>) -> Vec<f64> {
    rows.columns()
        .into_iter()
        .map(|c| c.sum() / c.len() as f64)
        .collect()
}
