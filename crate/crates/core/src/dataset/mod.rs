//! Feature matrices, on-disk formats, class splits and synthetic benchmarks.

mod formats;
mod synthetic;

pub use formats::{
    load_dataset, read_attribute_matrix, read_f64_matrix, read_labels, read_noise_mask,
    write_attribute_matrix, write_f64_matrix, write_labels, write_noise_mask, Format,
    BINARY_MAGIC, BINARY_VERSION,
};
pub use synthetic::{generate_synthetic, SyntheticDataset, SyntheticSpec};

use ndarray::{Array2, ArrayView2, Axis};

use crate::error::{Error, Result};

/// `N x d` real features with one class label per row.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    rows: Array2<f64>,
    labels: Vec<usize>,
    class_count: usize,
}

impl FeatureMatrix {
    pub fn new(rows: Array2<f64>, labels: Vec<usize>, class_count: usize) -> Result<Self> {
        if rows.nrows() == 0 || rows.ncols() == 0 {
            return Err(Error::invalid(format!(
                "feature matrix must be non-empty, got {}x{}",
                rows.nrows(),
                rows.ncols()
            )));
        }
        if labels.len() != rows.nrows() {
            return Err(Error::DimensionMismatch(format!(
                "{} feature rows but {} labels",
                rows.nrows(),
                labels.len()
            )));
        }
        if let Some((i, _)) = rows.indexed_iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::invalid(format!("feature entry {i:?} is not finite")));
        }
        if let Some(&bad) = labels.iter().find(|&&y| y >= class_count) {
            return Err(Error::invalid(format!(
                "label {bad} is out of range for {class_count} classes"
            )));
        }
        Ok(Self {
            rows,
            labels,
            class_count,
        })
    }

    pub fn len(&self) -> usize {
        self.rows.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.nrows() == 0
    }

    pub fn dim(&self) -> usize {
        self.rows.ncols()
    }

    pub fn rows(&self) -> ArrayView2<'_, f64> {
        self.rows.view()
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn class_count(&self) -> usize {
        self.class_count
    }

    /// Rows at the given indices, in order; labels follow.
    pub fn select(&self, indices: &[usize]) -> Self {
        Self {
            rows: self.rows.select(Axis(0), indices),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            class_count: self.class_count,
        }
    }
}

/// Sample indices of a zero-shot split: training classes and held-out classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassSplit {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
    pub test_classes: Vec<usize>,
}

/// Holds out every sample whose label is in `test_classes`.
pub fn split_by_class(features: &FeatureMatrix, test_classes: &[usize]) -> Result<ClassSplit> {
    let mut test_classes = test_classes.to_vec();
    test_classes.sort_unstable();
    test_classes.dedup();
    if let Some(&bad) = test_classes.iter().find(|&&c| c >= features.class_count()) {
        return Err(Error::invalid(format!("test class {bad} does not exist")));
    }
    let (test, train): (Vec<usize>, Vec<usize>) =
        (0..features.len()).partition(|&i| test_classes.binary_search(&features.labels[i]).is_ok());
    if train.is_empty() || test.is_empty() {
        return Err(Error::InsufficientData(
            "split leaves no training or no test samples".into(),
        ));
    }
    Ok(ClassSplit {
        train,
        test,
        test_classes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn feature_matrix_checks() {
        assert!(FeatureMatrix::new(array![[1.0], [2.0]], vec![0], 1).is_err());
        assert!(FeatureMatrix::new(array![[f64::INFINITY]], vec![0], 1).is_err());
        assert!(FeatureMatrix::new(array![[1.0]], vec![1], 1).is_err());
        assert!(FeatureMatrix::new(Array2::zeros((0, 2)), vec![], 1).is_err());
    }

    #[test]
    fn split_partitions_by_label() {
        let f = FeatureMatrix::new(array![[0.0], [1.0], [2.0], [3.0]], vec![0, 2, 1, 2], 3).unwrap();
        let s = split_by_class(&f, &[2]).unwrap();
        assert_eq!(s.train, vec![0, 2]);
        assert_eq!(s.test, vec![1, 3]);
        assert_eq!(f.select(&s.test).labels(), &[2, 2]);
        assert!(split_by_class(&f, &[0, 1, 2]).is_err());
        assert!(split_by_class(&f, &[5]).is_err());
    }
}
