//! Binary attribute matrices. Rows are attributes; columns are classes
//! (class-level annotations) or samples (image-level annotations).

use ndarray::{Array2, ArrayView2, Axis};

use crate::error::{Error, Result};

fn check_binary(values: &Array2<u8>) -> Result<()> {
    if values.nrows() == 0 {
        return Err(Error::invalid("attribute matrix has no attributes"));
    }
    if let Some(((r, c), v)) = values.indexed_iter().find(|(_, &v)| v > 1) {
        return Err(Error::invalid(format!(
            "attribute entry ({r}, {c}) is {v}, expected 0 or 1"
        )));
    }
    Ok(())
}

/// Class-level attributes, `M` attributes by `L` classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassAttributeMatrix(Array2<u8>);

impl ClassAttributeMatrix {
    pub fn new(values: Array2<u8>) -> Result<Self> {
        check_binary(&values)?;
        if values.ncols() == 0 {
            return Err(Error::invalid("class attribute matrix has no classes"));
        }
        Ok(Self(values))
    }

    pub fn attribute_count(&self) -> usize {
        self.0.nrows()
    }

    pub fn class_count(&self) -> usize {
        self.0.ncols()
    }

    pub fn values(&self) -> ArrayView2<'_, u8> {
        self.0.view()
    }

    /// Columns for the given classes, as reals, in the given order.
    pub fn columns_f64(&self, classes: &[usize]) -> Array2<f64> {
        self.0.select(Axis(1), classes).mapv(f64::from)
    }

    pub fn into_inner(self) -> Array2<u8> {
        self.0
    }
}

/// Per-sample attributes, `M` attributes by `N` samples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageAttributeMatrix(Array2<u8>);

impl ImageAttributeMatrix {
    pub fn new(values: Array2<u8>) -> Result<Self> {
        check_binary(&values)?;
        Ok(Self(values))
    }

    pub fn attribute_count(&self) -> usize {
        self.0.nrows()
    }

    pub fn sample_count(&self) -> usize {
        self.0.ncols()
    }

    pub fn get(&self, attribute: usize, sample: usize) -> u8 {
        self.0[[attribute, sample]]
    }

    pub fn values(&self) -> ArrayView2<'_, u8> {
        self.0.view()
    }

    pub fn to_f64(&self) -> Array2<f64> {
        self.0.mapv(f64::from)
    }

    /// Keeps only the given sample columns, in the given order.
    pub fn select_samples(&self, samples: &[usize]) -> Self {
        Self(self.0.select(Axis(1), samples))
    }

    /// Cells where `self` and `other` differ, sorted by (attribute, sample).
    pub fn differing_cells(&self, other: &Self) -> Vec<(usize, usize)> {
        assert_eq!(self.0.dim(), other.0.dim(), "shape mismatch");
        self.0
            .indexed_iter()
            .filter(|&((m, n), &v)| other.0[[m, n]] != v)
            .map(|(idx, _)| idx)
            .collect()
    }

    pub(crate) fn flip(&mut self, attribute: usize, sample: usize) {
        let cell = &mut self.0[[attribute, sample]];
        *cell = 1 - *cell;
    }

    pub fn into_inner(self) -> Array2<u8> {
        self.0
    }
}

/// Gives each sample the attribute column of its class.
pub fn expand_class_attributes(
    class_attrs: &ClassAttributeMatrix,
    labels: &[usize],
) -> Result<ImageAttributeMatrix> {
    let l = class_attrs.class_count();
    if let Some((n, &bad)) = labels.iter().enumerate().find(|(_, &y)| y >= l) {
        return Err(Error::invalid(format!(
            "label {bad} of sample {n} is out of range for {l} classes"
        )));
    }
    Ok(ImageAttributeMatrix(class_attrs.0.select(Axis(1), labels)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn single_class_broadcast() {
        let a = ClassAttributeMatrix::new(array![[1], [0]]).unwrap();
        let isa = expand_class_attributes(&a, &[0, 0, 0]).unwrap();
        assert_eq!(isa.values(), array![[1, 1, 1], [0, 0, 0]]);
    }

    #[test]
    fn columns_follow_labels() {
        let a = ClassAttributeMatrix::new(array![[1, 0], [0, 1], [1, 1]]).unwrap();
        let isa = expand_class_attributes(&a, &[0, 1, 0]).unwrap();
        assert_eq!(isa.values(), array![[1, 0, 1], [0, 1, 0], [1, 1, 1]]);
    }

    #[test]
    fn out_of_range_label() {
        let a = ClassAttributeMatrix::new(array![[1, 0]]).unwrap();
        assert!(matches!(
            expand_class_attributes(&a, &[0, 2]),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn non_binary_rejected() {
        assert!(ClassAttributeMatrix::new(array![[2u8]]).is_err());
        assert!(ImageAttributeMatrix::new(array![[0u8, 3]]).is_err());
    }
}
