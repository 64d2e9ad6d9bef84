//! Planted-noise benchmark data.
//!
//! Every cluster is one class with its own random binary attribute column.
//! Cluster centers are a random linear image of the (±1-coded) attribute
//! column, so features carry the attribute signal and a linear map learned
//! on some classes transfers to the others. Observed per-sample attributes
//! are the class columns with a fixed number of uniformly chosen cells
//! flipped.

use std::collections::HashSet;

use ndarray::Array2;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::FeatureMatrix;
use crate::attributes::{expand_class_attributes, ClassAttributeMatrix, ImageAttributeMatrix};
use crate::error::{Error, Result};

/// Minimum distance between two cluster centers, in units of the spread.
pub const MIN_SEPARATION: f64 = 6.0;

/// Typical center distance (attribute columns differing in half their
/// bits), in units of the spread.
const TYPICAL_SEPARATION: f64 = 12.0;

const MAX_ATTEMPTS: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub cluster_count: usize,
    pub points_per_cluster: usize,
    pub dimension: usize,
    /// Per-coordinate standard deviation of points around their center.
    pub cluster_spread: f64,
    pub attribute_count: usize,
    /// Fraction of attribute cells flipped; the count is
    /// `floor(noise_rate * M * N)`.
    pub noise_rate: f64,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            cluster_count: 5,
            points_per_cluster: 40,
            dimension: 16,
            cluster_spread: 1.0,
            attribute_count: 20,
            noise_rate: 0.1,
            seed: 0,
        }
    }
}

impl SyntheticSpec {
    fn validate(&self) -> Result<()> {
        if self.cluster_count == 0
            || self.points_per_cluster == 0
            || self.dimension == 0
            || self.attribute_count == 0
        {
            return Err(Error::invalid("synthetic spec counts must all be at least 1"));
        }
        if !(self.cluster_spread > 0.0 && self.cluster_spread.is_finite()) {
            return Err(Error::invalid("cluster spread must be positive"));
        }
        if !(0.0..=1.0).contains(&self.noise_rate) {
            return Err(Error::invalid("noise rate must lie in [0, 1]"));
        }
        Ok(())
    }

    pub fn sample_count(&self) -> usize {
        self.cluster_count * self.points_per_cluster
    }

    /// Number of planted flips.
    pub fn noise_count(&self) -> usize {
        let cells = (self.attribute_count * self.sample_count()) as f64;
        // the epsilon keeps products such as 0.29 * 100 from landing on 28
        (self.noise_rate * cells + 1e-9).floor() as usize
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticDataset {
    pub features: FeatureMatrix,
    pub class_attrs: ClassAttributeMatrix,
    pub ground_truth: ImageAttributeMatrix,
    pub observed: ImageAttributeMatrix,
    /// Flipped `(attribute, sample)` cells, sorted.
    pub noise_mask: Vec<(usize, usize)>,
}

pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<SyntheticDataset> {
    spec.validate()?;
    let (l, m, d) = (spec.cluster_count, spec.attribute_count, spec.dimension);
    // distinct, non-zero attribute columns
    if m < usize::BITS as usize && (1usize << m) - 1 < l {
        return Err(Error::Generation(format!(
            "{m} attributes cannot give {l} classes distinct non-zero columns"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let spread = spec.cluster_spread;
    let scale = TYPICAL_SEPARATION * spread / ((2 * d * m) as f64).sqrt();

    let mut placed = None;
    for _ in 0..MAX_ATTEMPTS {
        let attrs = random_columns(&mut rng, m, l);
        let projection = Array2::from_shape_simple_fn((d, m), || rng.sample::<f64, _>(StandardNormal));
        let signs = attrs.mapv(|a| 2.0 * f64::from(a) - 1.0);
        let centers = projection.dot(&signs).reversed_axes() * scale;
        if min_separation(&centers) >= MIN_SEPARATION * spread {
            placed = Some((attrs, centers));
            break;
        }
    }
    let (attrs, centers) = placed.ok_or_else(|| {
        Error::Generation(format!(
            "could not separate {l} clusters by {MIN_SEPARATION} spreads in dimension {d} \
             after {MAX_ATTEMPTS} attempts; try a higher dimension"
        ))
    })?;

    let n = spec.sample_count();
    let mut rows = Array2::<f64>::zeros((n, d));
    let mut labels = Vec::with_capacity(n);
    for c in 0..l {
        for p in 0..spec.points_per_cluster {
            let i = c * spec.points_per_cluster + p;
            for k in 0..d {
                rows[[i, k]] = centers[[c, k]] + spread * rng.sample::<f64, _>(StandardNormal);
            }
            labels.push(c);
        }
    }

    let class_attrs = ClassAttributeMatrix::new(attrs)?;
    let ground_truth = expand_class_attributes(&class_attrs, &labels)?;
    let mut noise_mask: Vec<(usize, usize)> = index::sample(&mut rng, m * n, spec.noise_count())
        .into_iter()
        .map(|cell| (cell / n, cell % n))
        .collect();
    noise_mask.sort_unstable();
    let mut observed = ground_truth.clone();
    for &(a, s) in &noise_mask {
        observed.flip(a, s);
    }

    Ok(SyntheticDataset {
        features: FeatureMatrix::new(rows, labels, l)?,
        class_attrs,
        ground_truth,
        observed,
        noise_mask,
    })
}

fn random_columns(rng: &mut ChaCha8Rng, m: usize, l: usize) -> Array2<u8> {
    let mut seen = HashSet::new();
    let mut attrs = Array2::<u8>::zeros((m, l));
    let mut c = 0;
    while c < l {
        let column: Vec<u8> = (0..m).map(|_| u8::from(rng.random::<bool>())).collect();
        if column.iter().all(|&v| v == 0) || !seen.insert(column.clone()) {
            continue;
        }
        for (a, v) in column.into_iter().enumerate() {
            attrs[[a, c]] = v;
        }
        c += 1;
    }
    attrs
}

fn min_separation(centers: &Array2<f64>) -> f64 {
    let l = centers.nrows();
    let mut best = f64::INFINITY;
    for i in 0..l {
        for j in (i + 1)..l {
            let diff = &centers.row(i) - &centers.row(j);
            best = best.min(diff.dot(&diff).sqrt());
        }
    }
    best
}
