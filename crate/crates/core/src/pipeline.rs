//! End-to-end refinement: embed, measure, connect, weigh, score, flip.

use ndarray::ArrayView2;

use crate::attributes::{expand_class_attributes, ClassAttributeMatrix, ImageAttributeMatrix};
use crate::dataset::FeatureMatrix;
use crate::error::{Error, Result};
use crate::geometry::{self, DEFAULT_MAX_NORM};
use crate::graph::{build_graph, Metric, NeighborhoodGraph, Topology};
use crate::refine::{
    compute_edge_weights, identify_and_refine, neighborhood_consistency, ConsistencyReport,
    DEFAULT_IDW_P, DEFAULT_THETA,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagationConfig {
    pub metric: Metric,
    pub topology: Topology,
    pub target_max_norm: f64,
    /// Subtract the feature mean before rescaling into the ball.
    pub center: bool,
    pub idw_p: f64,
    pub theta: f64,
}

impl Default for PropagationConfig {
    fn default() -> Self {
        Self {
            metric: Metric::Hyperbolic,
            topology: Topology::RelativeNeighborhood,
            target_max_norm: DEFAULT_MAX_NORM,
            center: false,
            idw_p: DEFAULT_IDW_P,
            theta: DEFAULT_THETA,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PropagationOutput {
    pub refined: ImageAttributeMatrix,
    pub report: ConsistencyReport,
    pub graph: NeighborhoodGraph,
}

/// Builds the neighborhood graph of the feature rows.
pub fn feature_graph(features: ArrayView2<'_, f64>, config: &PropagationConfig) -> Result<NeighborhoodGraph> {
    let points = if config.center {
        geometry::embed_features_centered(features, config.target_max_norm)?
    } else {
        geometry::embed_features(features, config.target_max_norm)?
    };
    let distances = geometry::pairwise_distances_with(&points, config.metric)?;
    build_graph(&distances, config.topology)
}

/// Scores and refines `attrs` on an already built graph.
pub fn refine_on_graph(
    graph: &NeighborhoodGraph,
    attrs: &ImageAttributeMatrix,
    idw_p: f64,
    theta: f64,
) -> Result<(ImageAttributeMatrix, ConsistencyReport)> {
    let weights = compute_edge_weights(graph, idw_p)?;
    let scores = neighborhood_consistency(attrs, &weights, graph)?;
    identify_and_refine(attrs, &scores, theta)
}

/// Refines an arbitrary starting per-sample attribute matrix.
pub fn propagate_attributes(
    features: ArrayView2<'_, f64>,
    initial: &ImageAttributeMatrix,
    config: &PropagationConfig,
) -> Result<PropagationOutput> {
    if initial.sample_count() != features.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "{} feature rows but {} attribute columns",
            features.nrows(),
            initial.sample_count()
        )));
    }
    let graph = feature_graph(features, config)?;
    let (refined, report) = refine_on_graph(&graph, initial, config.idw_p, config.theta)?;
    Ok(PropagationOutput {
        refined,
        report,
        graph,
    })
}

/// Expands class-level attributes to samples and refines them.
pub fn propagate(
    features: &FeatureMatrix,
    class_attrs: &ClassAttributeMatrix,
    config: &PropagationConfig,
) -> Result<PropagationOutput> {
    let initial = expand_class_attributes(class_attrs, features.labels())?;
    propagate_attributes(features.rows(), &initial, config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn two_samples_same_class_is_a_fixed_point() {
        let features = FeatureMatrix::new(array![[1.0, 0.0], [0.0, 2.0]], vec![0, 0], 1).unwrap();
        let class_attrs = ClassAttributeMatrix::new(array![[1], [0], [1]]).unwrap();
        let out = propagate(&features, &class_attrs, &PropagationConfig::default()).unwrap();
        assert_eq!(out.graph.edge_count(), 1);
        assert!(out.report.consistency.iter().all(|&j| j == 1.0));
        assert_eq!(out.refined.values(), array![[1, 1], [0, 0], [1, 1]]);
    }

    #[test]
    fn mismatched_columns() {
        let attrs = ImageAttributeMatrix::new(array![[1, 0, 1]]).unwrap();
        assert!(matches!(
            propagate_attributes(array![[1.0], [2.0]].view(), &attrs, &PropagationConfig::default()),
            Err(Error::DimensionMismatch(_))
        ));
    }
}
