//! Refinement of weak class-level attribute annotations into per-sample
//! attributes.
//!
//! Samples are embedded in the Poincaré ball and joined by a relative
//! neighborhood graph under hyperbolic distance. Each sample's attributes
//! are compared with an inverse-distance-weighted vote of its neighbors, and
//! bits that disagree too strongly are flipped. A ridge-regression
//! zero-shot classifier measures how useful the refined attributes are.
//!
//! ```
//! use hyperattr::dataset::{generate_synthetic, SyntheticSpec};
//! use hyperattr::experiment::recovery_stats;
//! use hyperattr::pipeline::{propagate_attributes, PropagationConfig};
//!
//! let data = generate_synthetic(&SyntheticSpec { seed: 3, ..Default::default() }).unwrap();
//! let out = propagate_attributes(data.features.rows(), &data.observed, &PropagationConfig::default()).unwrap();
//! let stats = recovery_stats(&data.observed, &out.refined, &data.noise_mask).unwrap();
//! assert!(stats.reverted_fraction() > 0.5);
//! ```

pub mod attributes;
pub mod cli;
pub mod dataset;
pub mod error;
pub mod experiment;
pub mod geometry;
pub mod graph;
pub mod pipeline;
pub mod refine;
pub mod zsc;

pub use attributes::{expand_class_attributes, ClassAttributeMatrix, ImageAttributeMatrix};
pub use dataset::FeatureMatrix;
pub use error::{Error, Result};
pub use geometry::{
    embed_features, hyperbolic_distance, pairwise_distances, PoincarePoint, PoincarePointSet,
};
pub use graph::{build_graph, graph_stats, DistanceMatrix, Metric, NeighborhoodGraph, Topology};
pub use pipeline::{propagate, propagate_attributes, PropagationConfig, PropagationOutput};
pub use refine::{
    compute_edge_weights, identify_and_refine, neighborhood_consistency, Consistency,
    ConsistencyReport, EdgeWeights,
};
pub use zsc::{evaluate, predict, train_map, LinearAttributeMap, ZscResult};
