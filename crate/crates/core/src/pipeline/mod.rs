//! Radar frames to point graphs.
//!
//! Stage order: fuse the window, optionally downsample, compute the squared
//! distance matrix once, derive the neighbor table from it, then extract node,
//! edge and frame features. Both feature stages read distances from the same
//! matrix.

mod distance;
mod downsample;
mod features;
mod fusion;
mod graph;
mod knn;
pub mod naive;

pub use distance::SquaredDistanceMatrix;
pub use downsample::{cell_index, downsample};
pub use features::{edge_features, frame_features, node_features, raw_node_features, NODE_FEATURE_DIM, EDGE_FEATURE_DIM};
pub use fusion::fuse_frames;
pub use graph::{build_graph, build_graph_with_rng, GraphStats, Pipeline, PointGraph};
pub use knn::{knn_edges, NeighborTable};
