//! Radar point clouds as graphs.
//!
//! The crate turns sparse mmWave radar sweeps into directed KNN graphs with
//! statistical node, edge and frame features, evaluates an edge-aware graph
//! attention network on those graphs (with analytic gradients checked against
//! finite differences), and scores pose / activity predictions.
//!
//! Module map:
//!
//! * [`model`], [`config`], [`rng`]: domain types, pipeline configuration and
//!   the portable seeded generator.
//! * [`statbox`]: the 10-operator statistical feature bank.
//! * [`pipeline`]: fusion, grid downsampling, the shared distance matrix,
//!   neighbor tables and feature extraction.
//! * [`gnn`]: forward pass, gradients, parameter files.
//! * [`metrics`]: losses and evaluation metrics.
//! * [`io`], [`synthetic`], [`commands`]: file codecs, synthetic data and the
//!   command implementations behind the `pcfex` binary.

pub mod commands;
pub mod config;
pub mod error;
pub mod gnn;
pub mod io;
pub mod matrix;
pub mod metrics;
pub mod model;
pub mod pipeline;
pub mod rng;
pub mod statbox;
pub mod synthetic;

pub use config::PipelineConfig;
pub use error::{Error, Result};
pub use matrix::Matrix;
pub use model::{ActivityLabel, Label, PointField, RadarFrame, RadarPoint, Skeleton};
pub use rng::SeededRng;
pub use statbox::{statbox, statbox_columns, StatboxVector};
