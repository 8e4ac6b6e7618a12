use super::{
    downsample, edge_features, frame_features, fuse_frames, knn_edges, node_features,
    raw_node_features, NeighborTable, SquaredDistanceMatrix,
};
use crate::config::PipelineConfig;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::model::{Label, RadarFrame};
use crate::rng::SeededRng;

/// One frame as a directed KNN graph with its feature tables.
#[derive(Debug, Clone, PartialEq)]
pub struct PointGraph {
    pub sequence_id: u64,
    pub frame_id: u64,
    /// `n x 19`, or `n x 5` when node feature extraction is off.
    pub node_features: Matrix,
    /// `(target, source)` pairs.
    pub edges: Vec<(usize, usize)>,
    /// `E x 6`, or `E x 0` when edge feature extraction is off.
    pub edge_features: Matrix,
    /// Empty when frame feature extraction is off.
    pub frame_features: Vec<f64>,
    pub label: Option<Label>,
}

impl PointGraph {
    pub fn num_nodes(&self) -> usize {
        self.node_features.rows()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Sources grouped by target, in edge order.
    pub fn neighbor_lists(&self) -> Vec<Vec<usize>> {
        let mut lists = vec![Vec::new(); self.num_nodes()];
        for &(t, s) in &self.edges {
            lists[t].push(s);
        }
        lists
    }
}

/// Point and edge counts observed while building one graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct GraphStats {
    pub points_fused: usize,
    pub points_kept: usize,
    pub edges: usize,
}

/// Stage runner bound to one configuration. Stages whose extraction flag is
/// off return [`Error::FeatureDisabled`].
#[derive(Debug, Clone, Copy)]
pub struct Pipeline<'a> {
    config: &'a PipelineConfig,
}

impl<'a> Pipeline<'a> {
    pub fn new(config: &'a PipelineConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self { config })
    }

    pub fn config(&self) -> &PipelineConfig {
        self.config
    }

    pub fn prepare_frame(&self, frames: &[RadarFrame], rng: &mut SeededRng) -> Result<RadarFrame> {
        let fused = fuse_frames(frames)?;
        if self.config.downsample_enabled {
            Ok(downsample(&fused, self.config.cell_width, self.config.q, rng))
        } else {
            Ok(fused)
        }
    }

    pub fn node_features(
        &self,
        frame: &RadarFrame,
        d2: &SquaredDistanceMatrix,
        neighbors: &NeighborTable,
    ) -> Result<Matrix> {
        if !self.config.enable_node_features {
            return Err(Error::FeatureDisabled("node"));
        }
        node_features(frame, d2, neighbors, self.config.epsilon)
    }

    pub fn edge_features(
        &self,
        frame: &RadarFrame,
        d2: &SquaredDistanceMatrix,
        neighbors: &NeighborTable,
    ) -> Result<Matrix> {
        if !self.config.enable_edge_features {
            return Err(Error::FeatureDisabled("edge"));
        }
        Ok(edge_features(frame, d2, neighbors))
    }

    pub fn frame_features(&self, node_table: &Matrix) -> Result<Vec<f64>> {
        if !self.config.enable_frame_features {
            return Err(Error::FeatureDisabled("frame"));
        }
        frame_features(node_table, self.config.epsilon)
    }

    /// Builds the graph of an already fused (and downsampled) frame.
    ///
    /// An empty frame yields an empty graph, except that frame features
    /// cannot be computed over zero points and surface [`Error::EmptyInput`].
    pub fn graph_from_frame(&self, frame: &RadarFrame, label: Option<Label>) -> Result<PointGraph> {
        let cfg = self.config;
        let d2 = SquaredDistanceMatrix::compute(frame);
        let neighbors = knn_edges(&d2, cfg.k);
        let node_table = if cfg.enable_node_features {
            self.node_features(frame, &d2, &neighbors)?
        } else {
            raw_node_features(frame)
        };
        let edge_table = if cfg.enable_edge_features {
            self.edge_features(frame, &d2, &neighbors)?
        } else {
            Matrix::zeros(neighbors.num_edges(), 0)
        };
        let frame_vec = if cfg.enable_frame_features {
            self.frame_features(&node_table)?
        } else {
            Vec::new()
        };
        Ok(PointGraph {
            sequence_id: frame.sequence_id,
            frame_id: frame.frame_id,
            node_features: node_table,
            edges: neighbors.edges(),
            edge_features: edge_table,
            frame_features: frame_vec,
            label,
        })
    }

    pub fn build(
        &self,
        frames: &[RadarFrame],
        label: Option<Label>,
        rng: &mut SeededRng,
    ) -> Result<(PointGraph, GraphStats)> {
        let points_fused = frames.iter().map(RadarFrame::len).sum();
        let frame = self.prepare_frame(frames, rng)?;
        let graph = self.graph_from_frame(&frame, label)?;
        let stats = GraphStats {
            points_fused,
            points_kept: frame.len(),
            edges: graph.num_edges(),
        };
        Ok((graph, stats))
    }
}

/// Fuse, downsample, and extract features for one window of frames.
///
/// The downsampling stream is derived from `(seed, sequence_id, frame_id)` of
/// the window's last frame, so results do not depend on processing order.
pub fn build_graph(
    frames: &[RadarFrame],
    config: &PipelineConfig,
    label: Option<Label>,
) -> Result<PointGraph> {
    let last = frames.last().ok_or(Error::EmptyInput)?;
    let mut rng = SeededRng::for_frame(config.seed, last.sequence_id, last.frame_id);
    build_graph_with_rng(frames, config, label, &mut rng)
}

pub fn build_graph_with_rng(
    frames: &[RadarFrame],
    config: &PipelineConfig,
    label: Option<Label>,
    rng: &mut SeededRng,
) -> Result<PointGraph> {
    Pipeline::new(config)?.build(frames, label, rng).map(|(g, _)| g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{RadarPoint, Skeleton};

    fn random_frame(seq: u64, id: u64, n: usize, rng: &mut SeededRng) -> RadarFrame {
        let points = (0..n)
            .map(|_| {
                RadarPoint::new(
                    rng.uniform(-1.0, 1.0),
                    rng.uniform(1.0, 3.0),
                    rng.uniform(0.0, 2.0),
                    rng.uniform(-1.0, 1.0),
                    rng.uniform(0.0, 30.0),
                )
            })
            .collect();
        RadarFrame::new(seq, id, points)
    }

    #[test]
    fn full_feature_dimensions() {
        let mut rng = SeededRng::new(3);
        let frames: Vec<_> = (0..3).map(|i| random_frame(0, 10 + i, 12, &mut rng)).collect();
        let label = Label::Pose(Skeleton::new(vec![[0.0; 3]; 17], 0).unwrap());
        let g = build_graph(&frames, &PipelineConfig::default(), Some(label.clone())).unwrap();
        assert_eq!(g.frame_id, 12);
        assert_eq!(g.num_nodes(), 36);
        assert_eq!(g.node_features.cols(), 19);
        assert_eq!(g.edge_features.shape(), (36 * 20, 6));
        assert_eq!(g.frame_features.len(), 380);
        assert_eq!(g.label, Some(label));
    }

    #[test]
    fn basic_mode_uses_raw_features() {
        let mut rng = SeededRng::new(4);
        let frames = vec![random_frame(0, 0, 8, &mut rng)];
        let cfg = PipelineConfig {
            enable_node_features: false,
            enable_edge_features: false,
            enable_frame_features: false,
            ..PipelineConfig::default()
        };
        let g = build_graph(&frames, &cfg, None).unwrap();
        assert_eq!(g.node_features.cols(), 5);
        assert_eq!(g.edge_features.cols(), 0);
        assert_eq!(g.num_edges(), 8 * 7);
        assert!(g.frame_features.is_empty());
        assert_eq!(g.node_features.row(0), &frames[0].points[0].to_array());
    }

    #[test]
    fn empty_frame_behaviour() {
        let frames = vec![RadarFrame::new(0, 0, vec![])];
        assert!(matches!(
            build_graph(&frames, &PipelineConfig::default(), None),
            Err(Error::EmptyInput)
        ));
        let cfg = PipelineConfig {
            enable_frame_features: false,
            ..PipelineConfig::default()
        };
        let g = build_graph(&frames, &cfg, None).unwrap();
        assert_eq!(g.num_nodes(), 0);
        assert_eq!(g.num_edges(), 0);
    }

    #[test]
    fn disabled_stage_reports_feature_disabled() {
        let cfg = PipelineConfig {
            enable_node_features: false,
            ..PipelineConfig::default()
        };
        let pipeline = Pipeline::new(&cfg).unwrap();
        let frame = random_frame(0, 0, 4, &mut SeededRng::new(1));
        let d2 = SquaredDistanceMatrix::compute(&frame);
        let nt = knn_edges(&d2, 2);
        assert!(matches!(
            pipeline.node_features(&frame, &d2, &nt),
            Err(Error::FeatureDisabled("node"))
        ));
    }

    #[test]
    fn edge_count_formula() {
        let mut rng = SeededRng::new(8);
        for n in [1usize, 2, 5, 21, 30] {
            let frame = random_frame(0, 0, n, &mut rng);
            let g = build_graph(std::slice::from_ref(&frame), &PipelineConfig::default(), None).unwrap();
            assert_eq!(g.num_edges(), n * 20usize.min(n - 1));
            let mut seen = std::collections::HashSet::new();
            for &(t, s) in &g.edges {
                assert_ne!(t, s);
                assert!(t < n && s < n);
                assert!(seen.insert((t, s)));
            }
        }
    }
}
