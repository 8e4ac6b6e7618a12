#![allow(dead_code)]

use pcfex_core::config::FeatureDims;
use pcfex_core::gnn::{HeadType, ModelParams, ModelShape};
use pcfex_core::pipeline::{build_graph, PointGraph};
use pcfex_core::{PipelineConfig, RadarFrame, RadarPoint, SeededRng};

pub fn random_frame(rng: &mut SeededRng, sequence_id: u64, frame_id: u64, n: usize) -> RadarFrame {
    let points = (0..n)
        .map(|_| {
            RadarPoint::new(
                rng.uniform(-1.0, 1.0),
                rng.uniform(1.0, 3.0),
                rng.uniform(0.0, 2.0),
                rng.uniform(-2.0, 2.0),
                rng.uniform(0.0, 40.0),
            )
        })
        .collect();
    RadarFrame::new(sequence_id, frame_id, points)
}

/// Frame whose coordinates sit on a coarse lattice, so distance ties are
/// common.
pub fn lattice_frame(rng: &mut SeededRng, n: usize) -> RadarFrame {
    let points = (0..n)
        .map(|_| {
            let c = |rng: &mut SeededRng| rng.below(4) as f64 * 0.5;
            RadarPoint::new(c(rng), c(rng), c(rng), rng.uniform(-1.0, 1.0), rng.uniform(0.0, 10.0))
        })
        .collect();
    RadarFrame::new(0, 0, points)
}

pub fn random_graph(rng: &mut SeededRng, n: usize, config: &PipelineConfig) -> PointGraph {
    let frame = random_frame(rng, 0, 0, n);
    build_graph(std::slice::from_ref(&frame), config, None).unwrap()
}

/// Default block widths with `gat_layers` attention layers.
pub fn default_shape(head: HeadType, gat_layers: usize) -> ModelShape {
    ModelShape {
        head,
        gat_widths: vec![32; gat_layers],
        ..ModelShape::default()
    }
}

pub fn random_params(shape: &ModelShape, dims: FeatureDims, seed: u64) -> ModelParams {
    ModelParams::init(shape, dims, &mut SeededRng::new(seed)).unwrap()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    a == b || (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}
