mod common;

use common::random_frame;
use pcfex_core::io::{decode_graph, encode_graph};
use pcfex_core::pipeline::{build_graph, downsample, fuse_frames, Pipeline};
use pcfex_core::{ActivityLabel, Error, Label, PipelineConfig, RadarFrame, RadarPoint, SeededRng};

#[test]
fn three_frame_window_has_full_dimensions() {
    let mut rng = SeededRng::new(1);
    let frames: Vec<RadarFrame> = [2, 3, 4].iter().enumerate().map(|(i, &n)| random_frame(&mut rng, 4, 10 + i as u64, n)).collect();
    let fused = fuse_frames(&frames).unwrap();
    assert_eq!(fused.len(), 9);
    assert_eq!((fused.sequence_id, fused.frame_id), (4, 12));

    let cfg = PipelineConfig {
        fusion_window: 3,
        ..Default::default()
    };
    let g = build_graph(&frames, &cfg, None).unwrap();
    assert_eq!((g.sequence_id, g.frame_id), (4, 12));
    assert_eq!(g.num_nodes(), 9);
    assert_eq!(g.node_features.cols(), 19);
    assert_eq!(g.edge_features.cols(), 6);
    assert_eq!(g.frame_features.len(), 380);
    // K = 20 clamps to n - 1
    assert_eq!(g.num_edges(), 9 * 8);
}

#[test]
fn gaps_and_mixed_sequences_are_rejected() {
    let mut rng = SeededRng::new(2);
    let a = random_frame(&mut rng, 0, 5, 3);
    let b = random_frame(&mut rng, 0, 7, 3);
    let c = random_frame(&mut rng, 1, 6, 3);
    assert!(matches!(fuse_frames(&[a.clone(), b]), Err(Error::NonConsecutiveFrames { .. })));
    assert!(matches!(fuse_frames(&[a, c]), Err(Error::SequenceMismatch { .. })));
}

#[test]
fn basic_mode_carries_raw_features_only() {
    let mut rng = SeededRng::new(3);
    let frame = random_frame(&mut rng, 0, 0, 12);
    let cfg = PipelineConfig {
        enable_node_features: false,
        enable_edge_features: false,
        enable_frame_features: false,
        ..Default::default()
    };
    let g = build_graph(std::slice::from_ref(&frame), &cfg, None).unwrap();
    assert_eq!(g.node_features.cols(), 5);
    assert_eq!(g.edge_features.cols(), 0);
    assert!(g.frame_features.is_empty());
    for (j, p) in frame.points.iter().enumerate() {
        assert_eq!(g.node_features.row(j), &[p.x, p.y, p.z, p.v, p.intensity]);
    }
    let dims = cfg.feature_dims();
    assert_eq!((dims.node, dims.edge, dims.frame), (5, 0, 0));
}

#[test]
fn empty_window_is_reported() {
    let cfg = PipelineConfig::default();
    let empty = RadarFrame::new(0, 0, vec![]);
    assert!(matches!(build_graph(&[empty], &cfg, None), Err(Error::EmptyInput)));
    assert!(matches!(build_graph(&[], &cfg, None), Err(Error::EmptyInput)));
}

#[test]
fn point_order_does_not_change_frame_features() {
    let mut rng = SeededRng::new(4);
    for _ in 0..20 {
        let n = 1 + rng.below_usize(30);
        let frame = random_frame(&mut rng, 0, 0, n);
        let mut points = frame.points.clone();
        points.reverse();
        let cfg = PipelineConfig { k: 4, ..Default::default() };
        let a = build_graph(std::slice::from_ref(&frame), &cfg, None).unwrap();
        let b = build_graph(&[RadarFrame::new(0, 0, points)], &cfg, None).unwrap();
        for (x, y) in a.frame_features.iter().zip(&b.frame_features) {
            assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0), "{x} vs {y}");
        }
    }
}

#[test]
fn downsampling_caps_each_cell() {
    let points: Vec<RadarPoint> = (0..5).map(|i| RadarPoint::new(0.001 * i as f64, 0.0, 0.0, i as f64, 1.0)).collect();
    let frame = RadarFrame::new(0, 0, points);
    let kept = downsample(&frame, [0.035; 3], 2, &mut SeededRng::new(9));
    assert_eq!(kept.len(), 2);
    assert_eq!(downsample(&frame, [0.035; 3], 5, &mut SeededRng::new(9)), frame);

    let mut rng = SeededRng::new(10);
    let cloud = random_frame(&mut rng, 0, 0, 100);
    let cfg = PipelineConfig {
        downsample_enabled: true,
        cell_width: [0.035; 3],
        q: 1,
        seed: 11,
        ..Default::default()
    };
    let a = build_graph(std::slice::from_ref(&cloud), &cfg, None).unwrap();
    let b = build_graph(std::slice::from_ref(&cloud), &cfg, None).unwrap();
    assert_eq!(a, b);
}

#[test]
fn labels_and_records_survive_a_round_trip() {
    let mut rng = SeededRng::new(12);
    let frame = random_frame(&mut rng, 3, 8, 15);
    let label = Label::Activity(ActivityLabel::new(2, 5).unwrap());
    let cfg = PipelineConfig { k: 5, ..Default::default() };
    let g = build_graph(std::slice::from_ref(&frame), &cfg, Some(label.clone())).unwrap();
    assert_eq!(g.label, Some(label));
    assert_eq!(decode_graph(&encode_graph(&g)).unwrap(), g);
}

#[test]
fn stage_runner_matches_build() {
    let mut rng = SeededRng::new(13);
    let frame = random_frame(&mut rng, 0, 0, 25);
    let cfg = PipelineConfig { k: 6, ..Default::default() };
    let pipeline = Pipeline::new(&cfg).unwrap();
    let direct = pipeline.graph_from_frame(&frame, None).unwrap();
    assert_eq!(direct, build_graph(std::slice::from_ref(&frame), &cfg, None).unwrap());
    assert!(Pipeline::new(&PipelineConfig { k: 0, ..cfg }).is_err());
}
