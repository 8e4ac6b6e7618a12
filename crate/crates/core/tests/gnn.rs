mod common;

use std::collections::BTreeSet;

use common::{default_shape, max_abs_diff, random_graph, random_params};
use pcfex_core::config::FeatureDims;
use pcfex_core::gnn::{
    frame_representation, frame_representation_batch, grad_check, loss_and_gradients, predict_framewise,
    node_states, predict_sequential, ActivationPolicy, BiLstm, GradCheckOptions, HeadType, Loss, ModelParams, ModelShape,
    Prediction,
};
use pcfex_core::pipeline::build_graph;
use pcfex_core::{Error, Matrix, PipelineConfig, RadarFrame, RadarPoint, SeededRng};

fn linear_shape(head: HeadType) -> ModelShape {
    ModelShape {
        head,
        keypoints: 4,
        classes: 3,
        edge_widths: vec![4],
        node_widths: vec![6],
        gat_widths: vec![5],
        frame_widths: vec![3],
        pred_hidden: vec![],
        edge_activation: ActivationPolicy::None,
        node_activation: ActivationPolicy::None,
        frame_activation: ActivationPolicy::None,
        pred_activation: ActivationPolicy::None,
        gat_activation: false,
        ..ModelShape::default()
    }
}

fn unit_scale_graph(rng: &mut SeededRng, n: usize, cfg: &PipelineConfig) -> pcfex_core::pipeline::PointGraph {
    let points = (0..n)
        .map(|_| RadarPoint::new(rng.unit_f64(), rng.unit_f64(), rng.unit_f64(), rng.unit_f64(), rng.unit_f64()))
        .collect();
    build_graph(&[RadarFrame::new(0, 0, points)], cfg, None).unwrap()
}

#[test]
fn gradients_of_a_linear_network_are_exact_to_rounding() {
    // no rectifiers anywhere except the attention LeakyReLU
    let cfg = PipelineConfig { k: 4, ..Default::default() };
    let mut rng = SeededRng::new(3);
    for (i, head) in [HeadType::Pose, HeadType::Activity].into_iter().enumerate() {
        let shape = linear_shape(head);
        let params = random_params(&shape, cfg.feature_dims(), 10 + i as u64);
        let graph = unit_scale_graph(&mut rng, 7, &cfg);
        // cross-entropy sits near 1 with small class gradients, so its
        // roundoff floor is higher
        let (loss, bound) = match head {
            HeadType::Pose => (Loss::Mse((0..12).map(|j| j as f64 * 0.1).collect()), 1e-7),
            HeadType::Activity => (Loss::CrossEntropy(2), 1e-6),
        };
        // finite-difference roundoff is about 1e-11 absolute at this step, so
        // entries below 1e-4 are compared on an absolute scale
        let options = GradCheckOptions {
            abs_floor: 1e-4,
            ..Default::default()
        };
        let report = grad_check(&params, &graph, &loss, &options).unwrap();
        assert!(report.max_rel_error() < bound, "{report:#?}");
        assert_eq!(report.checked(), params.num_parameters());
        assert!(report.flagged() * 20 < report.checked());
    }
}

#[test]
fn gradients_without_edge_or_frame_features() {
    let cfg = PipelineConfig {
        k: 3,
        enable_edge_features: false,
        enable_frame_features: false,
        ..Default::default()
    };
    let shape = default_shape(HeadType::Activity, 2);
    let params = random_params(&shape, cfg.feature_dims(), 5);
    assert!(params.h_edge.is_none() && params.h_frame.is_none());
    let graph = random_graph(&mut SeededRng::new(8), 6, &cfg);
    let report = grad_check(&params, &graph, &Loss::CrossEntropy(1), &GradCheckOptions::default()).unwrap();
    assert!(report.max_rel_error() < 1e-4, "{report:#?}");
}

#[test]
fn loss_value_matches_prediction() {
    let cfg = PipelineConfig { k: 5, ..Default::default() };
    let shape = default_shape(HeadType::Pose, 2);
    let params = random_params(&shape, cfg.feature_dims(), 1);
    let graph = random_graph(&mut SeededRng::new(2), 9, &cfg);
    let target = vec![0.25; 51];
    let (value, grads) = loss_and_gradients(&params, &graph, &Loss::Mse(target.clone())).unwrap();
    let pred = predict_framewise(&params, &graph).unwrap().values();
    let direct = pred.iter().zip(&target).map(|(p, t)| (p - t).powi(2)).sum::<f64>() / 51.0;
    assert!((value - direct).abs() < 1e-12);
    let names: Vec<String> = params.tensors().into_iter().map(|(n, _)| n).collect();
    let grad_names: Vec<String> = grads.iter().map(|(n, _)| n.clone()).collect();
    assert_eq!(grad_names, names);
}

#[test]
fn batched_representation_equals_per_graph() {
    let cfg = PipelineConfig { k: 6, ..Default::default() };
    let shape = default_shape(HeadType::Pose, 3);
    let params = random_params(&shape, cfg.feature_dims(), 4);
    let mut rng = SeededRng::new(12);
    let graphs: Vec<_> = [3usize, 10, 1, 7].iter().map(|&n| random_graph(&mut rng, n, &cfg)).collect();
    let batched = frame_representation_batch(&params, &graphs).unwrap();
    assert_eq!(batched.rows(), graphs.len());
    for (i, g) in graphs.iter().enumerate() {
        let single = frame_representation(&params, g).unwrap();
        assert!(max_abs_diff(batched.row(i), &single) < 1e-12);
    }
}

#[test]
fn zero_weights_give_zero_skeletons() {
    let cfg = PipelineConfig::default();
    let shape = ModelShape::default();
    let params = ModelParams::zeros(&shape, cfg.feature_dims()).unwrap();
    let graph = random_graph(&mut SeededRng::new(0), 12, &cfg);
    match predict_framewise(&params, &graph).unwrap() {
        Prediction::Pose(s) => {
            assert_eq!(s.num_keypoints(), 17);
            assert!(s.flatten().iter().all(|&v| v == 0.0));
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn sequential_head_differs_from_framewise() {
    let cfg = PipelineConfig { k: 4, ..Default::default() };
    let dims = cfg.feature_dims();
    // representation: 32 pooled + 32 frame; 2 * hidden must also be 64 so the
    // same prediction block serves both heads
    let shape = ModelShape {
        recurrent_hidden: 32,
        sequence_length: 1,
        ..default_shape(HeadType::Pose, 2)
    };
    let params = random_params(&shape, dims, 21);
    assert_eq!(params.representation_dim(), 64);
    let graph = random_graph(&mut SeededRng::new(9), 8, &cfg);
    let framewise = predict_framewise(&params, &graph).unwrap().values();
    let sequential = predict_sequential(&params, std::slice::from_ref(&graph)).unwrap().values();
    assert_eq!(framewise.len(), sequential.len());
    assert!(max_abs_diff(&framewise, &sequential) > 1e-6);

    let mut no_cell = params.clone();
    no_cell.recurrent = None;
    assert!(matches!(
        predict_sequential(&no_cell, std::slice::from_ref(&graph)),
        Err(Error::MissingRecurrentParams)
    ));
}

#[test]
fn sequential_order_matters() {
    let cfg = PipelineConfig { k: 4, ..Default::default() };
    let shape = ModelShape {
        recurrent_hidden: 32,
        sequence_length: 3,
        ..default_shape(HeadType::Activity, 1)
    };
    let params = random_params(&shape, cfg.feature_dims(), 2);
    let mut rng = SeededRng::new(4);
    let graphs: Vec<_> = (0..3).map(|_| random_graph(&mut rng, 6, &cfg)).collect();
    let fwd = predict_sequential(&params, &graphs).unwrap().values();
    let mut reversed = graphs.clone();
    reversed.reverse();
    let rev = predict_sequential(&params, &reversed).unwrap().values();
    assert!(max_abs_diff(&fwd, &rev) > 1e-9);
}

#[test]
fn dimension_errors_are_reported() {
    let cfg = PipelineConfig::default();
    let shape = ModelShape::default();
    let params = random_params(&shape, FeatureDims { node: 19, edge: 6, frame: 380 }, 0);
    let other = PipelineConfig { enable_frame_features: false, ..cfg };
    let graph = random_graph(&mut SeededRng::new(1), 5, &other);
    assert!(matches!(predict_framewise(&params, &graph), Err(Error::DimensionMismatch { .. })));

    let bilstm = BiLstm::zeros(10, 4);
    let mut p = params.clone();
    p.recurrent = Some(bilstm);
    let good = random_graph(&mut SeededRng::new(1), 5, &PipelineConfig::default());
    assert!(predict_sequential(&p, std::slice::from_ref(&good)).is_err());
}

fn changed_rows(a: &Matrix, b: &Matrix) -> BTreeSet<usize> {
    (0..a.rows()).filter(|&r| a.row(r) != b.row(r)).collect()
}

#[test]
fn node_changes_stay_within_reach_of_the_gat_stack() {
    let mut rng = SeededRng::new(33);
    let cfg = PipelineConfig { k: 2, ..Default::default() };
    for layers in 0..=3 {
        for trial in 0..5 {
            let graph = random_graph(&mut rng, 14, &cfg);
            let shape = default_shape(HeadType::Pose, layers);
            let params = random_params(&shape, cfg.feature_dims(), 70 + trial);
            let u = rng.below_usize(graph.num_nodes());
            let mut zeroed = graph.clone();
            zeroed.node_features.row_mut(u).fill(0.0);

            // targets aggregate from sources, so influence flows source -> target
            let mut reach = BTreeSet::from([u]);
            for _ in 0..layers {
                let next: Vec<usize> = graph.edges.iter().filter(|(_, s)| reach.contains(s)).map(|&(t, _)| t).collect();
                reach.extend(next);
            }
            let before = node_states(&params, &graph).unwrap();
            let after = node_states(&params, &zeroed).unwrap();
            let changed = changed_rows(&before, &after);
            assert!(changed.is_subset(&reach), "layers {layers}: {changed:?} outside {reach:?}");
            assert!(changed.contains(&u));
            if layers == 0 {
                assert_eq!(changed, BTreeSet::from([u]));
            }
        }
    }
}
