//! Reference pipeline that recomputes every pairwise distance where it is
//! needed instead of sharing one matrix. Used by the benchmark harness as the
//! baseline for the shared-matrix speedup.

use super::distance::squared_distance;
use super::{frame_features, PointGraph, EDGE_FEATURE_DIM, NODE_FEATURE_DIM};
use crate::config::PipelineConfig;
use crate::error::Result;
use crate::matrix::Matrix;
use crate::model::{Label, RadarFrame};
use crate::statbox::statbox;

fn dist(frame: &RadarFrame, a: usize, b: usize) -> f64 {
    squared_distance(frame.points[a].position(), frame.points[b].position()).sqrt()
}

fn neighbors(frame: &RadarFrame, k: usize) -> Vec<Vec<usize>> {
    let n = frame.len();
    (0..n)
        .map(|t| {
            let mut cand: Vec<(f64, usize)> = (0..n)
                .filter(|&s| s != t)
                .map(|s| (squared_distance(frame.points[t].position(), frame.points[s].position()), s))
                .collect();
            cand.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            cand.into_iter().take(k).map(|(_, s)| s).collect()
        })
        .collect()
}

pub fn graph_from_frame(frame: &RadarFrame, config: &PipelineConfig, label: Option<Label>) -> Result<PointGraph> {
    let n = frame.len();
    let lists = neighbors(frame, config.k);
    let eps = config.epsilon;

    let node_table = if config.enable_node_features {
        let mut c = [0.0; 3];
        for p in &frame.points {
            c[0] += p.x;
            c[1] += p.y;
            c[2] += p.z;
        }
        let c = c.map(|s| s / n as f64);
        let mut m = Matrix::zeros(n, NODE_FEATURE_DIM);
        for j in 0..n {
            let p = frame.points[j];
            let row = m.row_mut(j);
            row[..5].copy_from_slice(&p.to_array());
            if !lists[j].is_empty() {
                let d: Vec<f64> = lists[j].iter().map(|&k| dist(frame, j, k)).collect();
                row[5..15].copy_from_slice(&statbox(&d, eps)?.to_array());
            }
            let to_c = [c[0] - p.x, c[1] - p.y, c[2] - p.z];
            let dc = (to_c[0] * to_c[0] + to_c[1] * to_c[1] + to_c[2] * to_c[2]).sqrt();
            row[15] = dc;
            if dc >= eps {
                for a in 0..3 {
                    row[16 + a] = to_c[a] / dc;
                }
            }
        }
        m
    } else {
        Matrix::from_rows(5, frame.points.iter().map(|p| p.to_array()))
    };

    let edges: Vec<(usize, usize)> = lists
        .iter()
        .enumerate()
        .flat_map(|(t, ns)| ns.iter().map(move |&s| (t, s)))
        .collect();

    let edge_table = if config.enable_edge_features {
        let mut m = Matrix::zeros(edges.len(), EDGE_FEATURE_DIM);
        for (e, &(t, s)) in edges.iter().enumerate() {
            let (pt, ps) = (frame.points[t], frame.points[s]);
            let d = dist(frame, t, s);
            let row = m.row_mut(e);
            row[0] = d;
            if d != 0.0 {
                row[1] = (ps.x - pt.x) / d;
                row[2] = (ps.y - pt.y) / d;
                row[3] = (ps.z - pt.z) / d;
            }
            row[4] = ps.v - pt.v;
            row[5] = ps.intensity - pt.intensity;
        }
        m
    } else {
        Matrix::zeros(edges.len(), 0)
    };

    let frame_vec = if config.enable_frame_features {
        frame_features(&node_table, eps)?
    } else {
        Vec::new()
    };

    Ok(PointGraph {
        sequence_id: frame.sequence_id,
        frame_id: frame.frame_id,
        node_features: node_table,
        edges,
        edge_features: edge_table,
        frame_features: frame_vec,
        label,
    })
}
