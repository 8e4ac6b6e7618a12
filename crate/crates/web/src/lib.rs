//! Browser bindings: generate a synthetic radar sequence, turn a frame into
//! a KNN graph under adjustable downsampling, and evaluate the statistical
//! feature bank on user input.

use pcfex_core::pipeline::{build_graph, PointGraph};
use pcfex_core::statbox::STATBOX_NAMES;
use pcfex_core::synthetic::{generate, MotionModel, SyntheticData, SyntheticSpec};
use pcfex_core::{statbox, Error, PipelineConfig, Result};
use wasm_bindgen::prelude::*;

fn js(e: Error) -> JsError {
    JsError::new(&e.to_string())
}

/// One synthetic sequence held in memory.
#[wasm_bindgen]
pub struct Scene {
    data: SyntheticData,
}

impl Scene {
    pub fn generate(motion: &str, points: usize, frames: usize, seed: u32) -> Result<Scene> {
        let spec = SyntheticSpec {
            frames_per_sequence: frames.max(1),
            points_per_frame: points,
            motion: Some(motion.parse::<MotionModel>()?),
            seed: u64::from(seed),
            ..SyntheticSpec::default()
        };
        Ok(Scene { data: generate(&spec)? })
    }

    pub fn build(&self, frame: usize, k: usize, q: usize, cell_m: f64) -> Result<GraphView> {
        let f = self.data.frames.get(frame).ok_or(Error::EmptyInput)?;
        let config = PipelineConfig {
            k,
            downsample_enabled: q > 0,
            q: q.max(1),
            cell_width: [cell_m; 3],
            ..PipelineConfig::default()
        };
        config.validate()?;
        let graph = build_graph(std::slice::from_ref(f), &config, None)?;
        Ok(GraphView {
            points_before: f.len(),
            graph,
        })
    }
}

#[wasm_bindgen]
impl Scene {
    #[wasm_bindgen(constructor)]
    pub fn new(motion: &str, points: usize, frames: usize, seed: u32) -> std::result::Result<Scene, JsError> {
        Scene::generate(motion, points, frames, seed).map_err(js)
    }

    #[wasm_bindgen(js_name = frameCount)]
    pub fn frame_count(&self) -> usize {
        self.data.frames.len()
    }

    /// Ground-truth joints of a frame, flattened `x, y, z` per joint.
    pub fn skeleton(&self, frame: usize) -> Vec<f64> {
        self.data.poses.get(frame).map(|(_, s)| s.flatten()).unwrap_or_default()
    }

    /// Joint index pairs of the stick figure, flattened.
    pub fn bones() -> Vec<u32> {
        pcfex_core::synthetic::BONES.iter().flat_map(|&(a, b)| [a as u32, b as u32]).collect()
    }

    /// `q = 0` turns downsampling off.
    pub fn graph(&self, frame: usize, k: usize, q: usize, cell_m: f64) -> std::result::Result<GraphView, JsError> {
        self.build(frame, k, q, cell_m).map_err(js)
    }
}

/// A built graph with accessors shaped for drawing.
#[wasm_bindgen]
pub struct GraphView {
    points_before: usize,
    graph: PointGraph,
}

#[wasm_bindgen]
impl GraphView {
    #[wasm_bindgen(js_name = pointsBefore)]
    pub fn points_before(&self) -> usize {
        self.points_before
    }

    #[wasm_bindgen(js_name = numNodes)]
    pub fn num_nodes(&self) -> usize {
        self.graph.num_nodes()
    }

    #[wasm_bindgen(js_name = numEdges)]
    pub fn num_edges(&self) -> usize {
        self.graph.num_edges()
    }

    /// Node positions, flattened `x, y, z`.
    pub fn positions(&self) -> Vec<f64> {
        self.graph.node_features.iter_rows().flat_map(|r| r[..3].to_vec()).collect()
    }

    /// Doppler velocity per node.
    pub fn velocities(&self) -> Vec<f64> {
        self.graph.node_features.iter_rows().map(|r| r[3]).collect()
    }

    /// `(target, source)` pairs, flattened.
    pub fn edges(&self) -> Vec<u32> {
        self.graph.edges.iter().flat_map(|&(t, s)| [t as u32, s as u32]).collect()
    }

    /// The 19 node features of one node; empty when out of range.
    #[wasm_bindgen(js_name = nodeFeatures)]
    pub fn node_features(&self, node: usize) -> Vec<f64> {
        if node < self.graph.num_nodes() {
            self.graph.node_features.row(node).to_vec()
        } else {
            Vec::new()
        }
    }

    #[wasm_bindgen(js_name = frameFeatures)]
    pub fn frame_features(&self) -> Vec<f64> {
        self.graph.frame_features.clone()
    }
}

/// Parses numbers separated by commas or whitespace.
pub fn parse_numbers(text: &str) -> Result<Vec<f64>> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .enumerate()
        .map(|(i, t)| match t.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(Error::InvalidConfig(format!("entry {}: `{t}` is not a finite number", i + 1))),
        })
        .collect()
}

pub fn statbox_of_text(text: &str) -> Result<Vec<f64>> {
    let values = parse_numbers(text)?;
    Ok(statbox(&values, PipelineConfig::default().epsilon)?.to_array().to_vec())
}

/// The 10 statistics of the numbers in `text`, in operator order.
#[wasm_bindgen(js_name = statboxText)]
pub fn statbox_text(text: &str) -> std::result::Result<Vec<f64>, JsError> {
    statbox_of_text(text).map_err(js)
}

#[wasm_bindgen(js_name = statboxNames)]
pub fn statbox_names() -> Vec<String> {
    STATBOX_NAMES.iter().map(|s| s.to_string()).collect()
}
