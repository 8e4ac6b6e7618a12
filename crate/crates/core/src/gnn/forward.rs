use super::fcn::{relu, FcnCache};
use super::gat::GatCache;
use super::params::ModelParams;
use super::shape::HeadType;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::model::Skeleton;
use crate::pipeline::PointGraph;

/// Several graphs concatenated into one node set, with a frame-membership
/// index per node. Edge indices are offset into the concatenated node table.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphBatch {
    pub node_features: Matrix,
    pub edges: Vec<(usize, usize)>,
    pub edge_features: Matrix,
    /// One row per graph.
    pub frame_features: Matrix,
    pub membership: Vec<usize>,
    pub num_graphs: usize,
}

impl GraphBatch {
    pub fn from_graphs(graphs: &[PointGraph]) -> Result<Self> {
        let first = graphs.first().ok_or(Error::EmptyInput)?;
        let node_dim = first.node_features.cols();
        let edge_dim = first.edge_features.cols();
        let frame_dim = first.frame_features.len();
        let mut edges = Vec::new();
        let mut membership = Vec::new();
        let mut frame_rows = Vec::with_capacity(graphs.len());
        let mut offset = 0;
        for (g_idx, g) in graphs.iter().enumerate() {
            if g.num_nodes() == 0 {
                return Err(Error::EmptyGraph);
            }
            for (context, expected, actual) in [
                ("batched node features", node_dim, g.node_features.cols()),
                ("batched edge features", edge_dim, g.edge_features.cols()),
                ("batched frame features", frame_dim, g.frame_features.len()),
                ("edge feature rows", g.edges.len(), g.edge_features.rows()),
            ] {
                if expected != actual {
                    return Err(Error::DimensionMismatch {
                        context,
                        expected,
                        actual,
                    });
                }
            }
            edges.extend(g.edges.iter().map(|&(t, s)| (t + offset, s + offset)));
            membership.extend(std::iter::repeat_n(g_idx, g.num_nodes()));
            frame_rows.push(g.frame_features.as_slice());
            offset += g.num_nodes();
        }
        Ok(Self {
            node_features: Matrix::vstack(node_dim, graphs.iter().map(|g| &g.node_features)),
            edges,
            edge_features: Matrix::vstack(edge_dim, graphs.iter().map(|g| &g.edge_features)),
            frame_features: Matrix::from_rows(frame_dim, frame_rows),
            membership,
            num_graphs: graphs.len(),
        })
    }
}

/// Per-stage intermediates of one forward pass.
pub(crate) struct Trace {
    pub edge: Option<(FcnCache, Matrix)>,
    pub node: FcnCache,
    /// Layer cache and the layer output before the inter-layer rectifier.
    pub gat: Vec<(GatCache, Matrix)>,
    pub node_states: Matrix,
    pub counts: Vec<usize>,
    pub frame: Option<FcnCache>,
    pub pooled_dim: usize,
    pub representation: Matrix,
    pub pred: Option<FcnCache>,
    pub output: Option<Matrix>,
}

fn check_dims(params: &ModelParams, batch: &GraphBatch) -> Result<()> {
    let dims = params.dims;
    for (context, expected, actual) in [
        ("node feature width", dims.node, batch.node_features.cols()),
        ("edge feature width", dims.edge, batch.edge_features.cols()),
        ("frame feature width", dims.frame, batch.frame_features.cols()),
    ] {
        if expected != actual {
            return Err(Error::DimensionMismatch {
                context,
                expected,
                actual,
            });
        }
    }
    Ok(())
}

impl ModelParams {
    fn gat_rectified(&self, layer: usize) -> bool {
        self.shape.gat_activation && layer + 1 < self.gat_layers.len()
    }

    /// Representation stage, optionally followed by the frame-wise head.
    pub(crate) fn trace(&self, batch: &GraphBatch, with_head: bool) -> Result<Trace> {
        check_dims(self, batch)?;
        if batch.node_features.rows() == 0 {
            return Err(Error::EmptyGraph);
        }
        let edge = match &self.h_edge {
            Some(block) => Some(block.forward_cached(&batch.edge_features)?),
            None => None,
        };
        let (mut x, node) = self.h_node.forward_cached(&batch.node_features)?;

        let mut gat = Vec::with_capacity(self.gat_layers.len());
        for (l, layer) in self.gat_layers.iter().enumerate() {
            let edge_in = edge.as_ref().map(|(out, _)| out);
            let (out, cache) = layer.forward_cached(&x, &batch.edges, edge_in, None)?;
            x = out.clone();
            if self.gat_rectified(l) {
                x.map_inplace(relu);
            }
            gat.push((cache, out));
        }

        let dm = x.cols();
        let mut counts = vec![0usize; batch.num_graphs];
        let mut pooled = Matrix::zeros(batch.num_graphs, dm);
        for (j, &g) in batch.membership.iter().enumerate() {
            counts[g] += 1;
            for (p, v) in pooled.row_mut(g).iter_mut().zip(x.row(j)) {
                *p += v;
            }
        }
        for (g, &c) in counts.iter().enumerate() {
            if c == 0 {
                return Err(Error::EmptyGraph);
            }
            for p in pooled.row_mut(g) {
                *p /= c as f64;
            }
        }

        let (frame_out, frame) = match &self.h_frame {
            Some(block) => {
                let (out, cache) = block.forward_cached(&batch.frame_features)?;
                (Some(out), Some(cache))
            }
            None => (None, None),
        };
        let representation = match &frame_out {
            Some(f) => {
                let width = dm + f.cols();
                Matrix::from_rows(
                    width,
                    (0..batch.num_graphs).map(|g| [pooled.row(g), f.row(g)].concat()),
                )
            }
            None => pooled,
        };

        let (pred, output) = if with_head {
            let (out, cache) = self.h_pred.forward_cached(&representation)?;
            (Some(cache), Some(out))
        } else {
            (None, None)
        };
        Ok(Trace {
            edge: edge.map(|(out, cache)| (cache, out)),
            node,
            gat,
            node_states: x,
            counts,
            frame,
            pooled_dim: dm,
            representation,
            pred,
            output,
        })
    }

    /// Rectifier and LeakyReLU sign pattern of a traced pass.
    pub(crate) fn signature(&self, trace: &Trace) -> Vec<bool> {
        let mut sig = Vec::new();
        if let (Some(block), Some((cache, _))) = (&self.h_edge, &trace.edge) {
            block.push_signature(cache, &mut sig);
        }
        self.h_node.push_signature(&trace.node, &mut sig);
        for (l, (cache, pre)) in trace.gat.iter().enumerate() {
            self.gat_layers[l].push_signature(cache, &mut sig);
            if self.gat_rectified(l) {
                sig.extend(pre.as_slice().iter().map(|&u| u > 0.0));
            }
        }
        if let (Some(block), Some(cache)) = (&self.h_frame, &trace.frame) {
            block.push_signature(cache, &mut sig);
        }
        if let Some(cache) = &trace.pred {
            self.h_pred.push_signature(cache, &mut sig);
        }
        sig
    }

    fn check_head(&self, values: &[f64]) -> Result<()> {
        let expected = self.shape.output_dim();
        if values.len() != expected {
            return Err(Error::HeadShapeMismatch {
                expected,
                actual: values.len(),
            });
        }
        Ok(())
    }

    fn to_prediction(&self, values: Vec<f64>) -> Result<Prediction> {
        self.check_head(&values)?;
        Ok(match self.shape.head {
            HeadType::Pose => {
                let keypoints = values.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect();
                Prediction::Pose(Skeleton {
                    keypoints,
                    mid_hip_index: self.shape.mid_hip_index,
                })
            }
            HeadType::Activity => Prediction::Scores(values),
        })
    }
}

/// Output of a prediction head. Activity scores are raw (no softmax).
#[derive(Debug, Clone, PartialEq)]
pub enum Prediction {
    Pose(Skeleton),
    Scores(Vec<f64>),
}

impl Prediction {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Prediction::Pose(s) => s.flatten(),
            Prediction::Scores(v) => v.clone(),
        }
    }
}

/// Mean-pooled final node states, concatenated with the processed frame
/// features when the model has a frame branch.
pub fn frame_representation(params: &ModelParams, graph: &PointGraph) -> Result<Vec<f64>> {
    let batch = GraphBatch::from_graphs(std::slice::from_ref(graph))?;
    Ok(params.trace(&batch, false)?.representation.into_vec())
}

/// One representation row per graph, evaluated as a single mini-batch.
pub fn frame_representation_batch(params: &ModelParams, graphs: &[PointGraph]) -> Result<Matrix> {
    let batch = GraphBatch::from_graphs(graphs)?;
    Ok(params.trace(&batch, false)?.representation)
}

/// Node states after the last GAT layer.
pub fn node_states(params: &ModelParams, graph: &PointGraph) -> Result<Matrix> {
    let batch = GraphBatch::from_graphs(std::slice::from_ref(graph))?;
    Ok(params.trace(&batch, false)?.node_states)
}

/// Frame-wise head: the representation goes straight through `h_pred`.
pub fn predict_framewise(params: &ModelParams, graph: &PointGraph) -> Result<Prediction> {
    let batch = GraphBatch::from_graphs(std::slice::from_ref(graph))?;
    let out = params.trace(&batch, true)?.output.expect("head was requested");
    params.to_prediction(out.into_vec())
}

/// Sequential head: representations of the window pass through the
/// bidirectional recurrent cell; its output at the last time index feeds
/// `h_pred`.
pub fn predict_sequential(params: &ModelParams, graphs: &[PointGraph]) -> Result<Prediction> {
    let cell = params.recurrent.as_ref().ok_or(Error::MissingRecurrentParams)?;
    if graphs.is_empty() {
        return Err(Error::EmptyInput);
    }
    let reps = graphs
        .iter()
        .map(|g| frame_representation(params, g))
        .collect::<Result<Vec<_>>>()?;
    if let Some(r) = reps.first() {
        if r.len() != cell.in_dim() {
            return Err(Error::DimensionMismatch {
                context: "recurrent input",
                expected: cell.in_dim(),
                actual: r.len(),
            });
        }
    }
    let hidden = cell.last_output(&reps);
    let out = params.h_pred.forward_vec(&hidden)?;
    params.to_prediction(out)
}
