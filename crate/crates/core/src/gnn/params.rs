use super::fcn::{Dense, FcnBlock};
use super::gat::GatLayer;
use super::lstm::{BiLstm, LstmDirection};
use super::shape::{ActivationPolicy, ModelShape};
use crate::config::FeatureDims;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rng::SeededRng;

/// All network tensors plus the shape and feature widths they were built for.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub shape: ModelShape,
    pub dims: FeatureDims,
    pub h_edge: Option<FcnBlock>,
    pub h_node: FcnBlock,
    pub gat_layers: Vec<GatLayer>,
    pub h_frame: Option<FcnBlock>,
    pub h_pred: FcnBlock,
    pub recurrent: Option<BiLstm>,
}

fn block(d_in: usize, widths: &[usize], policy: ActivationPolicy) -> (FcnBlock, usize) {
    let mut layers = Vec::with_capacity(widths.len());
    let mut d = d_in;
    for &w in widths {
        layers.push(Dense::zeros(d, w));
        d = w;
    }
    (FcnBlock::new(layers, policy), d)
}

impl ModelParams {
    /// All-zero parameters for the given shape and feature widths.
    pub fn zeros(shape: &ModelShape, dims: FeatureDims) -> Result<Self> {
        shape.validate()?;
        if dims.node == 0 {
            return Err(Error::InvalidConfig("node feature width must be positive".into()));
        }
        let (h_edge, edge_dim) = if dims.edge > 0 {
            let (b, d) = block(dims.edge, &shape.edge_widths, shape.edge_activation);
            (Some(b), Some(d))
        } else {
            (None, None)
        };
        let (h_node, mut d) = block(dims.node, &shape.node_widths, shape.node_activation);
        let mut gat_layers = Vec::with_capacity(shape.gat_widths.len());
        for &w in &shape.gat_widths {
            gat_layers.push(GatLayer::zeros(d, w, edge_dim, shape.leaky_slope, shape.dropout));
            d = w;
        }
        let (h_frame, frame_out) = if dims.frame > 0 {
            let (b, fd) = block(dims.frame, &shape.frame_widths, shape.frame_activation);
            (Some(b), fd)
        } else {
            (None, 0)
        };
        let representation = d + frame_out;
        let recurrent = (shape.recurrent_hidden > 0)
            .then(|| BiLstm::zeros(representation, shape.recurrent_hidden));
        let pred_in = recurrent.as_ref().map_or(representation, BiLstm::out_dim);
        let mut widths = shape.pred_hidden.clone();
        widths.push(shape.output_dim());
        let (h_pred, _) = block(pred_in, &widths, shape.pred_activation);
        Ok(Self {
            shape: shape.clone(),
            dims,
            h_edge,
            h_node,
            gat_layers,
            h_frame,
            h_pred,
            recurrent,
        })
    }

    /// Seeded fan-in scaled uniform initialization: every entry of a tensor
    /// is drawn from `U(-1/sqrt(fan_in), 1/sqrt(fan_in))`, tensors filled in
    /// [`tensors`](Self::tensors) order, row-major.
    pub fn init(shape: &ModelShape, dims: FeatureDims, rng: &mut SeededRng) -> Result<Self> {
        let mut params = Self::zeros(shape, dims)?;
        for (_, fan_in, tensor) in params.tensors_with_fan_in_mut() {
            let bound = 1.0 / (fan_in.max(1) as f64).sqrt();
            for x in tensor.as_mut_slice() {
                *x = rng.uniform(-bound, bound);
            }
        }
        Ok(params)
    }

    /// Width of the frame representation `m ‖ X_frame`.
    pub fn representation_dim(&self) -> usize {
        let node_out = self.h_node.out_dim(self.dims.node);
        let m = self.gat_layers.last().map_or(node_out, GatLayer::out_dim);
        let f = self.h_frame.as_ref().map_or(0, |b| b.out_dim(self.dims.frame));
        m + f
    }

    pub fn output_dim(&self) -> usize {
        self.h_pred.out_dim(self.h_pred.in_dim().unwrap_or(0))
    }

    pub fn num_parameters(&self) -> usize {
        self.tensors().iter().map(|(_, t)| t.len()).sum()
    }

    /// Named tensors in manifest order.
    pub fn tensors(&self) -> Vec<(String, &Matrix)> {
        fn push_block<'a>(out: &mut Vec<(String, &'a Matrix)>, name: &str, b: &'a FcnBlock) {
            for (i, l) in b.layers.iter().enumerate() {
                out.push((format!("{name}.{i}.weight"), &l.weight));
                out.push((format!("{name}.{i}.bias"), &l.bias));
            }
        }
        let mut out = Vec::new();
        if let Some(b) = &self.h_edge {
            push_block(&mut out, "h_edge", b);
        }
        push_block(&mut out, "h_node", &self.h_node);
        for (i, g) in self.gat_layers.iter().enumerate() {
            out.push((format!("gat.{i}.theta"), &g.theta));
            if let Some(te) = &g.theta_edge {
                out.push((format!("gat.{i}.theta_edge"), te));
            }
            out.push((format!("gat.{i}.attention"), &g.attention));
        }
        if let Some(b) = &self.h_frame {
            push_block(&mut out, "h_frame", b);
        }
        push_block(&mut out, "h_pred", &self.h_pred);
        if let Some(r) = &self.recurrent {
            for (dir, cell) in [("forward", &r.forward), ("backward", &r.backward)] {
                out.push((format!("recurrent.{dir}.w_input"), &cell.w_input));
                out.push((format!("recurrent.{dir}.w_hidden"), &cell.w_hidden));
                out.push((format!("recurrent.{dir}.bias"), &cell.bias));
            }
        }
        out
    }

    pub fn tensors_mut(&mut self) -> Vec<(String, &mut Matrix)> {
        self.tensors_with_fan_in_mut()
            .into_iter()
            .map(|(name, _, t)| (name, t))
            .collect()
    }

    fn tensors_with_fan_in_mut(&mut self) -> Vec<(String, usize, &mut Matrix)> {
        fn push_block<'a>(out: &mut Vec<(String, usize, &'a mut Matrix)>, name: &str, b: &'a mut FcnBlock) {
            for (i, l) in b.layers.iter_mut().enumerate() {
                let fan_in = l.weight.rows();
                out.push((format!("{name}.{i}.weight"), fan_in, &mut l.weight));
                out.push((format!("{name}.{i}.bias"), fan_in, &mut l.bias));
            }
        }
        fn push_lstm<'a>(out: &mut Vec<(String, usize, &'a mut Matrix)>, dir: &str, cell: &'a mut LstmDirection) {
            let fan_in = cell.w_hidden.rows();
            out.push((format!("recurrent.{dir}.w_input"), fan_in, &mut cell.w_input));
            out.push((format!("recurrent.{dir}.w_hidden"), fan_in, &mut cell.w_hidden));
            out.push((format!("recurrent.{dir}.bias"), fan_in, &mut cell.bias));
        }
        let mut out = Vec::new();
        if let Some(b) = &mut self.h_edge {
            push_block(&mut out, "h_edge", b);
        }
        push_block(&mut out, "h_node", &mut self.h_node);
        for (i, g) in self.gat_layers.iter_mut().enumerate() {
            let d_in = g.theta.rows();
            let d_out = g.theta.cols();
            out.push((format!("gat.{i}.theta"), d_in, &mut g.theta));
            if let Some(te) = &mut g.theta_edge {
                out.push((format!("gat.{i}.theta_edge"), te.rows(), te));
            }
            out.push((format!("gat.{i}.attention"), 3 * d_out, &mut g.attention));
        }
        if let Some(b) = &mut self.h_frame {
            push_block(&mut out, "h_frame", b);
        }
        push_block(&mut out, "h_pred", &mut self.h_pred);
        if let Some(r) = &mut self.recurrent {
            push_lstm(&mut out, "forward", &mut r.forward);
            push_lstm(&mut out, "backward", &mut r.backward);
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.tensors().iter().all(|(_, t)| t.is_finite())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dims() -> FeatureDims {
        FeatureDims {
            node: 19,
            edge: 6,
            frame: 380,
        }
    }

    #[test]
    fn same_seed_same_params() {
        let shape = ModelShape::default();
        let a = ModelParams::init(&shape, dims(), &mut SeededRng::new(4)).unwrap();
        let b = ModelParams::init(&shape, dims(), &mut SeededRng::new(4)).unwrap();
        let c = ModelParams::init(&shape, dims(), &mut SeededRng::new(5)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn init_respects_fan_in_bound() {
        let p = ModelParams::init(&ModelShape::default(), dims(), &mut SeededRng::new(1)).unwrap();
        let node0 = &p.h_node.layers[0].weight;
        let bound = 1.0 / 19f64.sqrt();
        assert!(node0.as_slice().iter().all(|x| x.abs() < bound));
        assert!(p.is_finite());
    }

    #[test]
    fn layout_follows_shape() {
        let p = ModelParams::zeros(&ModelShape::default(), dims()).unwrap();
        assert_eq!(p.h_edge.as_ref().unwrap().layers.len(), 2);
        assert_eq!(p.gat_layers[0].theta.shape(), (32, 32));
        assert_eq!(p.gat_layers[0].theta_edge.as_ref().unwrap().shape(), (16, 32));
        assert_eq!(p.gat_layers[0].attention.shape(), (1, 96));
        assert_eq!(p.representation_dim(), 64);
        assert_eq!(p.output_dim(), 51);
        let names: Vec<String> = p.tensors().into_iter().map(|(n, _)| n).collect();
        assert_eq!(names[0], "h_edge.0.weight");
        assert!(names.contains(&"gat.1.theta_edge".to_string()));
        assert_eq!(names.last().unwrap(), "h_pred.1.bias");
    }

    #[test]
    fn mars_preset_builds_with_recurrent_cell() {
        let p = ModelParams::zeros(&ModelShape::mars_sequential(19, 0), dims()).unwrap();
        let r = p.recurrent.as_ref().unwrap();
        assert_eq!(r.in_dim(), 128);
        assert_eq!(r.out_dim(), 128);
        assert_eq!(p.h_pred.layers.len(), 3);
        assert_eq!(p.h_node.layers.len(), 3);
        assert_eq!(p.gat_layers.len(), 3);
    }

    #[test]
    fn basic_mode_has_no_edge_or_frame_blocks() {
        let p = ModelParams::zeros(
            &ModelShape::default(),
            FeatureDims {
                node: 5,
                edge: 0,
                frame: 0,
            },
        )
        .unwrap();
        assert!(p.h_edge.is_none() && p.h_frame.is_none());
        assert!(p.gat_layers[0].theta_edge.is_none());
        assert_eq!(p.representation_dim(), 32);
    }
}
