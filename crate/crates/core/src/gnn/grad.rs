//! Analytic parameter gradients of the frame-wise network and their
//! verification by central finite differences.
//!
//! The recurrent cell is inference-only and is not differentiated.

use super::fcn::DenseGrad;
use super::forward::GraphBatch;
use super::params::ModelParams;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::metrics::softmax;
use crate::pipeline::PointGraph;
use crate::rng::SeededRng;

/// Training objective applied to the frame-wise head output.
#[derive(Debug, Clone, PartialEq)]
pub enum Loss {
    /// Mean over output entries of the squared error against the target.
    Mse(Vec<f64>),
    /// Softmax cross-entropy against a class index.
    CrossEntropy(usize),
}

impl Loss {
    fn check(&self, width: usize) -> Result<()> {
        match self {
            Loss::Mse(t) if t.len() != width => Err(Error::DimensionMismatch {
                context: "mse target",
                expected: width,
                actual: t.len(),
            }),
            Loss::CrossEntropy(label) if *label >= width => Err(Error::LabelOutOfRange {
                label: *label,
                classes: width,
            }),
            _ => Ok(()),
        }
    }

    pub fn value(&self, output: &[f64]) -> f64 {
        match self {
            Loss::Mse(t) => {
                output.iter().zip(t).map(|(y, t)| (y - t).powi(2)).sum::<f64>() / output.len() as f64
            }
            Loss::CrossEntropy(label) => {
                let max = output.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let lse = output.iter().map(|y| (y - max).exp()).sum::<f64>().ln() + max;
                lse - output[*label]
            }
        }
    }

    fn gradient(&self, output: &[f64]) -> Vec<f64> {
        match self {
            Loss::Mse(t) => {
                let scale = 2.0 / output.len() as f64;
                output.iter().zip(t).map(|(y, t)| scale * (y - t)).collect()
            }
            Loss::CrossEntropy(label) => {
                let mut p = softmax(output);
                p[*label] -= 1.0;
                p
            }
        }
    }
}

/// Named gradients in [`ModelParams::tensors`] order, recurrent tensors
/// excluded.
pub type Gradients = Vec<(String, Matrix)>;

fn push_block(out: &mut Gradients, name: &str, grads: Vec<DenseGrad>) {
    for (i, g) in grads.into_iter().enumerate() {
        out.push((format!("{name}.{i}.weight"), g.weight));
        out.push((format!("{name}.{i}.bias"), g.bias));
    }
}

/// Loss value and its gradient with respect to every feed-forward and
/// attention tensor, for one graph through the frame-wise head.
pub fn loss_and_gradients(params: &ModelParams, graph: &PointGraph, loss: &Loss) -> Result<(f64, Gradients)> {
    let batch = GraphBatch::from_graphs(std::slice::from_ref(graph))?;
    loss_and_gradients_batch(params, &batch, loss)
}

fn loss_and_gradients_batch(params: &ModelParams, batch: &GraphBatch, loss: &Loss) -> Result<(f64, Gradients)> {
    if batch.num_graphs != 1 {
        return Err(Error::ShapeMismatch("gradients are computed for one graph".into()));
    }
    let trace = params.trace(batch, true)?;
    let output = trace.output.as_ref().expect("head traced");
    loss.check(output.cols())?;
    let value = loss.value(output.as_slice());
    let d_out = Matrix::row_vector(&loss.gradient(output.as_slice()));

    let (d_rep, pred_grads) = params.h_pred.backward(trace.pred.as_ref().expect("head traced"), d_out);

    let dm = trace.pooled_dim;
    let d_pooled = Matrix::from_rows(dm, d_rep.iter_rows().map(|r| &r[..dm]));
    let frame_grads = match (&params.h_frame, &trace.frame) {
        (Some(block), Some(cache)) => {
            let width = d_rep.cols() - dm;
            let d_frame = Matrix::from_rows(width, d_rep.iter_rows().map(|r| &r[dm..]));
            Some(block.backward(cache, d_frame).1)
        }
        _ => None,
    };

    // mean pooling
    let n = batch.node_features.rows();
    let mut d_nodes = Matrix::zeros(n, dm);
    for (j, &g) in batch.membership.iter().enumerate() {
        let scale = 1.0 / trace.counts[g] as f64;
        for (o, v) in d_nodes.row_mut(j).iter_mut().zip(d_pooled.row(g)) {
            *o = v * scale;
        }
    }

    let mut d_edge_proc = trace.edge.as_ref().map(|(_, out)| Matrix::zeros(out.rows(), out.cols()));
    let mut gat_grads = Vec::with_capacity(params.gat_layers.len());
    for l in (0..params.gat_layers.len()).rev() {
        let (cache, pre) = &trace.gat[l];
        if params.shape.gat_activation && l + 1 < params.gat_layers.len() {
            for (g, &u) in d_nodes.as_mut_slice().iter_mut().zip(pre.as_slice()) {
                if u <= 0.0 {
                    *g = 0.0;
                }
            }
        }
        let (dx, d_edge, grads) = params.gat_layers[l].backward(cache, &batch.edges, &d_nodes);
        if let (Some(acc), Some(d)) = (&mut d_edge_proc, d_edge) {
            acc.add_assign(&d);
        }
        gat_grads.push(grads);
        d_nodes = dx;
    }
    gat_grads.reverse();

    let (_, node_grads) = params.h_node.backward(&trace.node, d_nodes);
    let edge_grads = match (&params.h_edge, &trace.edge, d_edge_proc) {
        (Some(block), Some((cache, _)), Some(d)) => Some(block.backward(cache, d).1),
        _ => None,
    };

    let mut out = Gradients::new();
    if let Some(g) = edge_grads {
        push_block(&mut out, "h_edge", g);
    }
    push_block(&mut out, "h_node", node_grads);
    for (i, g) in gat_grads.into_iter().enumerate() {
        out.push((format!("gat.{i}.theta"), g.theta));
        if let Some(te) = g.theta_edge {
            out.push((format!("gat.{i}.theta_edge"), te));
        }
        out.push((format!("gat.{i}.attention"), g.attention));
    }
    if let Some(g) = frame_grads {
        push_block(&mut out, "h_frame", g);
    }
    push_block(&mut out, "h_pred", pred_grads);
    Ok((value, out))
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradCheckOptions {
    /// Central-difference step.
    pub step: f64,
    /// Denominator floor of the relative error.
    pub abs_floor: f64,
    /// Check a seeded random subset of at most this many entries per tensor.
    pub max_entries_per_tensor: Option<usize>,
    pub seed: u64,
}

impl Default for GradCheckOptions {
    fn default() -> Self {
        Self {
            step: 1e-5,
            abs_floor: 1e-5,
            max_entries_per_tensor: None,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TensorCheck {
    pub name: String,
    pub checked: usize,
    /// Entries whose perturbation crossed a rectifier kink; excluded from
    /// `max_rel_error`.
    pub flagged: usize,
    pub max_rel_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradCheckReport {
    pub loss: f64,
    pub tensors: Vec<TensorCheck>,
}

impl GradCheckReport {
    pub fn max_rel_error(&self) -> f64 {
        self.tensors.iter().map(|t| t.max_rel_error).fold(0.0, f64::max)
    }

    pub fn flagged(&self) -> usize {
        self.tensors.iter().map(|t| t.flagged).sum()
    }

    pub fn checked(&self) -> usize {
        self.tensors.iter().map(|t| t.checked).sum()
    }
}

/// Compares analytic gradients to central finite differences
/// `(L(θ + h) - L(θ - h)) / 2h`.
///
/// Relative error is `|g - fd| / max(|g|, |fd|, abs_floor)`. Kink rule: an
/// entry is flagged, and left out of the maximum, when the sign pattern of
/// any rectifier or LeakyReLU input at `θ + h` or `θ - h` differs from the
/// pattern at `θ`; the loss is then not differentiable along that step.
/// Dropout is never applied.
pub fn grad_check(
    params: &ModelParams,
    graph: &PointGraph,
    loss: &Loss,
    options: &GradCheckOptions,
) -> Result<GradCheckReport> {
    let batch = GraphBatch::from_graphs(std::slice::from_ref(graph))?;
    let (value, analytic) = loss_and_gradients_batch(params, &batch, loss)?;
    let base_signature = params.signature(&params.trace(&batch, true)?);

    let evaluate = |p: &ModelParams| -> Result<(f64, bool)> {
        let trace = p.trace(&batch, true)?;
        let out = trace.output.as_ref().expect("head traced");
        Ok((loss.value(out.as_slice()), p.signature(&trace) == base_signature))
    };

    let mut work = params.clone();
    let names: Vec<String> = params.tensors().into_iter().map(|(n, _)| n).collect();
    let mut rng = SeededRng::new(options.seed);
    let mut tensors = Vec::with_capacity(analytic.len());

    for (name, grad) in &analytic {
        let t_idx = names
            .iter()
            .position(|n| n == name)
            .expect("gradient names mirror tensor names");
        let len = grad.len();
        let mut entries: Vec<usize> = (0..len).collect();
        if let Some(cap) = options.max_entries_per_tensor {
            if cap < len {
                for slot in 0..cap {
                    let pick = slot + rng.below_usize(len - slot);
                    entries.swap(slot, pick);
                }
                entries.truncate(cap);
                entries.sort_unstable();
            }
        }

        let mut check = TensorCheck {
            name: name.clone(),
            checked: 0,
            flagged: 0,
            max_rel_error: 0.0,
        };
        for &i in &entries {
            let original = params.tensors()[t_idx].1.as_slice()[i];
            let set = |w: &mut ModelParams, v: f64| w.tensors_mut()[t_idx].1.as_mut_slice()[i] = v;

            set(&mut work, original + options.step);
            let (plus, same_plus) = evaluate(&work)?;
            set(&mut work, original - options.step);
            let (minus, same_minus) = evaluate(&work)?;
            set(&mut work, original);

            check.checked += 1;
            if !(same_plus && same_minus) {
                check.flagged += 1;
                continue;
            }
            let numeric = (plus - minus) / (2.0 * options.step);
            let a = grad.as_slice()[i];
            let denom = a.abs().max(numeric.abs()).max(options.abs_floor);
            check.max_rel_error = check.max_rel_error.max((a - numeric).abs() / denom);
        }
        tensors.push(check);
    }
    Ok(GradCheckReport { loss: value, tensors })
}
