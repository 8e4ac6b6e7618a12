use super::shape::ActivationPolicy;
use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Affine layer `y = x W + b`, weight stored `in x out`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    pub weight: Matrix,
    /// `1 x out`.
    pub bias: Matrix,
}

impl Dense {
    pub fn zeros(d_in: usize, d_out: usize) -> Self {
        Self {
            weight: Matrix::zeros(d_in, d_out),
            bias: Matrix::zeros(1, d_out),
        }
    }

    pub fn in_dim(&self) -> usize {
        self.weight.rows()
    }

    pub fn out_dim(&self) -> usize {
        self.weight.cols()
    }

    pub(crate) fn apply(&self, x: &Matrix) -> Matrix {
        let mut y = x.matmul(&self.weight);
        y.add_row_broadcast(self.bias.as_slice());
        y
    }
}

/// Stack of affine layers applied row-wise (a shared MLP when rows are
/// nodes or edges). Zero layers is the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct FcnBlock {
    pub layers: Vec<Dense>,
    pub policy: ActivationPolicy,
}

/// Inputs and pre-activations of each layer, kept for the backward pass.
#[derive(Debug, Clone)]
pub(crate) struct FcnCache {
    inputs: Vec<Matrix>,
    pre: Vec<Matrix>,
}

#[derive(Debug, Clone)]
pub(crate) struct DenseGrad {
    pub weight: Matrix,
    pub bias: Matrix,
}

#[inline]
pub(crate) fn relu(x: f64) -> f64 {
    if x > 0.0 {
        x
    } else {
        0.0
    }
}

impl FcnBlock {
    pub fn new(layers: Vec<Dense>, policy: ActivationPolicy) -> Self {
        Self { layers, policy }
    }

    /// Input width, or `None` for an identity block.
    pub fn in_dim(&self) -> Option<usize> {
        self.layers.first().map(Dense::in_dim)
    }

    /// Output width given the input width (identity blocks pass it through).
    pub fn out_dim(&self, d_in: usize) -> usize {
        self.layers.last().map_or(d_in, Dense::out_dim)
    }

    fn check_input(&self, cols: usize) -> Result<()> {
        match self.in_dim() {
            Some(expected) if expected != cols => Err(Error::DimensionMismatch {
                context: "fcn input",
                expected,
                actual: cols,
            }),
            _ => Ok(()),
        }
    }

    /// Applies every layer to every row of `x`.
    pub fn forward(&self, x: &Matrix) -> Result<Matrix> {
        self.check_input(x.cols())?;
        let n = self.layers.len();
        let mut h = x.clone();
        for (l, layer) in self.layers.iter().enumerate() {
            h = layer.apply(&h);
            if self.policy.is_activated(l, n) {
                h.map_inplace(relu);
            }
        }
        Ok(h)
    }

    pub fn forward_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(self.forward(&Matrix::row_vector(x))?.into_vec())
    }

    pub(crate) fn forward_cached(&self, x: &Matrix) -> Result<(Matrix, FcnCache)> {
        self.check_input(x.cols())?;
        let n = self.layers.len();
        let mut cache = FcnCache {
            inputs: Vec::with_capacity(n),
            pre: Vec::with_capacity(n),
        };
        let mut h = x.clone();
        for (l, layer) in self.layers.iter().enumerate() {
            let pre = layer.apply(&h);
            cache.inputs.push(h);
            h = pre.clone();
            if self.policy.is_activated(l, n) {
                h.map_inplace(relu);
            }
            cache.pre.push(pre);
        }
        Ok((h, cache))
    }

    /// Rectifier sign pattern, used to detect finite-difference steps that
    /// cross a kink.
    pub(crate) fn push_signature(&self, cache: &FcnCache, out: &mut Vec<bool>) {
        let n = self.layers.len();
        for (l, pre) in cache.pre.iter().enumerate() {
            if self.policy.is_activated(l, n) {
                out.extend(pre.as_slice().iter().map(|&u| u > 0.0));
            }
        }
    }

    /// Returns the gradient w.r.t. the block input and per-layer parameter
    /// gradients.
    pub(crate) fn backward(&self, cache: &FcnCache, d_out: Matrix) -> (Matrix, Vec<DenseGrad>) {
        let n = self.layers.len();
        let mut grads = Vec::with_capacity(n);
        let mut d = d_out;
        for l in (0..n).rev() {
            if self.policy.is_activated(l, n) {
                for (g, &u) in d.as_mut_slice().iter_mut().zip(cache.pre[l].as_slice()) {
                    if u <= 0.0 {
                        *g = 0.0;
                    }
                }
            }
            let layer = &self.layers[l];
            let weight = cache.inputs[l].t_matmul(&d);
            let bias = Matrix::row_vector(&d.sum_rows());
            d = d.matmul_t(&layer.weight);
            grads.push(DenseGrad { weight, bias });
        }
        grads.reverse();
        (d, grads)
    }
}
