use crate::matrix::Matrix;

/// One direction of an LSTM cell. Gate blocks are ordered input, forget,
/// cell, output along the `4H` axis.
#[derive(Debug, Clone, PartialEq)]
pub struct LstmDirection {
    /// `in x 4H`.
    pub w_input: Matrix,
    /// `H x 4H`.
    pub w_hidden: Matrix,
    /// `1 x 4H`.
    pub bias: Matrix,
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

impl LstmDirection {
    pub fn zeros(d_in: usize, hidden: usize) -> Self {
        Self {
            w_input: Matrix::zeros(d_in, 4 * hidden),
            w_hidden: Matrix::zeros(hidden, 4 * hidden),
            bias: Matrix::zeros(1, 4 * hidden),
        }
    }

    pub fn hidden(&self) -> usize {
        self.w_hidden.rows()
    }

    /// One time step: `(h, c) <- cell(x, h, c)`.
    pub fn step(&self, x: &[f64], h: &mut [f64], c: &mut [f64]) {
        let hid = self.hidden();
        let mut z = Matrix::row_vector(x).matmul(&self.w_input);
        z.add_assign(&Matrix::row_vector(h).matmul(&self.w_hidden));
        z.add_row_broadcast(self.bias.as_slice());
        let z = z.as_slice();
        for u in 0..hid {
            let i = sigmoid(z[u]);
            let f = sigmoid(z[hid + u]);
            let g = z[2 * hid + u].tanh();
            let o = sigmoid(z[3 * hid + u]);
            c[u] = f * c[u] + i * g;
            h[u] = o * c[u].tanh();
        }
    }

    /// Hidden state after each step of `inputs`, in the order visited.
    pub fn run<'a>(&self, inputs: impl Iterator<Item = &'a [f64]>) -> Vec<Vec<f64>> {
        let hid = self.hidden();
        let mut h = vec![0.0; hid];
        let mut c = vec![0.0; hid];
        inputs
            .map(|x| {
                self.step(x, &mut h, &mut c);
                h.clone()
            })
            .collect()
    }
}

/// Bidirectional single-layer LSTM, inference only.
#[derive(Debug, Clone, PartialEq)]
pub struct BiLstm {
    pub forward: LstmDirection,
    pub backward: LstmDirection,
}

impl BiLstm {
    pub fn zeros(d_in: usize, hidden: usize) -> Self {
        Self {
            forward: LstmDirection::zeros(d_in, hidden),
            backward: LstmDirection::zeros(d_in, hidden),
        }
    }

    pub fn in_dim(&self) -> usize {
        self.forward.w_input.rows()
    }

    pub fn out_dim(&self) -> usize {
        2 * self.forward.hidden()
    }

    /// Output at the final time index: the forward state after the whole
    /// window concatenated with the backward state after its first step
    /// (which has seen only the last input). Empty input gives zeros.
    pub fn last_output(&self, sequence: &[Vec<f64>]) -> Vec<f64> {
        let mut out = self
            .forward
            .run(sequence.iter().map(Vec::as_slice))
            .pop()
            .unwrap_or_else(|| vec![0.0; self.forward.hidden()]);
        let back = self.backward.run(sequence.iter().rev().map(Vec::as_slice));
        // backward states are in visiting order; index 0 is time L-1
        out.extend(back.into_iter().next().unwrap_or_else(|| vec![0.0; self.backward.hidden()]));
        out
    }
}
