use crate::error::{Error, Result};
use crate::matrix::{dot, Matrix};
use crate::rng::SeededRng;

/// Single-head graph attention layer with an edge term.
///
/// For target `j` with neighbors `N(j)` and processed edge features `e_jk`:
///
/// ```text
/// h_j     = x_j Θ
/// l_jk    = LeakyReLU(a · [h_j ‖ h_k ‖ e_jk Θ_e])     k ∈ N(j)
/// l_jj    = LeakyReLU(a · [h_j ‖ h_j ‖ 0])
/// α_j·    = softmax over {j} ∪ N(j)
/// out_j   = α_jj h_j + Σ_k α_jk h_k
/// ```
#[derive(Debug, Clone, PartialEq)]
pub struct GatLayer {
    /// `d_in x d_out`.
    pub theta: Matrix,
    /// `d_edge x d_out`; `None` when the model has no edge features.
    pub theta_edge: Option<Matrix>,
    /// `1 x 3 d_out`: target, source and edge segments.
    pub attention: Matrix,
    pub leaky_slope: f64,
    pub dropout_rate: f64,
}

/// Per-target incoming lists of `(source, edge index)`.
pub(crate) fn adjacency(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<(usize, usize)>> {
    let mut adj = vec![Vec::new(); n];
    for (e, &(t, s)) in edges.iter().enumerate() {
        adj[t].push((s, e));
    }
    adj
}

#[derive(Debug, Clone)]
pub(crate) struct GatCache {
    x: Matrix,
    edge_in: Option<Matrix>,
    h: Matrix,
    g: Option<Matrix>,
    /// Per target: LeakyReLU inputs, self first, then neighbors.
    pre: Vec<Vec<f64>>,
    alpha: Vec<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub(crate) struct GatGrad {
    pub theta: Matrix,
    pub theta_edge: Option<Matrix>,
    pub attention: Matrix,
}

impl GatLayer {
    pub fn zeros(d_in: usize, d_out: usize, d_edge: Option<usize>, leaky_slope: f64, dropout_rate: f64) -> Self {
        Self {
            theta: Matrix::zeros(d_in, d_out),
            theta_edge: d_edge.map(|de| Matrix::zeros(de, d_out)),
            attention: Matrix::zeros(1, 3 * d_out),
            leaky_slope,
            dropout_rate,
        }
    }

    pub fn in_dim(&self) -> usize {
        self.theta.rows()
    }

    pub fn out_dim(&self) -> usize {
        self.theta.cols()
    }

    #[inline]
    fn leaky(&self, u: f64) -> f64 {
        if u > 0.0 {
            u
        } else {
            self.leaky_slope * u
        }
    }

    fn check(&self, x: &Matrix, edges: &[(usize, usize)], edge_feats: Option<&Matrix>) -> Result<()> {
        if x.cols() != self.in_dim() {
            return Err(Error::DimensionMismatch {
                context: "gat node input",
                expected: self.in_dim(),
                actual: x.cols(),
            });
        }
        match (&self.theta_edge, edge_feats) {
            (Some(te), Some(ef)) => {
                if ef.cols() != te.rows() || ef.rows() != edges.len() {
                    return Err(Error::DimensionMismatch {
                        context: "gat edge input",
                        expected: te.rows(),
                        actual: ef.cols(),
                    });
                }
            }
            (Some(te), None) => {
                return Err(Error::DimensionMismatch {
                    context: "gat edge input",
                    expected: te.rows(),
                    actual: 0,
                })
            }
            (None, _) => {}
        }
        if let Some(&(t, s)) = edges.iter().find(|(t, s)| *t >= x.rows() || *s >= x.rows()) {
            return Err(Error::DimensionMismatch {
                context: "gat edge index",
                expected: x.rows(),
                actual: t.max(s),
            });
        }
        Ok(())
    }

    /// Attention-weighted update of every node.
    pub fn forward(&self, x: &Matrix, edges: &[(usize, usize)], edge_feats: Option<&Matrix>) -> Result<Matrix> {
        Ok(self.forward_cached(x, edges, edge_feats, None)?.0)
    }

    /// Like [`forward`](Self::forward), also returning the attention weights
    /// per target (self first, then neighbors in edge order).
    pub fn forward_with_attention(
        &self,
        x: &Matrix,
        edges: &[(usize, usize)],
        edge_feats: Option<&Matrix>,
    ) -> Result<(Matrix, Vec<Vec<f64>>)> {
        let (out, cache) = self.forward_cached(x, edges, edge_feats, None)?;
        Ok((out, cache.alpha))
    }

    /// Training-mode forward: dropout on the attention coefficients, with the
    /// kept coefficients rescaled by `1 / (1 - rate)`.
    pub fn forward_train(
        &self,
        x: &Matrix,
        edges: &[(usize, usize)],
        edge_feats: Option<&Matrix>,
        rng: &mut SeededRng,
    ) -> Result<Matrix> {
        Ok(self.forward_cached(x, edges, edge_feats, Some(rng))?.0)
    }

    pub(crate) fn forward_cached(
        &self,
        x: &Matrix,
        edges: &[(usize, usize)],
        edge_feats: Option<&Matrix>,
        mut dropout: Option<&mut SeededRng>,
    ) -> Result<(Matrix, GatCache)> {
        self.check(x, edges, edge_feats)?;
        let n = x.rows();
        let d = self.out_dim();
        let h = x.matmul(&self.theta);
        let g = match (&self.theta_edge, edge_feats) {
            (Some(te), Some(ef)) => Some(ef.matmul(te)),
            _ => None,
        };
        let a = self.attention.as_slice();
        let (a_t, a_s, a_e) = (&a[..d], &a[d..2 * d], &a[2 * d..]);
        let src_score: Vec<f64> = (0..n).map(|k| dot(a_s, h.row(k))).collect();
        let adj = adjacency(n, edges);

        let mut out = Matrix::zeros(n, d);
        let mut pre = Vec::with_capacity(n);
        let mut alpha = Vec::with_capacity(n);
        for j in 0..n {
            let tgt = dot(a_t, h.row(j));
            let mut u = Vec::with_capacity(adj[j].len() + 1);
            u.push(tgt + src_score[j]);
            for &(k, e) in &adj[j] {
                let edge_score = g.as_ref().map_or(0.0, |g| dot(a_e, g.row(e)));
                u.push(tgt + src_score[k] + edge_score);
            }
            let logits: Vec<f64> = u.iter().map(|&v| self.leaky(v)).collect();
            let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let mut w: Vec<f64> = logits.iter().map(|&l| (l - max).exp()).collect();
            let total: f64 = w.iter().sum();
            for x in &mut w {
                *x /= total;
            }

            let mut coeff = w.clone();
            if let Some(rng) = dropout.as_deref_mut() {
                if self.dropout_rate > 0.0 {
                    let keep = 1.0 - self.dropout_rate;
                    for c in &mut coeff {
                        *c = if rng.unit_f64() < self.dropout_rate { 0.0 } else { *c / keep };
                    }
                }
            }

            let row = out.row_mut(j);
            for (o, hv) in row.iter_mut().zip(h.row(j)) {
                *o = coeff[0] * hv;
            }
            for (slot, &(k, _)) in adj[j].iter().enumerate() {
                let c = coeff[slot + 1];
                for (o, hv) in row.iter_mut().zip(h.row(k)) {
                    *o += c * hv;
                }
            }
            pre.push(u);
            alpha.push(w);
        }
        Ok((
            out,
            GatCache {
                x: x.clone(),
                edge_in: g.as_ref().and(edge_feats.cloned()),
                h,
                g,
                pre,
                alpha,
            },
        ))
    }

    pub(crate) fn push_signature(&self, cache: &GatCache, out: &mut Vec<bool>) {
        for u in &cache.pre {
            out.extend(u.iter().map(|&v| v > 0.0));
        }
    }

    /// Backward pass (dropout off). Returns the node-input gradient, the
    /// edge-input gradient (when the layer has an edge term) and the
    /// parameter gradients.
    pub(crate) fn backward(
        &self,
        cache: &GatCache,
        edges: &[(usize, usize)],
        d_out: &Matrix,
    ) -> (Matrix, Option<Matrix>, GatGrad) {
        let n = cache.h.rows();
        let d = self.out_dim();
        let a = self.attention.as_slice();
        let (a_t, a_s, a_e) = (&a[..d], &a[d..2 * d], &a[2 * d..]);
        let adj = adjacency(n, edges);
        let h = &cache.h;

        let mut dh = Matrix::zeros(n, d);
        let mut ds_t = vec![0.0; n];
        let mut ds_s = vec![0.0; n];
        let mut ds_e = vec![0.0; edges.len()];

        for j in 0..n {
            let dj = d_out.row(j);
            let alpha = &cache.alpha[j];
            let mut dalpha = Vec::with_capacity(alpha.len());
            dalpha.push(dot(dj, h.row(j)));
            for &(k, _) in &adj[j] {
                dalpha.push(dot(dj, h.row(k)));
            }
            // out_j depends on h through the weighted sum
            for (o, &g) in dh.row_mut(j).iter_mut().zip(dj) {
                *o += alpha[0] * g;
            }
            for (slot, &(k, _)) in adj[j].iter().enumerate() {
                let w = alpha[slot + 1];
                for (o, &g) in dh.row_mut(k).iter_mut().zip(dj) {
                    *o += w * g;
                }
            }
            // softmax then LeakyReLU
            let weighted: f64 = alpha.iter().zip(&dalpha).map(|(a, g)| a * g).sum();
            let du: Vec<f64> = alpha
                .iter()
                .zip(&dalpha)
                .zip(&cache.pre[j])
                .map(|((&a, &g), &u)| {
                    let dz = a * (g - weighted);
                    if u > 0.0 {
                        dz
                    } else {
                        dz * self.leaky_slope
                    }
                })
                .collect();
            ds_t[j] += du[0];
            ds_s[j] += du[0];
            for (slot, &(k, e)) in adj[j].iter().enumerate() {
                let g = du[slot + 1];
                ds_t[j] += g;
                ds_s[k] += g;
                ds_e[e] += g;
            }
        }

        let mut d_attention = vec![0.0; 3 * d];
        for j in 0..n {
            let hj = h.row(j);
            for c in 0..d {
                d_attention[c] += ds_t[j] * hj[c];
                d_attention[d + c] += ds_s[j] * hj[c];
            }
            for (o, c) in dh.row_mut(j).iter_mut().zip(0..d) {
                *o += ds_t[j] * a_t[c] + ds_s[j] * a_s[c];
            }
        }

        let (d_edge_in, d_theta_edge) = match (&self.theta_edge, &cache.g, &cache.edge_in) {
            (Some(te), Some(g), Some(edge_in)) => {
                let mut dg = Matrix::zeros(edges.len(), d);
                for e in 0..edges.len() {
                    let ge = g.row(e);
                    for c in 0..d {
                        d_attention[2 * d + c] += ds_e[e] * ge[c];
                    }
                    for (o, &ac) in dg.row_mut(e).iter_mut().zip(a_e) {
                        *o = ds_e[e] * ac;
                    }
                }
                (Some(dg.matmul_t(te)), Some(edge_in.t_matmul(&dg)))
            }
            _ => (None, None),
        };

        let d_theta = cache.x.t_matmul(&dh);
        let dx = dh.matmul_t(&self.theta);
        (
            dx,
            d_edge_in,
            GatGrad {
                theta: d_theta,
                theta_edge: d_theta_edge,
                attention: Matrix::row_vector(&d_attention),
            },
        )
    }
}
