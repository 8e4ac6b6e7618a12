//! The edge-aware graph attention network.
//!
//! Frame representation: `h_edge` and `h_node` process edge and node
//! features row-wise, a stack of [`GatLayer`]s mixes node states along the
//! KNN edges (rectifiers between layers, none after the last), node states are
//! mean-pooled per graph and concatenated with `h_frame` of the frame feature
//! vector. The frame-wise head applies `h_pred` directly; the sequential head
//! runs a bidirectional LSTM over a window of representations first.

mod fcn;
mod forward;
mod gat;
mod grad;
mod lstm;
mod params;
mod shape;
mod weights;

pub use fcn::{Dense, FcnBlock};
pub use forward::{
    frame_representation, frame_representation_batch, node_states, predict_framewise,
    predict_sequential, GraphBatch, Prediction,
};
pub use gat::GatLayer;
pub use grad::{grad_check, loss_and_gradients, GradCheckOptions, GradCheckReport, Gradients, Loss, TensorCheck};
pub use lstm::{BiLstm, LstmDirection};
pub use params::ModelParams;
pub use shape::{ActivationPolicy, HeadType, ModelShape};
pub use weights::{load_params, read_params, save_params, write_params, WEIGHTS_MAGIC, WEIGHTS_VERSION};
