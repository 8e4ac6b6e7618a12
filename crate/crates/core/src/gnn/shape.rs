use std::fmt::Write as _;

use crate::config::{parse_list, parse_value};
use crate::error::{Error, Result};

/// Where a block places rectifiers after its affine layers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActivationPolicy {
    All,
    AllButFirst,
    AllButLast,
    /// Purely affine; used for linear test configurations.
    None,
}

impl ActivationPolicy {
    pub fn is_activated(self, layer: usize, num_layers: usize) -> bool {
        match self {
            ActivationPolicy::All => true,
            ActivationPolicy::AllButFirst => layer != 0,
            ActivationPolicy::AllButLast => layer + 1 != num_layers,
            ActivationPolicy::None => false,
        }
    }

    fn name(self) -> &'static str {
        match self {
            ActivationPolicy::All => "all",
            ActivationPolicy::AllButFirst => "all_but_first",
            ActivationPolicy::AllButLast => "all_but_last",
            ActivationPolicy::None => "none",
        }
    }

    fn parse(value: &str, line: usize) -> Result<Self> {
        Ok(match value {
            "all" => ActivationPolicy::All,
            "all_but_first" => ActivationPolicy::AllButFirst,
            "all_but_last" => ActivationPolicy::AllButLast,
            "none" => ActivationPolicy::None,
            _ => return Err(Error::parse(line, format!("unknown activation policy `{value}`"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeadType {
    Pose,
    Activity,
}

/// Layer widths and head description, the `model.*` block of a config file.
///
/// Block widths list the output width of each affine layer; an empty list is
/// an identity block. `pred_hidden` lists only the hidden layers of the
/// prediction block, whose final width comes from the head (`3 * keypoints`
/// or `classes`). `recurrent_hidden = 0` means no recurrent cell.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelShape {
    pub head: HeadType,
    pub keypoints: usize,
    pub mid_hip_index: usize,
    pub classes: usize,
    pub edge_widths: Vec<usize>,
    pub node_widths: Vec<usize>,
    pub gat_widths: Vec<usize>,
    pub frame_widths: Vec<usize>,
    pub pred_hidden: Vec<usize>,
    pub edge_activation: ActivationPolicy,
    pub node_activation: ActivationPolicy,
    pub frame_activation: ActivationPolicy,
    pub pred_activation: ActivationPolicy,
    /// Rectifiers between GAT layers; the last layer never has one.
    pub gat_activation: bool,
    pub leaky_slope: f64,
    pub dropout: f64,
    pub recurrent_hidden: usize,
    pub sequence_length: usize,
    pub stride: usize,
}

impl Default for ModelShape {
    fn default() -> Self {
        Self {
            head: HeadType::Pose,
            keypoints: 17,
            mid_hip_index: 0,
            classes: 5,
            edge_widths: vec![16, 16],
            node_widths: vec![32, 32],
            gat_widths: vec![32, 32],
            frame_widths: vec![32],
            pred_hidden: vec![32],
            edge_activation: ActivationPolicy::AllButFirst,
            node_activation: ActivationPolicy::All,
            frame_activation: ActivationPolicy::All,
            pred_activation: ActivationPolicy::AllButLast,
            gat_activation: true,
            leaky_slope: 0.2,
            dropout: 0.5,
            recurrent_hidden: 0,
            sequence_length: 16,
            stride: 1,
        }
    }
}

impl ModelShape {
    /// Sequential pose model with 64 units and 3 layers in every block and a
    /// single-layer bidirectional recurrent cell over 16-frame windows.
    pub fn mars_sequential(keypoints: usize, mid_hip_index: usize) -> Self {
        Self {
            head: HeadType::Pose,
            keypoints,
            mid_hip_index,
            edge_widths: vec![64; 3],
            node_widths: vec![64; 3],
            gat_widths: vec![64; 3],
            frame_widths: vec![64; 3],
            pred_hidden: vec![64; 2],
            recurrent_hidden: 64,
            sequence_length: 16,
            ..Self::default()
        }
    }

    pub fn output_dim(&self) -> usize {
        match self.head {
            HeadType::Pose => 3 * self.keypoints,
            HeadType::Activity => self.classes,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.to_string()));
        match self.head {
            HeadType::Pose if self.keypoints == 0 => return bad("model.keypoints must be positive"),
            HeadType::Pose if self.mid_hip_index >= self.keypoints => {
                return bad("model.mid_hip_index out of range")
            }
            HeadType::Activity if self.classes < 2 => return bad("model.classes must be at least 2"),
            _ => {}
        }
        let widths = [
            &self.edge_widths,
            &self.node_widths,
            &self.gat_widths,
            &self.frame_widths,
            &self.pred_hidden,
        ];
        if widths.iter().any(|w| w.contains(&0)) {
            return bad("layer widths must be positive");
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return bad("model.dropout must be in [0, 1)");
        }
        if !self.leaky_slope.is_finite() {
            return bad("model.leaky_slope must be finite");
        }
        if self.sequence_length == 0 || self.stride == 0 {
            return bad("model.sequence_length and model.stride must be positive");
        }
        Ok(())
    }

    pub(crate) fn apply(&mut self, key: &str, value: &str, line: usize) -> Result<bool> {
        match key {
            "head" => {
                self.head = match value {
                    "pose" => HeadType::Pose,
                    "activity" => HeadType::Activity,
                    _ => return Err(Error::parse(line, format!("unknown head `{value}`"))),
                }
            }
            "keypoints" => self.keypoints = parse_value(value, line)?,
            "mid_hip_index" => self.mid_hip_index = parse_value(value, line)?,
            "classes" => self.classes = parse_value(value, line)?,
            "edge_widths" => self.edge_widths = parse_list(value, line)?,
            "node_widths" => self.node_widths = parse_list(value, line)?,
            "gat_widths" => self.gat_widths = parse_list(value, line)?,
            "frame_widths" => self.frame_widths = parse_list(value, line)?,
            "pred_hidden" => self.pred_hidden = parse_list(value, line)?,
            "edge_activation" => self.edge_activation = ActivationPolicy::parse(value, line)?,
            "node_activation" => self.node_activation = ActivationPolicy::parse(value, line)?,
            "frame_activation" => self.frame_activation = ActivationPolicy::parse(value, line)?,
            "pred_activation" => self.pred_activation = ActivationPolicy::parse(value, line)?,
            "gat_activation" => self.gat_activation = parse_value(value, line)?,
            "leaky_slope" => self.leaky_slope = parse_value(value, line)?,
            "dropout" => self.dropout = parse_value(value, line)?,
            "recurrent_hidden" => self.recurrent_hidden = parse_value(value, line)?,
            "sequence_length" => self.sequence_length = parse_value(value, line)?,
            "stride" => self.stride = parse_value(value, line)?,
            _ => return Ok(false),
        }
        Ok(true)
    }

    pub(crate) fn write_canonical(&self, out: &mut String) {
        let list = |w: &[usize]| w.iter().map(usize::to_string).collect::<Vec<_>>().join(", ");
        let head = match self.head {
            HeadType::Pose => "pose",
            HeadType::Activity => "activity",
        };
        let _ = writeln!(out, "model.head = {head}");
        let _ = writeln!(out, "model.keypoints = {}", self.keypoints);
        let _ = writeln!(out, "model.mid_hip_index = {}", self.mid_hip_index);
        let _ = writeln!(out, "model.classes = {}", self.classes);
        let _ = writeln!(out, "model.edge_widths = {}", list(&self.edge_widths));
        let _ = writeln!(out, "model.node_widths = {}", list(&self.node_widths));
        let _ = writeln!(out, "model.gat_widths = {}", list(&self.gat_widths));
        let _ = writeln!(out, "model.frame_widths = {}", list(&self.frame_widths));
        let _ = writeln!(out, "model.pred_hidden = {}", list(&self.pred_hidden));
        let _ = writeln!(out, "model.edge_activation = {}", self.edge_activation.name());
        let _ = writeln!(out, "model.node_activation = {}", self.node_activation.name());
        let _ = writeln!(out, "model.frame_activation = {}", self.frame_activation.name());
        let _ = writeln!(out, "model.pred_activation = {}", self.pred_activation.name());
        let _ = writeln!(out, "model.gat_activation = {}", self.gat_activation);
        let _ = writeln!(out, "model.leaky_slope = {:?}", self.leaky_slope);
        let _ = writeln!(out, "model.dropout = {:?}", self.dropout);
        let _ = writeln!(out, "model.recurrent_hidden = {}", self.recurrent_hidden);
        let _ = writeln!(out, "model.sequence_length = {}", self.sequence_length);
        let _ = writeln!(out, "model.stride = {}", self.stride);
    }
}
