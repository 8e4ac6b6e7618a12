//! Pipeline configuration and the flat `key = value` config file.
//!
//! Pipeline keys are the [`PipelineConfig`] field names (`K`, `F`, `Q` and
//! the lowercase flags). Keys prefixed with `model.` describe the network
//! shape, see [`crate::gnn::ModelShape`]. `#` starts a comment, blank lines
//! are ignored and unknown keys are rejected.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::gnn::ModelShape;

/// Default radar grid cell: 3.5 cm per axis, just under the 3.75 cm range
/// resolution of the sensors.
pub const DEFAULT_CELL_WIDTH: [f64; 3] = [0.035, 0.035, 0.035];

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    /// Neighbors per target node.
    pub k: usize,
    /// Fusion window in frames; 1 disables fusion.
    pub fusion_window: usize,
    pub downsample_enabled: bool,
    pub cell_width: [f64; 3],
    /// Maximum points kept per occupied grid cell.
    pub q: usize,
    pub enable_node_features: bool,
    pub enable_edge_features: bool,
    pub enable_frame_features: bool,
    pub seed: u64,
    pub epsilon: f64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            k: 20,
            fusion_window: 1,
            downsample_enabled: false,
            cell_width: DEFAULT_CELL_WIDTH,
            q: 1,
            enable_node_features: true,
            enable_edge_features: true,
            enable_frame_features: true,
            seed: 0,
            epsilon: 1e-12,
        }
    }
}

/// Widths of the three feature kinds a configuration produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FeatureDims {
    pub node: usize,
    pub edge: usize,
    pub frame: usize,
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k < 1 {
            return Err(Error::InvalidConfig("K must be at least 1".into()));
        }
        if self.fusion_window < 1 {
            return Err(Error::InvalidConfig("F must be at least 1".into()));
        }
        if self.downsample_enabled && self.q < 1 {
            return Err(Error::InvalidConfig("Q must be at least 1".into()));
        }
        if self.cell_width.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::InvalidConfig("cell widths must be positive".into()));
        }
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(Error::InvalidConfig("epsilon must be positive".into()));
        }
        Ok(())
    }

    pub fn feature_dims(&self) -> FeatureDims {
        let node = if self.enable_node_features { 19 } else { 5 };
        FeatureDims {
            node,
            edge: if self.enable_edge_features { 6 } else { 0 },
            frame: if self.enable_frame_features {
                2 * crate::statbox::STATBOX_LEN * node
            } else {
                0
            },
        }
    }

    fn apply(&mut self, key: &str, value: &str, line: usize) -> Result<bool> {
        match key {
            "K" => self.k = parse_value(value, line)?,
            "F" => self.fusion_window = parse_value(value, line)?,
            "downsample_enabled" => self.downsample_enabled = parse_value(value, line)?,
            "cell_width" => {
                let widths: Vec<f64> = parse_list(value, line)?;
                self.cell_width = match widths.as_slice() {
                    [w] => [*w; 3],
                    [x, y, z] => [*x, *y, *z],
                    _ => return Err(Error::parse(line, "cell_width takes 1 or 3 values")),
                };
            }
            "Q" => self.q = parse_value(value, line)?,
            "enable_node_features" => self.enable_node_features = parse_value(value, line)?,
            "enable_edge_features" => self.enable_edge_features = parse_value(value, line)?,
            "enable_frame_features" => self.enable_frame_features = parse_value(value, line)?,
            "seed" => self.seed = parse_value(value, line)?,
            "epsilon" => self.epsilon = parse_value(value, line)?,
            _ => return Ok(false),
        }
        Ok(true)
    }

    fn write_canonical(&self, out: &mut String) {
        let [wx, wy, wz] = self.cell_width;
        let _ = writeln!(out, "K = {}", self.k);
        let _ = writeln!(out, "F = {}", self.fusion_window);
        let _ = writeln!(out, "downsample_enabled = {}", self.downsample_enabled);
        let _ = writeln!(out, "cell_width = {wx:?}, {wy:?}, {wz:?}");
        let _ = writeln!(out, "Q = {}", self.q);
        let _ = writeln!(out, "enable_node_features = {}", self.enable_node_features);
        let _ = writeln!(out, "enable_edge_features = {}", self.enable_edge_features);
        let _ = writeln!(out, "enable_frame_features = {}", self.enable_frame_features);
        let _ = writeln!(out, "seed = {}", self.seed);
        let _ = writeln!(out, "epsilon = {:?}", self.epsilon);
    }
}

/// Everything a config file can hold.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConfigFile {
    pub pipeline: PipelineConfig,
    pub model: ModelShape,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = ConfigFile::default();
        for (line, key, value) in key_values(text)? {
            let known = match key.strip_prefix("model.") {
                Some(model_key) => cfg.model.apply(model_key, value, line)?,
                None => cfg.pipeline.apply(key, value, line)?,
            };
            if !known {
                return Err(Error::parse(line, format!("unknown key `{key}`")));
            }
        }
        cfg.pipeline.validate()?;
        cfg.model.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    /// Every key, fixed order, round-trip exact floats.
    pub fn to_canonical_string(&self) -> String {
        let mut out = String::new();
        self.pipeline.write_canonical(&mut out);
        self.model.write_canonical(&mut out);
        out
    }
}

/// Splits `key = value` lines, dropping comments and blanks. Line numbers are
/// 1-based.
pub(crate) fn key_values(text: &str) -> Result<Vec<(usize, &str, &str)>> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| Error::parse(line, "expected `key = value`"))?;
        out.push((line, key.trim(), value.trim()));
    }
    Ok(out)
}

pub(crate) fn parse_value<T: std::str::FromStr>(value: &str, line: usize) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::parse(line, format!("invalid value `{value}`")))
}

pub(crate) fn parse_list<T: std::str::FromStr>(value: &str, line: usize) -> Result<Vec<T>> {
    if value.is_empty() {
        return Ok(Vec::new());
    }
    value
        .split(',')
        .map(|item| parse_value(item.trim(), line))
        .collect()
}
