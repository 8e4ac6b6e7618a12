//! File formats: point-cloud frames, labels and predictions as text,
//! graph records as binary with a text debug dump, and the run manifest.
//!
//! Text floats are written with Rust's shortest round-trip representation,
//! so parsing a written file reproduces every value bit for bit. Binary
//! records remain the source of truth.

pub mod binary;
mod manifest;
mod records;
mod text;

pub use manifest::{RunManifest, StageTimings, MANIFEST_VERSION};
pub use records::{
    decode_graph, encode_graph, graph_debug_dump, read_graph, read_graph_dir, record_stem, write_graph,
    GRAPH_MAGIC, GRAPH_VERSION,
};
pub use text::{
    parse_activity_labels, parse_frames, parse_poses, parse_scores, read_frames, write_activity_labels,
    write_frames, write_poses, write_scores, FrameKey, ACTIVITY_HEADER, FRAMES_HEADER, POSE_HEADER,
};

use std::path::Path;

use crate::error::{Error, Result};

pub(crate) fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub(crate) fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}
