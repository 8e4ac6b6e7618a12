use std::fmt::Write as _;
use std::path::Path;
use std::time::Duration;

use crate::config::{key_values, parse_value, ConfigFile};
use crate::error::{Error, Result};

/// Bumped on any change to the graph record or manifest layout.
pub const MANIFEST_VERSION: u32 = 1;

/// Accumulated wall-clock per pipeline stage.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StageTimings {
    pub fusion: Duration,
    pub downsample: Duration,
    pub distance: Duration,
    pub knn: Duration,
    pub node_features: Duration,
    pub edge_features: Duration,
    pub frame_features: Duration,
}

impl StageTimings {
    pub fn total(&self) -> Duration {
        self.entries().iter().map(|(_, d)| *d).sum()
    }

    pub fn entries(&self) -> [(&'static str, Duration); 7] {
        [
            ("fusion", self.fusion),
            ("downsample", self.downsample),
            ("distance", self.distance),
            ("knn", self.knn),
            ("node_features", self.node_features),
            ("edge_features", self.edge_features),
            ("frame_features", self.frame_features),
        ]
    }

    pub fn add(&mut self, other: &StageTimings) {
        self.fusion += other.fusion;
        self.downsample += other.downsample;
        self.distance += other.distance;
        self.knn += other.knn;
        self.node_features += other.node_features;
        self.edge_features += other.edge_features;
        self.frame_features += other.frame_features;
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (name, d) in self.entries() {
            let _ = writeln!(out, "{name}_seconds = {:?}", d.as_secs_f64());
        }
        let _ = writeln!(out, "total_seconds = {:?}", self.total().as_secs_f64());
        out
    }
}

/// Summary of one `extract` run. The manifest text is deterministic; timings
/// are written to a separate file so reruns compare byte-identical.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunManifest {
    pub format_version: u32,
    pub seed: u64,
    pub config: ConfigFile,
    pub frames_in: usize,
    pub frames_out: usize,
    pub frames_skipped: usize,
    pub points_before: usize,
    pub points_after: usize,
    pub edges: usize,
    pub timings: StageTimings,
}

impl RunManifest {
    pub const FILE_NAME: &'static str = "manifest.txt";
    pub const TIMING_FILE_NAME: &'static str = "timing.txt";

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "format_version = {}", self.format_version);
        let _ = writeln!(out, "seed = {}", self.seed);
        let _ = writeln!(out, "frames_in = {}", self.frames_in);
        let _ = writeln!(out, "frames_out = {}", self.frames_out);
        let _ = writeln!(out, "frames_skipped = {}", self.frames_skipped);
        let _ = writeln!(out, "points_before = {}", self.points_before);
        let _ = writeln!(out, "points_after = {}", self.points_after);
        let _ = writeln!(out, "edges = {}", self.edges);
        for line in self.config.to_canonical_string().lines() {
            let _ = writeln!(out, "config.{line}");
        }
        out
    }

    /// Parses manifest text; timings are not part of it and stay zero.
    pub fn parse(text: &str) -> Result<Self> {
        let mut m = RunManifest::default();
        let mut config = String::new();
        for (line, key, value) in key_values(text)? {
            match key {
                "format_version" => m.format_version = parse_value(value, line)?,
                "seed" => m.seed = parse_value(value, line)?,
                "frames_in" => m.frames_in = parse_value(value, line)?,
                "frames_out" => m.frames_out = parse_value(value, line)?,
                "frames_skipped" => m.frames_skipped = parse_value(value, line)?,
                "points_before" => m.points_before = parse_value(value, line)?,
                "points_after" => m.points_after = parse_value(value, line)?,
                "edges" => m.edges = parse_value(value, line)?,
                _ => match key.strip_prefix("config.") {
                    Some(k) => {
                        let _ = writeln!(config, "{k} = {value}");
                    }
                    None => return Err(Error::parse(line, format!("unknown manifest key `{key}`"))),
                },
            }
        }
        if m.format_version != MANIFEST_VERSION {
            return Err(Error::FormatVersion {
                expected: MANIFEST_VERSION,
                found: m.format_version,
            });
        }
        m.config = ConfigFile::parse(&config)?;
        Ok(m)
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        super::write_file(&dir.join(Self::FILE_NAME), self.to_text().as_bytes())?;
        super::write_file(&dir.join(Self::TIMING_FILE_NAME), self.timings.to_text().as_bytes())
    }

    pub fn load(dir: &Path) -> Result<Self> {
        Self::parse(&super::read_text(&dir.join(Self::FILE_NAME))?)
    }
}
