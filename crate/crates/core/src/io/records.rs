//! Graph record layout, all integers and floats little-endian:
//!
//! ```text
//! magic       8 bytes  "PCFXGRF\0"
//! version     u32
//! sequence_id u64
//! frame_id    u64
//! node table  u64 rows, u64 cols, rows*cols f64 (row-major)
//! edges       u64 count, count * (u64 target, u64 source)
//! edge table  u64 rows, u64 cols, rows*cols f64
//! frame vec   u64 len, len f64
//! label       u8 tag: 0 none
//!                     1 pose: u64 M, u64 mid_hip, 3M f64
//!                     2 activity: u64 class, u64 classes
//! ```

use std::fmt::Write as _;
use std::io::Read;
use std::path::{Path, PathBuf};

use super::binary::{read_f64, read_u32, read_u64, read_u8, write_f64, write_u32, write_u64, write_u8};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::model::{ActivityLabel, Label, Skeleton};
use crate::pipeline::PointGraph;

pub const GRAPH_MAGIC: &[u8; 8] = b"PCFXGRF\0";
pub const GRAPH_VERSION: u32 = 1;

// Bounds dimension headers so a corrupt header fails instead of allocating.
const MAX_ELEMENTS: u64 = 1 << 32;

fn put_matrix(out: &mut Vec<u8>, m: &Matrix) {
    write_u64(out, m.rows() as u64).unwrap();
    write_u64(out, m.cols() as u64).unwrap();
    for &x in m.as_slice() {
        write_f64(out, x).unwrap();
    }
}

pub fn encode_graph(g: &PointGraph) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(GRAPH_MAGIC);
    write_u32(&mut out, GRAPH_VERSION).unwrap();
    write_u64(&mut out, g.sequence_id).unwrap();
    write_u64(&mut out, g.frame_id).unwrap();
    put_matrix(&mut out, &g.node_features);
    write_u64(&mut out, g.edges.len() as u64).unwrap();
    for &(t, s) in &g.edges {
        write_u64(&mut out, t as u64).unwrap();
        write_u64(&mut out, s as u64).unwrap();
    }
    put_matrix(&mut out, &g.edge_features);
    write_u64(&mut out, g.frame_features.len() as u64).unwrap();
    for &x in &g.frame_features {
        write_f64(&mut out, x).unwrap();
    }
    match &g.label {
        None => write_u8(&mut out, 0).unwrap(),
        Some(Label::Pose(s)) => {
            write_u8(&mut out, 1).unwrap();
            write_u64(&mut out, s.num_keypoints() as u64).unwrap();
            write_u64(&mut out, s.mid_hip_index as u64).unwrap();
            for x in s.flatten() {
                write_f64(&mut out, x).unwrap();
            }
        }
        Some(Label::Activity(a)) => {
            write_u8(&mut out, 2).unwrap();
            write_u64(&mut out, a.class_index as u64).unwrap();
            write_u64(&mut out, a.num_classes as u64).unwrap();
        }
    }
    out
}

fn corrupt(what: impl std::fmt::Display) -> Error {
    Error::ManifestMismatch(format!("graph record: {what}"))
}

struct Decoder<'a> {
    r: &'a [u8],
}

impl Decoder<'_> {
    fn u64(&mut self) -> Result<u64> {
        read_u64(&mut self.r).map_err(|_| corrupt("truncated"))
    }

    fn usize(&mut self) -> Result<usize> {
        self.u64().map(|v| v as usize)
    }

    fn floats(&mut self, n: u64) -> Result<Vec<f64>> {
        if n > MAX_ELEMENTS || (n * 8) as usize > self.r.len() {
            return Err(corrupt("truncated"));
        }
        (0..n).map(|_| read_f64(&mut self.r).map_err(|_| corrupt("truncated"))).collect()
    }

    fn matrix(&mut self) -> Result<Matrix> {
        let rows = self.u64()?;
        let cols = self.u64()?;
        let n = rows.checked_mul(cols).ok_or_else(|| corrupt("bad dimensions"))?;
        Ok(Matrix::from_vec(rows as usize, cols as usize, self.floats(n)?))
    }
}

pub fn decode_graph(bytes: &[u8]) -> Result<PointGraph> {
    let mut r = bytes;
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic).map_err(|_| corrupt("truncated"))?;
    if &magic != GRAPH_MAGIC {
        return Err(corrupt("bad magic"));
    }
    let version = read_u32(&mut r).map_err(|_| corrupt("truncated"))?;
    if version != GRAPH_VERSION {
        return Err(Error::FormatVersion {
            expected: GRAPH_VERSION,
            found: version,
        });
    }
    let mut d = Decoder { r };
    let sequence_id = d.u64()?;
    let frame_id = d.u64()?;
    let node_features = d.matrix()?;
    let num_edges = d.u64()?;
    if num_edges > MAX_ELEMENTS || (num_edges * 16) as usize > d.r.len() {
        return Err(corrupt("truncated"));
    }
    let mut edges = Vec::with_capacity(num_edges as usize);
    for _ in 0..num_edges {
        let (t, s) = (d.usize()?, d.usize()?);
        if t >= node_features.rows() || s >= node_features.rows() {
            return Err(corrupt("edge endpoint out of range"));
        }
        edges.push((t, s));
    }
    let edge_features = d.matrix()?;
    if edge_features.rows() != edges.len() {
        return Err(corrupt("edge table rows differ from edge count"));
    }
    let len = d.u64()?;
    let frame_features = d.floats(len)?;
    let tag = read_u8(&mut d.r).map_err(|_| corrupt("truncated"))?;
    let label = match tag {
        0 => None,
        1 => {
            let m = d.u64()?;
            let mid_hip = d.usize()?;
            let flat = d.floats(m.checked_mul(3).ok_or_else(|| corrupt("bad keypoint count"))?)?;
            let keypoints = flat.chunks(3).map(|c| [c[0], c[1], c[2]]).collect();
            Some(Label::Pose(Skeleton::new(keypoints, mid_hip).map_err(corrupt)?))
        }
        2 => {
            let class = d.usize()?;
            let classes = d.usize()?;
            Some(Label::Activity(ActivityLabel::new(class, classes).map_err(corrupt)?))
        }
        t => return Err(corrupt(format!("unknown label tag {t}"))),
    };
    if !d.r.is_empty() {
        return Err(corrupt("trailing bytes"));
    }
    Ok(PointGraph {
        sequence_id,
        frame_id,
        node_features,
        edges,
        edge_features,
        frame_features,
        label,
    })
}

/// File stem for a record; zero padding keeps lexical and numeric order equal.
pub fn record_stem(sequence_id: u64, frame_id: u64) -> String {
    format!("graph_{sequence_id:020}_{frame_id:020}")
}

fn write_matrix_text(out: &mut String, name: &str, m: &Matrix) {
    let _ = writeln!(out, "{name} {} {}", m.rows(), m.cols());
    for row in m.iter_rows() {
        let cells: Vec<String> = row.iter().map(|x| format!("{x:?}")).collect();
        let _ = writeln!(out, "{}", cells.join(" "));
    }
}

/// Text rendering of a record carrying the same values as the binary form.
pub fn graph_debug_dump(g: &PointGraph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "graph_record_version {GRAPH_VERSION}");
    let _ = writeln!(out, "sequence_id {}", g.sequence_id);
    let _ = writeln!(out, "frame_id {}", g.frame_id);
    write_matrix_text(&mut out, "node_features", &g.node_features);
    let _ = writeln!(out, "edges {}", g.edges.len());
    for &(t, s) in &g.edges {
        let _ = writeln!(out, "{t} {s}");
    }
    write_matrix_text(&mut out, "edge_features", &g.edge_features);
    let frame: Vec<String> = g.frame_features.iter().map(|x| format!("{x:?}")).collect();
    let _ = writeln!(out, "frame_features {}", g.frame_features.len());
    let _ = writeln!(out, "{}", frame.join(" "));
    match &g.label {
        None => {
            let _ = writeln!(out, "label none");
        }
        Some(Label::Pose(s)) => {
            let _ = writeln!(out, "label pose {} {}", s.num_keypoints(), s.mid_hip_index);
            for k in &s.keypoints {
                let _ = writeln!(out, "{:?} {:?} {:?}", k[0], k[1], k[2]);
            }
        }
        Some(Label::Activity(a)) => {
            let _ = writeln!(out, "label activity {} {}", a.class_index, a.num_classes);
        }
    }
    out
}

/// Writes `<stem>.bin` and `<stem>.txt` into `dir`, returning the binary path.
pub fn write_graph(dir: &Path, g: &PointGraph) -> Result<PathBuf> {
    let stem = record_stem(g.sequence_id, g.frame_id);
    let bin = dir.join(format!("{stem}.bin"));
    super::write_file(&bin, &encode_graph(g))?;
    super::write_file(&dir.join(format!("{stem}.txt")), graph_debug_dump(g).as_bytes())?;
    Ok(bin)
}

pub fn read_graph(path: &Path) -> Result<PointGraph> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_graph(&bytes)
}

/// Reads every `graph_*.bin` in `dir`, ordered by `(sequence_id, frame_id)`.
pub fn read_graph_dir(dir: &Path) -> Result<Vec<PointGraph>> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut paths = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("");
        if name.starts_with("graph_") && name.ends_with(".bin") {
            paths.push(path);
        }
    }
    paths.sort();
    let mut graphs = paths.iter().map(|p| read_graph(p)).collect::<Result<Vec<_>>>()?;
    graphs.sort_by_key(|g| (g.sequence_id, g.frame_id));
    Ok(graphs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(label: Option<Label>) -> PointGraph {
        PointGraph {
            sequence_id: 4,
            frame_id: 9,
            node_features: Matrix::from_vec(2, 3, vec![0.1, 0.2, 0.3, -1.0, f64::MIN_POSITIVE, 7.0]),
            edges: vec![(0, 1), (1, 0)],
            edge_features: Matrix::from_vec(2, 1, vec![1.5, -1.5]),
            frame_features: vec![1.0 / 3.0, 2.0],
            label,
        }
    }

    #[test]
    fn records_round_trip() {
        let labels = [
            None,
            Some(Label::Activity(ActivityLabel::new(1, 4).unwrap())),
            Some(Label::Pose(Skeleton::new(vec![[1.0, 2.0, 3.0], [0.0; 3]], 1).unwrap())),
        ];
        for label in labels {
            let g = graph(label);
            assert_eq!(decode_graph(&encode_graph(&g)).unwrap(), g);
        }
    }

    #[test]
    fn version_and_corruption_are_hard_errors() {
        let mut bytes = encode_graph(&graph(None));
        bytes[8] = 2;
        assert!(matches!(decode_graph(&bytes), Err(Error::FormatVersion { expected: 1, found: 2 })));
        let bytes = encode_graph(&graph(None));
        assert!(decode_graph(&bytes[..bytes.len() - 1]).is_err());
        let mut extra = bytes.clone();
        extra.push(0);
        assert!(decode_graph(&extra).is_err());
        assert!(decode_graph(b"PCFXWTS\0").is_err());
    }

    #[test]
    fn empty_tables_round_trip() {
        let g = PointGraph {
            sequence_id: 0,
            frame_id: 0,
            node_features: Matrix::zeros(0, 19),
            edges: vec![],
            edge_features: Matrix::zeros(0, 6),
            frame_features: vec![],
            label: None,
        };
        assert_eq!(decode_graph(&encode_graph(&g)).unwrap(), g);
    }

    #[test]
    fn directory_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let mut a = graph(None);
        a.frame_id = 10;
        let b = graph(None);
        write_graph(dir.path(), &a).unwrap();
        write_graph(dir.path(), &b).unwrap();
        let back = read_graph_dir(dir.path()).unwrap();
        assert_eq!(back, vec![b.clone(), a]);
        let dump = std::fs::read_to_string(dir.path().join(format!("{}.txt", record_stem(4, 9)))).unwrap();
        assert!(dump.contains("0.3333333333333333"));
    }
}
