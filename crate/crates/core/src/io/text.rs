use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::{ActivityLabel, RadarFrame, RadarPoint, Skeleton};

/// `(sequence_id, frame_id)`.
pub type FrameKey = (u64, u64);

pub const FRAMES_HEADER: &str = "sequence_id,frame_id,x,y,z,v,I";
pub const POSE_HEADER: &str = "sequence_id,frame_id,keypoint,x,y,z";
pub const ACTIVITY_HEADER: &str = "sequence_id,frame_id,class";

/// Split data line with its 1-based line number.
type Row<'a> = (usize, Vec<&'a str>);

/// Data lines after the header. Blank lines are skipped.
fn data_lines<'a>(text: &'a str, header: &str) -> Result<(&'a str, Vec<Row<'a>>)> {
    let mut lines = text.lines().enumerate();
    let found = lines
        .next()
        .map(|(_, l)| l.trim())
        .ok_or_else(|| Error::parse(1, format!("missing header `{header}`")))?;
    let rows = lines
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| (i + 1, l.split(',').map(str::trim).collect()))
        .collect();
    Ok((found, rows))
}

fn expect_header(found: &str, header: &str) -> Result<()> {
    if found != header {
        return Err(Error::parse(1, format!("expected header `{header}`, found `{found}`")));
    }
    Ok(())
}

fn field<T: std::str::FromStr>(raw: &str, name: &str, line: usize) -> Result<T> {
    raw.parse()
        .map_err(|_| Error::parse(line, format!("invalid {name} `{raw}`")))
}

fn key_of(fields: &[&str], line: usize) -> Result<FrameKey> {
    Ok((field(fields[0], "sequence_id", line)?, field(fields[1], "frame_id", line)?))
}

/// Parses a frames file. A line with only `sequence_id,frame_id` declares a
/// frame that may have no points. Frames come back sorted by key; points
/// keep their file order.
pub fn parse_frames(text: &str) -> Result<Vec<RadarFrame>> {
    let (header, rows) = data_lines(text, FRAMES_HEADER)?;
    expect_header(header, FRAMES_HEADER)?;
    let mut frames: BTreeMap<FrameKey, Vec<RadarPoint>> = BTreeMap::new();
    for (line, fields) in rows {
        match fields.len() {
            2 => {
                frames.entry(key_of(&fields, line)?).or_default();
            }
            7 => {
                let key = key_of(&fields, line)?;
                let names = ["x", "y", "z", "v", "I"];
                let mut vals = [0.0; 5];
                for (k, v) in vals.iter_mut().enumerate() {
                    *v = field(fields[2 + k], names[k], line)?;
                }
                frames
                    .entry(key)
                    .or_default()
                    .push(RadarPoint::new(vals[0], vals[1], vals[2], vals[3], vals[4]));
            }
            n => return Err(Error::parse(line, format!("expected 7 fields, found {n}"))),
        }
    }
    Ok(frames
        .into_iter()
        .map(|((seq, id), points)| RadarFrame::new(seq, id, points))
        .collect())
}

pub fn read_frames(path: &Path) -> Result<Vec<RadarFrame>> {
    parse_frames(&super::read_text(path)?)
}

pub fn write_frames(frames: &[RadarFrame]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{FRAMES_HEADER}");
    for f in frames {
        if f.is_empty() {
            let _ = writeln!(out, "{},{}", f.sequence_id, f.frame_id);
        }
        for p in &f.points {
            let _ = writeln!(
                out,
                "{},{},{:?},{:?},{:?},{:?},{:?}",
                f.sequence_id, f.frame_id, p.x, p.y, p.z, p.v, p.intensity
            );
        }
    }
    out
}

/// Parses skeletons; every frame must list keypoints `0..M` exactly once,
/// with the same `M` throughout.
pub fn parse_poses(text: &str, mid_hip_index: usize) -> Result<BTreeMap<FrameKey, Skeleton>> {
    let (header, rows) = data_lines(text, POSE_HEADER)?;
    expect_header(header, POSE_HEADER)?;
    // per frame: first line seen and keypoints filled so far
    type Partial = (usize, Vec<Option<[f64; 3]>>);
    let mut partial: BTreeMap<FrameKey, Partial> = BTreeMap::new();
    for (line, fields) in rows {
        if fields.len() != 6 {
            return Err(Error::parse(line, format!("expected 6 fields, found {}", fields.len())));
        }
        let key = key_of(&fields, line)?;
        let j: usize = field(fields[2], "keypoint", line)?;
        let p = [
            field(fields[3], "x", line)?,
            field(fields[4], "y", line)?,
            field(fields[5], "z", line)?,
        ];
        let (_, slots) = partial.entry(key).or_insert((line, Vec::new()));
        if slots.len() <= j {
            slots.resize(j + 1, None);
        }
        if slots[j].replace(p).is_some() {
            return Err(Error::parse(line, format!("keypoint {j} repeated")));
        }
    }
    let mut out = BTreeMap::new();
    let mut width = None;
    for (key, (line, slots)) in partial {
        let keypoints: Option<Vec<[f64; 3]>> = slots.into_iter().collect();
        let keypoints = keypoints.ok_or_else(|| Error::parse(line, "missing keypoint"))?;
        if *width.get_or_insert(keypoints.len()) != keypoints.len() {
            return Err(Error::parse(line, "keypoint count differs between frames"));
        }
        out.insert(key, Skeleton::new(keypoints, mid_hip_index)?);
    }
    Ok(out)
}

pub fn write_poses<'a>(poses: impl IntoIterator<Item = (FrameKey, &'a Skeleton)>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{POSE_HEADER}");
    for ((seq, id), s) in poses {
        for (j, k) in s.keypoints.iter().enumerate() {
            let _ = writeln!(out, "{seq},{id},{j},{:?},{:?},{:?}", k[0], k[1], k[2]);
        }
    }
    out
}

fn check_unique<T>(map: &mut BTreeMap<FrameKey, T>, key: FrameKey, value: T, line: usize) -> Result<()> {
    if map.insert(key, value).is_some() {
        return Err(Error::parse(line, format!("duplicate entry for sequence {}, frame {}", key.0, key.1)));
    }
    Ok(())
}

pub fn parse_activity_labels(text: &str, num_classes: usize) -> Result<BTreeMap<FrameKey, ActivityLabel>> {
    let (header, rows) = data_lines(text, ACTIVITY_HEADER)?;
    expect_header(header, ACTIVITY_HEADER)?;
    let mut out = BTreeMap::new();
    for (line, fields) in rows {
        if fields.len() != 3 {
            return Err(Error::parse(line, format!("expected 3 fields, found {}", fields.len())));
        }
        let key = key_of(&fields, line)?;
        let label = ActivityLabel::new(field(fields[2], "class", line)?, num_classes)?;
        check_unique(&mut out, key, label, line)?;
    }
    Ok(out)
}

pub fn write_activity_labels(labels: impl IntoIterator<Item = (FrameKey, ActivityLabel)>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{ACTIVITY_HEADER}");
    for ((seq, id), l) in labels {
        let _ = writeln!(out, "{seq},{id},{}", l.class_index);
    }
    out
}

fn scores_header(classes: usize) -> String {
    let mut h = String::from("sequence_id,frame_id");
    for c in 0..classes {
        let _ = write!(h, ",score_{c}");
    }
    h
}

/// Parses class scores; the class count is read from the header.
pub fn parse_scores(text: &str) -> Result<BTreeMap<FrameKey, Vec<f64>>> {
    let first = text.lines().next().unwrap_or("").trim();
    let classes = first.split(',').count().saturating_sub(2);
    let header = scores_header(classes);
    let (found, rows) = data_lines(text, &header)?;
    expect_header(found, &header)?;
    let mut out = BTreeMap::new();
    for (line, fields) in rows {
        if fields.len() != classes + 2 {
            return Err(Error::parse(line, format!("expected {} fields, found {}", classes + 2, fields.len())));
        }
        let key = key_of(&fields, line)?;
        let scores = fields[2..]
            .iter()
            .map(|s| field(s, "score", line))
            .collect::<Result<Vec<f64>>>()?;
        check_unique(&mut out, key, scores, line)?;
    }
    Ok(out)
}

pub fn write_scores<'a>(classes: usize, scores: impl IntoIterator<Item = (FrameKey, &'a [f64])>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}", scores_header(classes));
    for ((seq, id), s) in scores {
        let _ = write!(out, "{seq},{id}");
        for v in s {
            let _ = write!(out, ",{v:?}");
        }
        out.push('\n');
    }
    out
}
