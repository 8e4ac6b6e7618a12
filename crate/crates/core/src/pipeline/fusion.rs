use crate::error::{Error, Result};
use crate::model::RadarFrame;

/// Merges consecutive frames of one sequence into the last frame of the
/// window. Points are concatenated in input order.
pub fn fuse_frames(frames: &[RadarFrame]) -> Result<RadarFrame> {
    let (last, _) = frames.split_last().ok_or(Error::EmptyInput)?;
    let first = &frames[0];
    for pair in frames.windows(2) {
        if pair[1].sequence_id != first.sequence_id {
            return Err(Error::SequenceMismatch {
                first: first.sequence_id,
                other: pair[1].sequence_id,
            });
        }
        let expected = pair[0].frame_id + 1;
        if pair[1].frame_id != expected {
            return Err(Error::NonConsecutiveFrames {
                expected,
                found: pair[1].frame_id,
            });
        }
    }
    let total = frames.iter().map(RadarFrame::len).sum();
    let mut points = Vec::with_capacity(total);
    for frame in frames {
        points.extend_from_slice(&frame.points);
    }
    Ok(RadarFrame::new(last.sequence_id, last.frame_id, points))
}
