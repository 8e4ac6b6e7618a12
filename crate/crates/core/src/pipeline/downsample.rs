use std::collections::BTreeMap;

use crate::model::RadarFrame;
use crate::rng::SeededRng;

/// Grid cell of a position, with the grid anchored at `origin` (the frame's
/// minimum corner).
pub fn cell_index(position: [f64; 3], origin: [f64; 3], cell_width: [f64; 3]) -> [i64; 3] {
    let mut idx = [0i64; 3];
    for axis in 0..3 {
        idx[axis] = ((position[axis] - origin[axis]) / cell_width[axis]).floor() as i64;
    }
    idx
}

fn min_corner(frame: &RadarFrame) -> [f64; 3] {
    let mut origin = [f64::INFINITY; 3];
    for p in &frame.points {
        for (o, c) in origin.iter_mut().zip(p.position()) {
            *o = o.min(c);
        }
    }
    origin
}

/// Keeps at most `q` randomly chosen points per occupied grid cell.
///
/// Cells are visited in lexicographic index order; within a cell the first
/// `q` slots of a partial Fisher-Yates shuffle over the cell's points (in
/// frame order) survive. Survivors keep their original relative order.
pub fn downsample(
    frame: &RadarFrame,
    cell_width: [f64; 3],
    q: usize,
    rng: &mut SeededRng,
) -> RadarFrame {
    assert!(q >= 1, "Q must be at least 1");
    if frame.is_empty() {
        return frame.clone();
    }
    let origin = min_corner(frame);
    let mut cells: BTreeMap<[i64; 3], Vec<usize>> = BTreeMap::new();
    for (i, p) in frame.points.iter().enumerate() {
        cells
            .entry(cell_index(p.position(), origin, cell_width))
            .or_default()
            .push(i);
    }

    let mut keep = Vec::with_capacity(frame.len());
    for members in cells.values_mut() {
        let count = members.len();
        if count <= q {
            keep.extend_from_slice(members);
            continue;
        }
        for slot in 0..q {
            let pick = slot + rng.below_usize(count - slot);
            members.swap(slot, pick);
        }
        keep.extend_from_slice(&members[..q]);
    }
    keep.sort_unstable();

    let points = keep.into_iter().map(|i| frame.points[i]).collect();
    RadarFrame::new(frame.sequence_id, frame.frame_id, points)
}
