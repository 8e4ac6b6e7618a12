use super::{NeighborTable, SquaredDistanceMatrix};
use crate::error::Result;
use crate::matrix::Matrix;
use crate::model::RadarFrame;
use crate::statbox::{statbox, statbox_columns, STATBOX_LEN};

/// `x, y, z, v, I` + neighbor-distance Statbox + centroid distance + unit
/// direction toward the centroid.
pub const NODE_FEATURE_DIM: usize = 5 + STATBOX_LEN + 1 + 3;

/// Distance, unit displacement, relative velocity, relative intensity.
pub const EDGE_FEATURE_DIM: usize = 6;

/// The recorded attributes only, `n x 5`.
pub fn raw_node_features(frame: &RadarFrame) -> Matrix {
    Matrix::from_rows(5, frame.points.iter().map(|p| p.to_array()))
}

fn centroid(frame: &RadarFrame) -> [f64; 3] {
    let mut c = [0.0; 3];
    for p in &frame.points {
        for (acc, x) in c.iter_mut().zip(p.position()) {
            *acc += x;
        }
    }
    let n = frame.len() as f64;
    c.map(|s| s / n)
}

/// Extended node features, `n x 19`.
///
/// Columns 5..15 are the Statbox of the distances from the point to its
/// neighbors (all zero when the point has none). Column 15 is the distance to
/// the frame centroid and 16..19 the unit vector from the point toward it,
/// zero when the point sits on the centroid (distance below `epsilon`).
pub fn node_features(
    frame: &RadarFrame,
    d2: &SquaredDistanceMatrix,
    neighbors: &NeighborTable,
    epsilon: f64,
) -> Result<Matrix> {
    let n = frame.len();
    let mut out = Matrix::zeros(n, NODE_FEATURE_DIM);
    if n == 0 {
        return Ok(out);
    }
    let c = centroid(frame);
    let mut dists = Vec::new();
    for (j, p) in frame.points.iter().enumerate() {
        let row = out.row_mut(j);
        row[..5].copy_from_slice(&p.to_array());

        let ns = neighbors.neighbors(j);
        if !ns.is_empty() {
            dists.clear();
            dists.extend(ns.iter().map(|&k| d2.distance(j, k)));
            row[5..15].copy_from_slice(&statbox(&dists, epsilon)?.to_array());
        }

        let to_c = [c[0] - p.x, c[1] - p.y, c[2] - p.z];
        let dist = (to_c[0] * to_c[0] + to_c[1] * to_c[1] + to_c[2] * to_c[2]).sqrt();
        row[15] = dist;
        if dist >= epsilon {
            for axis in 0..3 {
                row[16 + axis] = to_c[axis] / dist;
            }
        }
    }
    Ok(out)
}

/// One row per directed edge, in [`NeighborTable::edges`] order.
///
/// For edge `target -> source` the row is `||p_s - p_t||`, the three
/// components of `(p_s - p_t) / ||p_s - p_t||` (zero for coincident points),
/// `v_s - v_t` and `I_s - I_t`.
pub fn edge_features(
    frame: &RadarFrame,
    d2: &SquaredDistanceMatrix,
    neighbors: &NeighborTable,
) -> Matrix {
    let mut out = Matrix::zeros(neighbors.num_edges(), EDGE_FEATURE_DIM);
    let mut e = 0;
    for (t, sources) in neighbors.lists().iter().enumerate() {
        let pt = &frame.points[t];
        for &s in sources {
            let ps = &frame.points[s];
            let dist = d2.distance(t, s);
            let row = out.row_mut(e);
            row[0] = dist;
            if dist != 0.0 {
                row[1] = (ps.x - pt.x) / dist;
                row[2] = (ps.y - pt.y) / dist;
                row[3] = (ps.z - pt.z) / dist;
            }
            row[4] = ps.v - pt.v;
            row[5] = ps.intensity - pt.intensity;
            e += 1;
        }
    }
    out
}

/// Frame-level summary, length `2 * 10 * d` for an `n x d` node table.
///
/// The first half is the column Statbox of the node table. Its mean entries
/// form the feature-space centroid `c`; the second half is the column Statbox
/// of the per-dimension squared deviations `(x_jd - c_d)^2`.
pub fn frame_features(node_features: &Matrix, epsilon: f64) -> Result<Vec<f64>> {
    let mut out = statbox_columns(node_features, epsilon)?;
    let dim = node_features.cols();
    let centroid: Vec<f64> = (0..dim).map(|d| out[d * STATBOX_LEN]).collect();
    let mut deviations = node_features.clone();
    for r in 0..deviations.rows() {
        for (x, c) in deviations.row_mut(r).iter_mut().zip(&centroid) {
            let d = *x - c;
            *x = d * d;
        }
    }
    out.extend(statbox_columns(&deviations, epsilon)?);
    Ok(out)
}
