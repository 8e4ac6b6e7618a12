use crate::matrix::Matrix;
use crate::model::RadarFrame;

/// Pairwise squared Euclidean distances over `(x, y, z)`, computed once per
/// frame and shared by the neighbor search and both feature stages.
#[derive(Debug, Clone, PartialEq)]
pub struct SquaredDistanceMatrix(Matrix);

impl SquaredDistanceMatrix {
    pub fn compute(frame: &RadarFrame) -> Self {
        let n = frame.len();
        let mut m = Matrix::zeros(n, n);
        for j in 0..n {
            let pj = frame.points[j].position();
            for k in (j + 1)..n {
                let d = squared_distance(pj, frame.points[k].position());
                m[(j, k)] = d;
                m[(k, j)] = d;
            }
        }
        Self(m)
    }

    pub fn len(&self) -> usize {
        self.0.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.0.rows() == 0
    }

    #[inline]
    pub fn get(&self, j: usize, k: usize) -> f64 {
        self.0[(j, k)]
    }

    #[inline]
    pub fn distance(&self, j: usize, k: usize) -> f64 {
        self.0[(j, k)].sqrt()
    }

    pub fn row(&self, j: usize) -> &[f64] {
        self.0.row(j)
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.0
    }
}

#[inline]
pub(crate) fn squared_distance(a: [f64; 3], b: [f64; 3]) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    let dz = a[2] - b[2];
    dx * dx + dy * dy + dz * dz
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::RadarPoint;

    #[test]
    fn single_point_is_zero() {
        let f = RadarFrame::new(0, 0, vec![RadarPoint::new(1.0, 2.0, 3.0, 0.0, 0.0)]);
        let d = SquaredDistanceMatrix::compute(&f);
        assert_eq!(d.len(), 1);
        assert_eq!(d.get(0, 0), 0.0);
    }

    #[test]
    fn three_four_five() {
        let f = RadarFrame::new(
            0,
            0,
            vec![
                RadarPoint::new(0.0, 0.0, 0.0, 9.0, 9.0),
                RadarPoint::new(3.0, 4.0, 0.0, -9.0, 0.0),
            ],
        );
        let d = SquaredDistanceMatrix::compute(&f);
        assert_eq!(d.get(0, 1), 25.0);
        assert_eq!(d.get(1, 0), 25.0);
        assert_eq!(d.distance(0, 1), 5.0);
    }

    #[test]
    fn matches_naive_double_loop() {
        let mut rng = crate::rng::SeededRng::new(10);
        let points: Vec<_> = (0..10)
            .map(|_| RadarPoint::new(rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0), rng.uniform(0.0, 4.0), 0.0, 0.0))
            .collect();
        let f = RadarFrame::new(0, 0, points.clone());
        let d = SquaredDistanceMatrix::compute(&f);
        for (j, a) in points.iter().enumerate() {
            for (k, b) in points.iter().enumerate() {
                let naive = (a.x - b.x).powi(2) + (a.y - b.y).powi(2) + (a.z - b.z).powi(2);
                assert_eq!(d.get(j, k).to_bits(), naive.to_bits());
            }
        }
    }
}
