//! Domain types shared across the pipeline, the network and the metrics.

use std::fmt;

use crate::error::{Error, Result};

/// The five recorded attributes of a radar return.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PointField {
    X,
    Y,
    Z,
    V,
    I,
}

impl PointField {
    pub const ALL: [PointField; 5] = [
        PointField::X,
        PointField::Y,
        PointField::Z,
        PointField::V,
        PointField::I,
    ];
}

impl fmt::Display for PointField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            PointField::X => "x",
            PointField::Y => "y",
            PointField::Z => "z",
            PointField::V => "v",
            PointField::I => "I",
        };
        f.write_str(name)
    }
}

/// One radar return: position in meters, Doppler velocity in m/s and the
/// sensor-reported intensity.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RadarPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub v: f64,
    pub intensity: f64,
}

impl RadarPoint {
    pub fn new(x: f64, y: f64, z: f64, v: f64, intensity: f64) -> Self {
        Self {
            x,
            y,
            z,
            v,
            intensity,
        }
    }

    #[inline]
    pub fn position(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn field(&self, field: PointField) -> f64 {
        match field {
            PointField::X => self.x,
            PointField::Y => self.y,
            PointField::Z => self.z,
            PointField::V => self.v,
            PointField::I => self.intensity,
        }
    }

    /// `[x, y, z, v, I]`, the raw node feature layout.
    pub fn to_array(&self) -> [f64; 5] {
        [self.x, self.y, self.z, self.v, self.intensity]
    }
}

/// One radar sweep. Point order is significant: seeded downsampling is only
/// reproducible if ingestion order is preserved.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RadarFrame {
    pub sequence_id: u64,
    pub frame_id: u64,
    pub points: Vec<RadarPoint>,
}

impl RadarFrame {
    pub fn new(sequence_id: u64, frame_id: u64, points: Vec<RadarPoint>) -> Self {
        Self {
            sequence_id,
            frame_id,
            points,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Rejects frames carrying NaN or infinite attributes, naming the first
/// offending point and field. Empty frames pass.
pub fn validate_frame(frame: RadarFrame) -> Result<RadarFrame> {
    for (point_index, point) in frame.points.iter().enumerate() {
        for field in PointField::ALL {
            if !point.field(field).is_finite() {
                return Err(Error::NonFiniteValue { point_index, field });
            }
        }
    }
    Ok(frame)
}

/// Keypoints in meters, `M x 3`.
#[derive(Debug, Clone, PartialEq)]
pub struct Skeleton {
    pub keypoints: Vec<[f64; 3]>,
    pub mid_hip_index: usize,
}

impl Skeleton {
    pub fn new(keypoints: Vec<[f64; 3]>, mid_hip_index: usize) -> Result<Self> {
        if keypoints.is_empty() || mid_hip_index >= keypoints.len() {
            return Err(Error::ShapeMismatch(format!(
                "mid-hip index {mid_hip_index} invalid for {} keypoints",
                keypoints.len()
            )));
        }
        if keypoints.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::ShapeMismatch("non-finite keypoint".into()));
        }
        Ok(Self {
            keypoints,
            mid_hip_index,
        })
    }

    pub fn num_keypoints(&self) -> usize {
        self.keypoints.len()
    }

    pub fn mid_hip(&self) -> [f64; 3] {
        self.keypoints[self.mid_hip_index]
    }

    /// Row-major `[x0, y0, z0, x1, ...]`.
    pub fn flatten(&self) -> Vec<f64> {
        self.keypoints.iter().flatten().copied().collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ActivityLabel {
    pub class_index: usize,
    pub num_classes: usize,
}

impl ActivityLabel {
    pub fn new(class_index: usize, num_classes: usize) -> Result<Self> {
        if class_index >= num_classes {
            return Err(Error::LabelOutOfRange {
                label: class_index,
                classes: num_classes,
            });
        }
        Ok(Self {
            class_index,
            num_classes,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Label {
    Pose(Skeleton),
    Activity(ActivityLabel),
}
