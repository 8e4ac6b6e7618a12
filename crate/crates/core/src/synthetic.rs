//! Synthetic radar data around a parametric 17-joint stick figure.
//!
//! The figure stands `range` meters in front of a radar at the origin with
//! `y` pointing away from the sensor and `z` up. Each point is sampled on a
//! bone (or on a joint), jittered by Gaussian noise, and carries the radial
//! component of the local joint velocity as Doppler.

use std::f64::consts::PI;
use std::str::FromStr;

use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::io::FrameKey;
use crate::model::{ActivityLabel, RadarFrame, RadarPoint, Skeleton};
use crate::rng::SeededRng;

pub const NUM_JOINTS: usize = 17;
pub const MID_HIP: usize = 0;

pub const JOINT_NAMES: [&str; NUM_JOINTS] = [
    "mid_hip", "spine", "neck", "head", "head_top", "l_shoulder", "l_elbow", "l_wrist", "r_shoulder",
    "r_elbow", "r_wrist", "l_hip", "l_knee", "l_ankle", "r_hip", "r_knee", "r_ankle",
];

pub const BONES: [(usize, usize); 16] = [
    (0, 1), (1, 2), (2, 3), (3, 4), (2, 5), (5, 6), (6, 7), (2, 8), (8, 9), (9, 10),
    (0, 11), (11, 12), (12, 13), (0, 14), (14, 15), (15, 16),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MotionModel {
    Stand,
    Walk,
    Wave,
    Squat,
}

impl MotionModel {
    pub const ALL: [MotionModel; 4] = [MotionModel::Stand, MotionModel::Walk, MotionModel::Wave, MotionModel::Squat];

    pub fn class_index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            MotionModel::Stand => "stand",
            MotionModel::Walk => "walk",
            MotionModel::Wave => "wave",
            MotionModel::Squat => "squat",
        }
    }
}

impl FromStr for MotionModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MotionModel::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown motion model `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub sequences: usize,
    pub frames_per_sequence: usize,
    pub points_per_frame: usize,
    /// `None` cycles through every model, one per sequence.
    pub motion: Option<MotionModel>,
    pub position_noise: f64,
    pub doppler_noise: f64,
    /// Sample points exactly on joints instead of along bones.
    pub on_joints: bool,
    pub frame_rate: f64,
    pub range: f64,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            sequences: 1,
            frames_per_sequence: 10,
            points_per_frame: 64,
            motion: None,
            position_noise: 0.02,
            doppler_noise: 0.05,
            on_joints: false,
            frame_rate: 10.0,
            range: 2.5,
            seed: 0,
        }
    }
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if !(self.position_noise >= 0.0 && self.position_noise.is_finite()) {
            return bad("position noise must be finite and non-negative");
        }
        if !(self.doppler_noise >= 0.0 && self.doppler_noise.is_finite()) {
            return bad("doppler noise must be finite and non-negative");
        }
        if !(self.frame_rate > 0.0 && self.frame_rate.is_finite()) {
            return bad("frame rate must be positive");
        }
        if !(self.range > 0.0 && self.range.is_finite()) {
            return bad("range must be positive");
        }
        Ok(())
    }

    pub fn motion_for(&self, sequence: usize) -> MotionModel {
        self.motion.unwrap_or(MotionModel::ALL[sequence % MotionModel::ALL.len()])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticData {
    pub frames: Vec<RadarFrame>,
    pub poses: Vec<(FrameKey, Skeleton)>,
    pub activities: Vec<(FrameKey, ActivityLabel)>,
}

/// Per-sequence figure placement.
#[derive(Debug, Clone, Copy)]
struct Placement {
    offset: [f64; 3],
    heading: f64,
    phase: f64,
    motion: MotionModel,
}

/// Joint positions in the body frame (x right, y forward, z up) at time `t`.
fn body_pose(motion: MotionModel, t: f64, phase: f64) -> [[f64; 3]; NUM_JOINTS] {
    let w = 2.0 * PI * t + phase;
    let (mut swing, mut elbow_lift, mut wave, mut squat) = (0.0, 0.0, 0.0, 0.0);
    match motion {
        MotionModel::Stand => swing = 0.03 * w.sin(),
        MotionModel::Walk => swing = 0.35 * w.sin(),
        MotionModel::Wave => {
            elbow_lift = 1.0;
            wave = 0.6 * (2.0 * w).sin();
        }
        MotionModel::Squat => squat = 0.5 * (1.0 - w.cos()),
    }
    let hip_z = 0.95 - 0.35 * squat;
    let knee_fwd = 0.25 * squat;
    let mut j = [[0.0; 3]; NUM_JOINTS];
    j[0] = [0.0, 0.0, hip_z];
    j[1] = [0.0, 0.0, hip_z + 0.25];
    j[2] = [0.0, 0.0, hip_z + 0.5];
    j[3] = [0.0, 0.02, hip_z + 0.65];
    j[4] = [0.0, 0.0, hip_z + 0.8];
    for (side, s) in [(5usize, -1.0), (8usize, 1.0)] {
        let arm = if side == 5 { swing } else { -swing };
        let shoulder = [0.2 * s, 0.0, hip_z + 0.48];
        j[side] = shoulder;
        if side == 8 && elbow_lift > 0.0 {
            j[side + 1] = [shoulder[0] + 0.28, shoulder[1], shoulder[2] + 0.05];
            let a = 1.2 + wave;
            j[side + 2] = [j[side + 1][0] + 0.25 * a.cos(), shoulder[1], j[side + 1][2] + 0.25 * a.sin()];
        } else {
            j[side + 1] = [shoulder[0], shoulder[1] + 0.28 * arm.sin(), shoulder[2] - 0.28 * arm.cos()];
            let fa = arm * 1.3;
            j[side + 2] = [shoulder[0], j[side + 1][1] + 0.25 * fa.sin(), j[side + 1][2] - 0.25 * fa.cos()];
        }
    }
    for (side, s) in [(11usize, -1.0), (14usize, 1.0)] {
        let leg = if side == 11 { -swing } else { swing };
        let hip = [0.1 * s, 0.0, hip_z];
        j[side] = hip;
        j[side + 1] = [hip[0], hip[1] + 0.45 * leg.sin() + knee_fwd, hip_z - 0.45 * (leg.cos() - 0.4 * squat).max(0.3)];
        j[side + 2] = [hip[0], hip[1] + 0.45 * leg.sin() * 0.6, 0.05];
    }
    j
}

fn world_pose(p: &Placement, t: f64) -> [[f64; 3]; NUM_JOINTS] {
    let (c, s) = (p.heading.cos(), p.heading.sin());
    let drift = if p.motion == MotionModel::Walk { 0.3 * (0.5 * PI * t).sin() } else { 0.0 };
    body_pose(p.motion, t, p.phase).map(|[x, y, z]| {
        [
            p.offset[0] + c * x - s * y + drift,
            p.offset[1] + s * x + c * y,
            p.offset[2] + z,
        ]
    })
}

fn joint_velocities(p: &Placement, t: f64) -> [[f64; 3]; NUM_JOINTS] {
    const H: f64 = 1e-4;
    let a = world_pose(p, t - H);
    let b = world_pose(p, t + H);
    let mut v = [[0.0; 3]; NUM_JOINTS];
    for j in 0..NUM_JOINTS {
        for c in 0..3 {
            v[j][c] = (b[j][c] - a[j][c]) / (2.0 * H);
        }
    }
    v
}

fn lerp(a: [f64; 3], b: [f64; 3], u: f64) -> [f64; 3] {
    [a[0] + u * (b[0] - a[0]), a[1] + u * (b[1] - a[1]), a[2] + u * (b[2] - a[2])]
}

struct Noise(Option<Normal<f64>>);

impl Noise {
    fn new(std: f64) -> Self {
        Noise((std > 0.0).then(|| Normal::new(0.0, std).expect("validated std")))
    }

    fn sample(&self, rng: &mut SeededRng) -> f64 {
        self.0.as_ref().map_or(0.0, |n| n.sample(rng))
    }
}

/// Generates every sequence of `spec`. Equal specs give identical data.
pub fn generate(spec: &SyntheticSpec) -> Result<SyntheticData> {
    spec.validate()?;
    let mut rng = SeededRng::new(spec.seed);
    let pos_noise = Noise::new(spec.position_noise);
    let dop_noise = Noise::new(spec.doppler_noise);
    let num_classes = MotionModel::ALL.len();
    let mut data = SyntheticData {
        frames: Vec::new(),
        poses: Vec::new(),
        activities: Vec::new(),
    };
    for seq in 0..spec.sequences {
        let placement = Placement {
            offset: [rng.uniform(-0.5, 0.5), spec.range + rng.uniform(-0.3, 0.3), 0.0],
            heading: rng.uniform(-0.6, 0.6),
            phase: rng.uniform(0.0, 2.0 * PI),
            motion: spec.motion_for(seq),
        };
        let label = ActivityLabel::new(placement.motion.class_index(), num_classes)?;
        for f in 0..spec.frames_per_sequence {
            let t = f as f64 / spec.frame_rate;
            let joints = world_pose(&placement, t);
            let vel = joint_velocities(&placement, t);
            let mut points = Vec::with_capacity(spec.points_per_frame);
            for _ in 0..spec.points_per_frame {
                let (pos, v) = if spec.on_joints {
                    let j = rng.below_usize(NUM_JOINTS);
                    (joints[j], vel[j])
                } else {
                    let (a, b) = BONES[rng.below_usize(BONES.len())];
                    let u = rng.unit_f64();
                    (lerp(joints[a], joints[b], u), lerp(vel[a], vel[b], u))
                };
                let pos = pos.map(|c| c + pos_noise.sample(&mut rng));
                let r = (pos[0] * pos[0] + pos[1] * pos[1] + pos[2] * pos[2]).sqrt();
                let radial = if r > 0.0 { (v[0] * pos[0] + v[1] * pos[1] + v[2] * pos[2]) / r } else { 0.0 };
                let doppler = radial + dop_noise.sample(&mut rng);
                let intensity = rng.uniform(5.0, 30.0);
                points.push(RadarPoint::new(pos[0], pos[1], pos[2], doppler, intensity));
            }
            let key = (seq as u64, f as u64);
            data.frames.push(RadarFrame::new(key.0, key.1, points));
            data.poses.push((key, Skeleton::new(joints.to_vec(), MID_HIP)?));
            data.activities.push((key, label));
        }
    }
    Ok(data)
}
