//! Losses and evaluation metrics for pose estimation and activity
//! recognition. Distances are in meters; conversion to mm or cm happens at
//! reporting time.

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::model::{ActivityLabel, Skeleton};

pub const MM_PER_M: f64 = 1000.0;
pub const CM_PER_M: f64 = 100.0;

/// Predictions and ground truths of equal length and keypoint count.
#[derive(Debug, Clone, PartialEq)]
pub struct PoseBatch {
    pub predictions: Vec<Skeleton>,
    pub ground_truths: Vec<Skeleton>,
}

impl PoseBatch {
    pub fn new(predictions: Vec<Skeleton>, ground_truths: Vec<Skeleton>) -> Result<Self> {
        if predictions.len() != ground_truths.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} predictions for {} ground truths",
                predictions.len(),
                ground_truths.len()
            )));
        }
        if predictions.is_empty() {
            return Err(Error::EmptyInput);
        }
        for pair in predictions.iter().zip(&ground_truths) {
            check_pair(pair.0, pair.1)?;
        }
        let m = ground_truths[0].num_keypoints();
        if ground_truths.iter().any(|g| g.num_keypoints() != m) {
            return Err(Error::ShapeMismatch("keypoint count varies across the batch".into()));
        }
        Ok(Self {
            predictions,
            ground_truths,
        })
    }

    pub fn len(&self) -> usize {
        self.predictions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.predictions.is_empty()
    }

    fn pairs(&self) -> impl Iterator<Item = (&Skeleton, &Skeleton)> {
        self.predictions.iter().zip(&self.ground_truths)
    }
}

fn check_pair(pred: &Skeleton, gt: &Skeleton) -> Result<()> {
    if pred.num_keypoints() != gt.num_keypoints() {
        return Err(Error::ShapeMismatch(format!(
            "{} predicted keypoints vs {} ground truth",
            pred.num_keypoints(),
            gt.num_keypoints()
        )));
    }
    if pred.mid_hip_index != gt.mid_hip_index {
        return Err(Error::ShapeMismatch("mid-hip index differs".into()));
    }
    Ok(())
}

fn norm3(a: [f64; 3], b: [f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

/// Moves the prediction so its mid-hip lands on the ground-truth mid-hip:
/// `adj_j = pred_j - pred_midhip + gt_midhip`.
pub fn midhip_adjust(pred: &Skeleton, gt: &Skeleton) -> Result<Skeleton> {
    check_pair(pred, gt)?;
    let p = pred.mid_hip();
    let g = gt.mid_hip();
    let keypoints = pred
        .keypoints
        .iter()
        .map(|k| [k[0] - p[0] + g[0], k[1] - p[1] + g[1], k[2] - p[2] + g[2]])
        .collect();
    Ok(Skeleton {
        keypoints,
        mid_hip_index: pred.mid_hip_index,
    })
}

fn mean_joint_error(pred: &Skeleton, gt: &Skeleton) -> f64 {
    let total: f64 = pred.keypoints.iter().zip(&gt.keypoints).map(|(a, b)| norm3(*a, *b)).sum();
    total / pred.num_keypoints() as f64
}

/// Mean per-joint position error after mid-hip adjustment, in meters.
pub fn mpjpe(batch: &PoseBatch) -> Result<f64> {
    let mut total = 0.0;
    for (pred, gt) in batch.pairs() {
        total += mean_joint_error(&midhip_adjust(pred, gt)?, gt);
    }
    Ok(total / batch.len() as f64)
}

/// Least-squares similarity alignment of `pred` onto `gt` (rotation, uniform
/// scale, translation), with a proper rotation enforced.
pub fn procrustes_align(pred: &Skeleton, gt: &Skeleton) -> Result<Skeleton> {
    check_pair(pred, gt)?;
    let m = gt.num_keypoints();
    if m < 3 {
        return Err(Error::DegenerateConfiguration("alignment needs at least 3 keypoints"));
    }
    let to_vec = |k: &[f64; 3]| Vector3::new(k[0], k[1], k[2]);
    let xs: Vec<Vector3<f64>> = pred.keypoints.iter().map(to_vec).collect();
    let ys: Vec<Vector3<f64>> = gt.keypoints.iter().map(to_vec).collect();
    let inv_m = 1.0 / m as f64;
    let mu_x = xs.iter().sum::<Vector3<f64>>() * inv_m;
    let mu_y = ys.iter().sum::<Vector3<f64>>() * inv_m;

    let mut cov = Matrix3::zeros();
    let mut gt_scatter = Matrix3::zeros();
    let mut var_x = 0.0;
    for (x, y) in xs.iter().zip(&ys) {
        let xc = x - mu_x;
        let yc = y - mu_y;
        cov += yc * xc.transpose();
        gt_scatter += yc * yc.transpose();
        var_x += xc.norm_squared();
    }
    cov *= inv_m;
    var_x *= inv_m;

    // collinear or coincident ground truth leaves the rotation undetermined
    let mut spread = gt_scatter.symmetric_eigenvalues().as_slice().to_vec();
    spread.sort_by(|a, b| b.total_cmp(a));
    if spread[0] <= f64::EPSILON || spread[1] <= 1e-12 * spread[0] {
        return Err(Error::DegenerateConfiguration("ground-truth keypoints are collinear or coincident"));
    }

    let aligned: Vec<[f64; 3]> = if var_x == 0.0 {
        vec![[mu_y.x, mu_y.y, mu_y.z]; m]
    } else {
        let svd = cov.svd(true, true);
        let (u, v_t) = (svd.u.expect("u requested"), svd.v_t.expect("v_t requested"));
        let mut s = Matrix3::identity();
        if (u.determinant() * v_t.determinant()) < 0.0 {
            s[(2, 2)] = -1.0;
        }
        let rotation = u * s * v_t;
        let scale = (Matrix3::from_diagonal(&svd.singular_values) * s).trace() / var_x;
        let translation = mu_y - scale * rotation * mu_x;
        xs.iter()
            .map(|x| {
                let a = scale * rotation * x + translation;
                [a.x, a.y, a.z]
            })
            .collect()
    };
    Ok(Skeleton {
        keypoints: aligned,
        mid_hip_index: pred.mid_hip_index,
    })
}

/// MPJPE after per-sample similarity alignment, in meters.
pub fn pa_mpjpe(batch: &PoseBatch) -> Result<f64> {
    let mut total = 0.0;
    for (pred, gt) in batch.pairs() {
        total += mean_joint_error(&procrustes_align(pred, gt)?, gt);
    }
    Ok(total / batch.len() as f64)
}

fn check_flat(pred: &[f64], gt: &[f64]) -> Result<()> {
    if pred.len() != gt.len() {
        return Err(Error::ShapeMismatch(format!("{} values vs {}", pred.len(), gt.len())));
    }
    if pred.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(())
}

pub fn mse(pred: &[f64], gt: &[f64]) -> Result<f64> {
    check_flat(pred, gt)?;
    Ok(pred.iter().zip(gt).map(|(p, g)| (p - g).powi(2)).sum::<f64>() / pred.len() as f64)
}

pub fn rmse(pred: &[f64], gt: &[f64]) -> Result<f64> {
    mse(pred, gt).map(f64::sqrt)
}

pub fn mae(pred: &[f64], gt: &[f64]) -> Result<f64> {
    check_flat(pred, gt)?;
    Ok(pred.iter().zip(gt).map(|(p, g)| (p - g).abs()).sum::<f64>() / pred.len() as f64)
}

fn flatten_batch(batch: &PoseBatch) -> (Vec<f64>, Vec<f64>) {
    let p = batch.predictions.iter().flat_map(Skeleton::flatten).collect();
    let g = batch.ground_truths.iter().flat_map(Skeleton::flatten).collect();
    (p, g)
}

/// Squared error over every raw keypoint coordinate of the batch.
pub fn pose_mse(batch: &PoseBatch) -> Result<f64> {
    let (p, g) = flatten_batch(batch);
    mse(&p, &g)
}

pub fn pose_rmse(batch: &PoseBatch) -> Result<f64> {
    pose_mse(batch).map(f64::sqrt)
}

pub fn pose_mae(batch: &PoseBatch) -> Result<f64> {
    let (p, g) = flatten_batch(batch);
    mae(&p, &g)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KeypointErrors {
    pub mae: f64,
    pub rmse: f64,
}

/// MAE and RMSE per keypoint, over its three coordinates across the batch.
pub fn per_keypoint_errors(batch: &PoseBatch) -> Vec<KeypointErrors> {
    let m = batch.ground_truths[0].num_keypoints();
    (0..m)
        .map(|j| {
            let (mut abs, mut sq) = (0.0, 0.0);
            for (pred, gt) in batch.pairs() {
                for c in 0..3 {
                    let d = pred.keypoints[j][c] - gt.keypoints[j][c];
                    abs += d.abs();
                    sq += d * d;
                }
            }
            let count = (3 * batch.len()) as f64;
            KeypointErrors {
                mae: abs / count,
                rmse: (sq / count).sqrt(),
            }
        })
        .collect()
}

/// Numerically stable softmax.
pub fn softmax(scores: &[f64]) -> Vec<f64> {
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exp: Vec<f64> = scores.iter().map(|s| (s - max).exp()).collect();
    let total: f64 = exp.iter().sum();
    exp.into_iter().map(|e| e / total).collect()
}

fn check_scores(scores: &[f64], label: ActivityLabel) -> Result<()> {
    if label.num_classes < 2 || scores.len() != label.num_classes {
        return Err(Error::ShapeMismatch(format!(
            "{} scores for {} classes",
            scores.len(),
            label.num_classes
        )));
    }
    if label.class_index >= label.num_classes {
        return Err(Error::LabelOutOfRange {
            label: label.class_index,
            classes: label.num_classes,
        });
    }
    Ok(())
}

/// `-log softmax(scores)[label]`, computed as `logsumexp(scores) - score[label]`.
pub fn cross_entropy(scores: &[f64], label: ActivityLabel) -> Result<f64> {
    check_scores(scores, label)?;
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lse = scores.iter().map(|s| (s - max).exp()).sum::<f64>().ln() + max;
    Ok(lse - scores[label.class_index])
}

/// Index of the largest score; ties go to the lowest index.
pub fn argmax(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate() {
        if s > scores[best] {
            best = i;
        }
    }
    best
}

pub fn accuracy(predictions: &[Vec<f64>], labels: &[ActivityLabel]) -> Result<f64> {
    if predictions.len() != labels.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} predictions for {} labels",
            predictions.len(),
            labels.len()
        )));
    }
    if predictions.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut correct = 0usize;
    for (scores, &label) in predictions.iter().zip(labels) {
        check_scores(scores, label)?;
        if argmax(scores) == label.class_index {
            correct += 1;
        }
    }
    Ok(correct as f64 / predictions.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn skel(points: &[[f64; 3]]) -> Skeleton {
        Skeleton::new(points.to_vec(), 0).unwrap()
    }

    fn prefix(s: &Skeleton, m: usize) -> Skeleton {
        Skeleton::new(s.keypoints[..m].to_vec(), 0).unwrap()
    }

    fn sample() -> Skeleton {
        skel(&[
            [0.0, 0.0, 1.0],
            [0.2, 0.1, 1.4],
            [-0.2, 0.1, 1.4],
            [0.0, -0.1, 1.8],
            [0.1, 0.3, 0.5],
        ])
    }

    #[test]
    fn adjust_cancels_offsets() {
        let gt = sample();
        assert_eq!(midhip_adjust(&gt, &gt).unwrap(), gt);
        let shifted = skel(&gt.keypoints.iter().map(|k| [k[0] + 0.5, k[1] - 0.25, k[2] + 2.0]).collect::<Vec<_>>());
        let adj = midhip_adjust(&shifted, &gt).unwrap();
        for (a, b) in adj.keypoints.iter().zip(&gt.keypoints) {
            for c in 0..3 {
                assert!((a[c] - b[c]).abs() < 1e-15);
            }
        }
        assert_eq!(adj.mid_hip(), gt.mid_hip());
    }

    #[test]
    fn mpjpe_arithmetic_mean() {
        // errors of 3 mm, 5 mm and 0 at the mid-hip
        let gt = Skeleton::new(vec![[0.0; 3], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]], 2).unwrap();
        let pred = Skeleton::new(vec![[0.003, 0.0, 0.0], [1.0, 0.004, 0.003], [0.0, 1.0, 0.0]], 2).unwrap();
        let batch = PoseBatch::new(vec![pred], vec![gt.clone()]).unwrap();
        assert!((mpjpe(&batch).unwrap() * MM_PER_M - 8.0 / 3.0).abs() < 1e-9);
        let batch = PoseBatch::new(vec![gt.clone()], vec![gt]).unwrap();
        assert_eq!(mpjpe(&batch).unwrap(), 0.0);
    }

    #[test]
    fn pa_recovers_similarity() {
        let gt = sample();
        let (c, s) = (0.3f64.cos(), 0.3f64.sin());
        let pred = skel(
            &gt.keypoints
                .iter()
                .map(|k| [1.7 * (c * k[0] - s * k[1]) + 0.4, 1.7 * (s * k[0] + c * k[1]) - 1.0, 1.7 * k[2] + 0.2])
                .collect::<Vec<_>>(),
        );
        let batch = PoseBatch::new(vec![pred], vec![gt.clone()]).unwrap();
        assert!(pa_mpjpe(&batch).unwrap() < 1e-9);
        let same = PoseBatch::new(vec![gt.clone()], vec![gt]).unwrap();
        assert!(pa_mpjpe(&same).unwrap() < 1e-12);
    }

    #[test]
    fn pa_rejects_mirror_images() {
        let gt = sample();
        let mirrored = skel(&gt.keypoints.iter().map(|k| [-k[0], k[1], k[2]]).collect::<Vec<_>>());
        let aligned = procrustes_align(&mirrored, &gt).unwrap();
        // a reflection cannot be undone by a proper rotation
        assert!(mean_joint_error(&aligned, &gt) > 1e-3);
    }

    #[test]
    fn pa_degenerate_ground_truth() {
        let line = skel(&[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [2.0, 0.0, 0.0], [3.0, 0.0, 0.0]]);
        let batch = PoseBatch::new(vec![prefix(&sample(), 4)], vec![line]).unwrap();
        assert!(matches!(pa_mpjpe(&batch), Err(Error::DegenerateConfiguration(_))));
        let point = skel(&[[1.0; 3]; 4]);
        let batch = PoseBatch::new(vec![prefix(&sample(), 4)], vec![point]).unwrap();
        assert!(matches!(pa_mpjpe(&batch), Err(Error::DegenerateConfiguration(_))));
    }

    #[test]
    fn flat_error_metrics() {
        assert_eq!(mse(&[0.0], &[2.0]).unwrap(), 4.0);
        assert_eq!(rmse(&[0.0], &[2.0]).unwrap(), 2.0);
        assert_eq!(mae(&[0.0], &[2.0]).unwrap(), 2.0);
        assert_eq!(mse(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert!(mse(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn per_keypoint_breakdown() {
        let gt = Skeleton::new(vec![[0.0; 3], [0.0; 3]], 0).unwrap();
        let pred = Skeleton::new(vec![[0.0; 3], [0.3, 0.0, 0.0]], 0).unwrap();
        let b = PoseBatch::new(vec![pred], vec![gt]).unwrap();
        let per = per_keypoint_errors(&b);
        assert_eq!(per[0], KeypointErrors { mae: 0.0, rmse: 0.0 });
        assert!((per[1].mae - 0.1).abs() < 1e-15);
        assert!((per[1].rmse - (0.09f64 / 3.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn cross_entropy_cases() {
        for c in [2usize, 5, 10] {
            let ce = cross_entropy(&vec![0.3; c], ActivityLabel::new(1, c).unwrap()).unwrap();
            assert!((ce - (c as f64).ln()).abs() < 1e-12);
        }
        let confident = cross_entropy(&[800.0, 0.0, 0.0], ActivityLabel::new(0, 3).unwrap()).unwrap();
        assert!(confident.abs() < 1e-300);
        assert!(cross_entropy(&[0.0, 0.0], ActivityLabel { class_index: 2, num_classes: 2 }).is_err());
        assert!(cross_entropy(&[0.0, 0.0, 1.0], ActivityLabel::new(0, 2).unwrap()).is_err());
    }

    #[test]
    fn accuracy_and_ties() {
        let labels = [ActivityLabel::new(0, 3).unwrap(), ActivityLabel::new(2, 3).unwrap()];
        assert_eq!(accuracy(&[vec![1.0, 0.0, 0.0], vec![0.0, 0.0, 4.0]], &labels).unwrap(), 1.0);
        assert_eq!(argmax(&[1.0, 3.0, 3.0]), 1);
        assert_eq!(accuracy(&[vec![2.0, 2.0, 0.0], vec![5.0, 0.0, 5.0]], &labels).unwrap(), 0.5);
    }

    #[test]
    fn softmax_sums_to_one() {
        let p = softmax(&[1000.0, -3.0, 2.5, 0.0]);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}
