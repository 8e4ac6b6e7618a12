mod common;

use pcfex_core::metrics::{self, PoseBatch};
use pcfex_core::{ActivityLabel, Error, SeededRng, Skeleton};

fn skeleton(rng: &mut SeededRng, m: usize) -> Skeleton {
    Skeleton::new((0..m).map(|_| [rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(0.0, 2.0)]).collect(), 0).unwrap()
}

fn rotation(w: [f64; 3]) -> [[f64; 3]; 3] {
    // Rodrigues
    let theta = (w[0] * w[0] + w[1] * w[1] + w[2] * w[2]).sqrt();
    if theta < 1e-15 {
        return [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    }
    let k = w.map(|x| x / theta);
    let (s, c) = theta.sin_cos();
    let kx = [[0.0, -k[2], k[1]], [k[2], 0.0, -k[0]], [-k[1], k[0], 0.0]];
    let mut r = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let kk: f64 = (0..3).map(|l| kx[i][l] * kx[l][j]).sum();
            r[i][j] = if i == j { 1.0 } else { 0.0 } + s * kx[i][j] + (1.0 - c) * kk;
        }
    }
    r
}

/// Aligned prediction for a fixed rotation, with scale and translation at
/// their least-squares optimum.
fn align_with(w: [f64; 3], x: &[[f64; 3]], y: &[[f64; 3]]) -> Vec<[f64; 3]> {
    let r = rotation(w);
    let m = x.len() as f64;
    let mean = |p: &[[f64; 3]]| {
        let mut c = [0.0; 3];
        for q in p {
            for a in 0..3 {
                c[a] += q[a] / m;
            }
        }
        c
    };
    let (mx, my) = (mean(x), mean(y));
    let rx: Vec<[f64; 3]> = x
        .iter()
        .map(|p| {
            let d = [p[0] - mx[0], p[1] - mx[1], p[2] - mx[2]];
            [0, 1, 2].map(|i| r[i][0] * d[0] + r[i][1] * d[1] + r[i][2] * d[2])
        })
        .collect();
    let num: f64 = rx.iter().zip(y).map(|(a, b)| (0..3).map(|i| a[i] * (b[i] - my[i])).sum::<f64>()).sum();
    let den: f64 = rx.iter().map(|a| a.iter().map(|v| v * v).sum::<f64>()).sum();
    let s = (num / den).max(0.0);
    rx.iter().map(|a| [0, 1, 2].map(|i| s * a[i] + my[i])).collect()
}

fn sq_error(a: &[[f64; 3]], b: &[[f64; 3]]) -> f64 {
    a.iter().zip(b).map(|(p, q)| (0..3).map(|i| (p[i] - q[i]).powi(2)).sum::<f64>()).sum()
}

fn mean_error(a: &[[f64; 3]], b: &[[f64; 3]]) -> f64 {
    a.iter().zip(b).map(|(p, q)| (0..3).map(|i| (p[i] - q[i]).powi(2)).sum::<f64>().sqrt()).sum::<f64>() / a.len() as f64
}

fn nelder_mead(f: impl Fn([f64; 3]) -> f64, start: [f64; 3], size: f64) -> [f64; 3] {
    let mut simplex: Vec<([f64; 3], f64)> = (0..4)
        .map(|i| {
            let mut p = start;
            if i > 0 {
                p[i - 1] += size;
            }
            (p, f(p))
        })
        .collect();
    for _ in 0..5000 {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        if (simplex[3].1 - simplex[0].1).abs() <= 1e-18 * simplex[0].1.abs().max(1e-300) {
            break;
        }
        let mut c = [0.0; 3];
        for (p, _) in &simplex[..3] {
            for a in 0..3 {
                c[a] += p[a] / 3.0;
            }
        }
        let towards = |t: f64| [0, 1, 2].map(|a| c[a] + t * (simplex[3].0[a] - c[a]));
        let r = towards(-1.0);
        let fr = f(r);
        if fr < simplex[0].1 {
            let e = towards(-2.0);
            let fe = f(e);
            simplex[3] = if fe < fr { (e, fe) } else { (r, fr) };
        } else if fr < simplex[2].1 {
            simplex[3] = (r, fr);
        } else {
            let k = towards(if fr < simplex[3].1 { -0.5 } else { 0.5 });
            let fk = f(k);
            if fk < simplex[3].1.min(fr) {
                simplex[3] = (k, fk);
            } else {
                let best = simplex[0].0;
                for s in simplex.iter_mut().skip(1) {
                    s.0 = [0, 1, 2].map(|a| best[a] + 0.5 * (s.0[a] - best[a]));
                    s.1 = f(s.0);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    simplex[0].0
}

#[test]
fn pa_mpjpe_matches_numeric_minimization() {
    let mut rng = SeededRng::new(41);
    for case in 0..20 {
        let gt = skeleton(&mut rng, 5);
        let pred = skeleton(&mut rng, 5);
        let (x, y) = (&pred.keypoints, &gt.keypoints);
        let objective = |w: [f64; 3]| sq_error(&align_with(w, x, y), y);
        let mut best = [0.0; 3];
        let mut best_value = f64::INFINITY;
        for _ in 0..12 {
            let start = [rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0)];
            let mut w = nelder_mead(objective, start, 0.5);
            w = nelder_mead(objective, w, 1e-3);
            if objective(w) < best_value {
                best_value = objective(w);
                best = w;
            }
        }
        let oracle = mean_error(&align_with(best, x, y), y);
        let got = metrics::pa_mpjpe(&PoseBatch::new(vec![pred.clone()], vec![gt.clone()]).unwrap()).unwrap();
        assert!((got - oracle).abs() <= 1e-6, "case {case}: {got} vs {oracle}");
        let aligned = metrics::procrustes_align(&pred, &gt).unwrap();
        assert!(sq_error(&aligned.keypoints, y) <= best_value + 1e-12, "case {case}: closed form not optimal");
    }
}

#[test]
fn mpjpe_hand_examples() {
    let gt = Skeleton::new(vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]], 0).unwrap();
    let pred = Skeleton::new(vec![[0.0, 0.0, 0.0], [1.0, 0.010, 0.0]], 0).unwrap();
    let batch = PoseBatch::new(vec![pred], vec![gt.clone()]).unwrap();
    assert!((metrics::mpjpe(&batch).unwrap() - 0.005).abs() < 1e-15);

    // 3 mm and 5 mm after the adjustment; the mid-hip itself contributes 0
    let gt3 = Skeleton::new(vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]], 0).unwrap();
    let pred3 = Skeleton::new(vec![[2.0, 2.0, 2.0], [3.003, 2.0, 2.0], [2.0, 3.0, 2.005]], 0).unwrap();
    let b3 = PoseBatch::new(vec![pred3], vec![gt3]).unwrap();
    assert!((metrics::mpjpe(&b3).unwrap() - 0.008 / 3.0).abs() < 1e-12);

    let same = PoseBatch::new(vec![gt.clone()], vec![gt]).unwrap();
    assert_eq!(metrics::mpjpe(&same).unwrap(), 0.0);
}

#[test]
fn adjusted_skeleton_keeps_ground_truth_mid_hip() {
    let mut rng = SeededRng::new(5);
    for _ in 0..50 {
        let gt = skeleton(&mut rng, 17);
        let pred = skeleton(&mut rng, 17);
        let adj = metrics::midhip_adjust(&pred, &gt).unwrap();
        for a in 0..3 {
            assert!((adj.keypoints[0][a] - gt.keypoints[0][a]).abs() <= 1e-15);
        }
    }
}

#[test]
fn identical_poses_score_zero_everywhere() {
    let mut rng = SeededRng::new(6);
    let gts: Vec<Skeleton> = (0..4).map(|_| skeleton(&mut rng, 17)).collect();
    let batch = PoseBatch::new(gts.clone(), gts).unwrap();
    assert_eq!(metrics::mpjpe(&batch).unwrap(), 0.0);
    assert!(metrics::pa_mpjpe(&batch).unwrap() < 1e-12);
    assert_eq!(metrics::pose_mse(&batch).unwrap(), 0.0);
    assert_eq!(metrics::pose_rmse(&batch).unwrap(), 0.0);
    assert_eq!(metrics::pose_mae(&batch).unwrap(), 0.0);
}

#[test]
fn scalar_pair_errors() {
    assert_eq!(metrics::mse(&[0.0], &[2.0]).unwrap(), 4.0);
    assert_eq!(metrics::rmse(&[0.0], &[2.0]).unwrap(), 2.0);
    assert_eq!(metrics::mae(&[0.0], &[2.0]).unwrap(), 2.0);
    assert!(matches!(metrics::mse(&[], &[]), Err(Error::EmptyInput)));
    assert!(matches!(metrics::mae(&[1.0], &[1.0, 2.0]), Err(Error::ShapeMismatch(_))));
}

#[test]
fn cross_entropy_limits() {
    let label = ActivityLabel::new(2, 4).unwrap();
    let mut last = f64::INFINITY;
    for margin in [0.0, 5.0, 20.0, 100.0, 800.0] {
        let mut scores = vec![0.0; 4];
        scores[2] = margin;
        let ce = metrics::cross_entropy(&scores, label).unwrap();
        assert!(ce.is_finite() && ce >= 0.0 && ce <= last);
        last = ce;
    }
    assert!(last < 1e-300);

    let preds = vec![vec![0.0, 3.0], vec![2.0, 1.0]];
    let labels = vec![ActivityLabel::new(1, 2).unwrap(), ActivityLabel::new(0, 2).unwrap()];
    assert_eq!(metrics::accuracy(&preds, &labels).unwrap(), 1.0);
}

#[test]
fn mismatched_batches_are_rejected() {
    let mut rng = SeededRng::new(8);
    let a = skeleton(&mut rng, 17);
    let b = skeleton(&mut rng, 16);
    assert!(PoseBatch::new(vec![a.clone()], vec![b]).is_err());
    assert!(PoseBatch::new(vec![a.clone(), a.clone()], vec![a]).is_err());
    assert!(matches!(PoseBatch::new(vec![], vec![]), Err(Error::EmptyInput)));
}
