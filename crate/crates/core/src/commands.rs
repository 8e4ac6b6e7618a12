//! The command surface shared by the CLI and tests: each command reads its
//! inputs from disk, runs the library, and writes deterministic outputs.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use crate::config::{ConfigFile, PipelineConfig};
use crate::error::{Error, Result};
use crate::gnn::{load_params, predict_framewise, predict_sequential, HeadType, ModelParams, Prediction};
use crate::io::{self, FrameKey, RunManifest, StageTimings, MANIFEST_VERSION};
use crate::matrix::Matrix;
use crate::metrics::{self, PoseBatch, CM_PER_M, MM_PER_M};
use crate::model::{validate_frame, RadarFrame, Skeleton};
use crate::pipeline::{
    downsample, edge_features, frame_features, fuse_frames, knn_edges, naive, node_features, raw_node_features,
    GraphStats, PointGraph, SquaredDistanceMatrix,
};
use crate::rng::SeededRng;
use crate::synthetic::{self, SyntheticSpec};

pub const FRAMES_FILE: &str = "frames.csv";
pub const POSES_FILE: &str = "poses.csv";
pub const ACTIVITIES_FILE: &str = "activities.csv";

fn timed<T>(slot: &mut Duration, f: impl FnOnce() -> T) -> T {
    let start = Instant::now();
    let out = f();
    *slot += start.elapsed();
    out
}

/// Same result as [`crate::pipeline::build_graph`], with per-stage timings.
pub fn build_graph_timed(frames: &[RadarFrame], cfg: &PipelineConfig) -> Result<(PointGraph, GraphStats, StageTimings)> {
    cfg.validate()?;
    let last = frames.last().ok_or(Error::EmptyInput)?;
    let mut rng = SeededRng::for_frame(cfg.seed, last.sequence_id, last.frame_id);
    let mut t = StageTimings::default();
    let fused = timed(&mut t.fusion, || fuse_frames(frames))?;
    let frame = if cfg.downsample_enabled {
        timed(&mut t.downsample, || downsample(&fused, cfg.cell_width, cfg.q, &mut rng))
    } else {
        fused
    };
    let d2 = timed(&mut t.distance, || SquaredDistanceMatrix::compute(&frame));
    let neighbors = timed(&mut t.knn, || knn_edges(&d2, cfg.k));
    let node_table = if cfg.enable_node_features {
        timed(&mut t.node_features, || node_features(&frame, &d2, &neighbors, cfg.epsilon))?
    } else {
        raw_node_features(&frame)
    };
    let edge_table = if cfg.enable_edge_features {
        timed(&mut t.edge_features, || edge_features(&frame, &d2, &neighbors))
    } else {
        Matrix::zeros(neighbors.num_edges(), 0)
    };
    let frame_vec = if cfg.enable_frame_features {
        timed(&mut t.frame_features, || frame_features(&node_table, cfg.epsilon))?
    } else {
        Vec::new()
    };
    let graph = PointGraph {
        sequence_id: frame.sequence_id,
        frame_id: frame.frame_id,
        node_features: node_table,
        edges: neighbors.edges(),
        edge_features: edge_table,
        frame_features: frame_vec,
        label: None,
    };
    let stats = GraphStats {
        points_fused: fused_len(frames),
        points_kept: frame.len(),
        edges: graph.num_edges(),
    };
    Ok((graph, stats, t))
}

fn fused_len(frames: &[RadarFrame]) -> usize {
    frames.iter().map(RadarFrame::len).sum()
}

/// Fusion windows, one per frame: up to `f` frames ending at that frame,
/// truncated at the start of its sequence and at gaps in frame ids.
/// `frames` must be sorted by `(sequence_id, frame_id)`.
pub fn fusion_windows(frames: &[RadarFrame], f: usize) -> Vec<&[RadarFrame]> {
    let mut out = Vec::with_capacity(frames.len());
    let mut run_start = 0;
    for i in 0..frames.len() {
        if i > 0 {
            let (prev, cur) = (&frames[i - 1], &frames[i]);
            if prev.sequence_id != cur.sequence_id || prev.frame_id + 1 != cur.frame_id {
                run_start = i;
            }
        }
        let start = run_start.max((i + 1).saturating_sub(f));
        out.push(&frames[start..=i]);
    }
    out
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// Turns a frames file into one graph record per frame plus a manifest.
/// Frames that keep no points are skipped and counted.
pub fn cmd_extract(input: &Path, config: &ConfigFile, out_dir: &Path) -> Result<RunManifest> {
    let cfg = &config.pipeline;
    cfg.validate()?;
    let frames = io::read_frames(input)?.into_iter().map(validate_frame).collect::<Result<Vec<_>>>()?;
    create_dir(out_dir)?;
    let mut manifest = RunManifest {
        format_version: MANIFEST_VERSION,
        seed: cfg.seed,
        config: config.clone(),
        frames_in: frames.len(),
        ..Default::default()
    };
    for window in fusion_windows(&frames, cfg.fusion_window) {
        let last = window.last().expect("windows are non-empty");
        manifest.points_before += fused_len(window);
        let (graph, stats, timings) = match build_graph_timed(window, cfg) {
            Ok(built) => built,
            Err(Error::EmptyInput) => {
                log::warn!("sequence {} frame {}: no points, skipped", last.sequence_id, last.frame_id);
                manifest.frames_skipped += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        manifest.timings.add(&timings);
        if graph.num_nodes() == 0 {
            log::warn!("sequence {} frame {}: no points, skipped", last.sequence_id, last.frame_id);
            manifest.frames_skipped += 1;
            continue;
        }
        io::write_graph(out_dir, &graph)?;
        manifest.frames_out += 1;
        manifest.points_after += stats.points_kept;
        manifest.edges += stats.edges;
    }
    manifest.write(out_dir)?;
    log::info!(
        "extracted {} of {} frames ({} edges) into {}",
        manifest.frames_out,
        manifest.frames_in,
        manifest.edges,
        out_dir.display()
    );
    Ok(manifest)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InferMode {
    Framewise,
    Sequential,
}

impl std::str::FromStr for InferMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "framewise" => Ok(InferMode::Framewise),
            "sequential" => Ok(InferMode::Sequential),
            _ => Err(Error::InvalidConfig(format!("unknown inference mode `{s}`"))),
        }
    }
}

/// Sliding windows of `len` graphs with the given stride over runs of
/// consecutive frames. Only full windows are produced; each is keyed by its
/// last frame. `graphs` must be sorted by key.
pub fn sequence_windows(graphs: &[PointGraph], len: usize, stride: usize) -> Vec<&[PointGraph]> {
    let mut out = Vec::new();
    let mut run_start = 0;
    for i in 0..=graphs.len() {
        let breaks = i == graphs.len()
            || (i > 0
                && (graphs[i - 1].sequence_id != graphs[i].sequence_id
                    || graphs[i - 1].frame_id + 1 != graphs[i].frame_id));
        if breaks {
            let run = &graphs[run_start..i];
            let mut s = 0;
            while s + len <= run.len() {
                out.push(&run[s..s + len]);
                s += stride;
            }
            run_start = i;
        }
    }
    out
}

fn write_predictions(out: &Path, shape_head: HeadType, classes: usize, preds: &[(FrameKey, Prediction)]) -> Result<()> {
    let text = match shape_head {
        HeadType::Pose => {
            let poses: Vec<(FrameKey, &Skeleton)> = preds
                .iter()
                .filter_map(|(k, p)| match p {
                    Prediction::Pose(s) => Some((*k, s)),
                    Prediction::Scores(_) => None,
                })
                .collect();
            io::write_poses(poses)
        }
        HeadType::Activity => {
            let scores: Vec<(FrameKey, &[f64])> = preds
                .iter()
                .filter_map(|(k, p)| match p {
                    Prediction::Scores(s) => Some((*k, s.as_slice())),
                    Prediction::Pose(_) => None,
                })
                .collect();
            io::write_scores(classes, scores)
        }
    };
    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        create_dir(parent)?;
    }
    io::write_file(out, text.as_bytes())
}

/// Runs the model over every record in `graphs_dir` and writes one
/// prediction per frame (framewise) or per full window (sequential).
/// Returns the number of predictions written.
pub fn cmd_infer(graphs_dir: &Path, weights: &Path, config: &ConfigFile, mode: InferMode, out: &Path) -> Result<usize> {
    let manifest_path = graphs_dir.join(RunManifest::FILE_NAME);
    if manifest_path.exists() {
        RunManifest::load(graphs_dir)?;
    }
    let graphs = io::read_graph_dir(graphs_dir)?;
    let params = load_params(weights, &config.model, config.pipeline.feature_dims())?;
    let preds = infer_graphs(&params, &graphs, mode)?;
    write_predictions(out, config.model.head, config.model.classes, &preds)?;
    log::info!("wrote {} predictions to {}", preds.len(), out.display());
    Ok(preds.len())
}

pub fn infer_graphs(params: &ModelParams, graphs: &[PointGraph], mode: InferMode) -> Result<Vec<(FrameKey, Prediction)>> {
    match mode {
        InferMode::Framewise => graphs
            .iter()
            .map(|g| Ok(((g.sequence_id, g.frame_id), predict_framewise(params, g)?)))
            .collect(),
        InferMode::Sequential => {
            if params.recurrent.is_none() {
                return Err(Error::MissingRecurrentParams);
            }
            let shape = &params.shape;
            sequence_windows(graphs, shape.sequence_length, shape.stride)
                .into_iter()
                .map(|w| {
                    let last = w.last().expect("full window");
                    Ok(((last.sequence_id, last.frame_id), predict_sequential(params, w)?))
                })
                .collect()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    Pose,
    Activity,
}

impl std::str::FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pose" => Ok(Task::Pose),
            "activity" => Ok(Task::Activity),
            _ => Err(Error::InvalidConfig(format!("unknown task `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum EvalReport {
    Pose {
        frames: usize,
        mpjpe_mm: f64,
        pa_mpjpe_mm: f64,
        rmse_cm: f64,
        mae_cm: f64,
        per_keypoint_mae_cm: Vec<f64>,
    },
    Activity {
        frames: usize,
        accuracy: f64,
        cross_entropy: f64,
    },
}

impl EvalReport {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        match self {
            EvalReport::Pose {
                frames,
                mpjpe_mm,
                pa_mpjpe_mm,
                rmse_cm,
                mae_cm,
                per_keypoint_mae_cm,
            } => {
                let _ = writeln!(out, "task = pose");
                let _ = writeln!(out, "frames = {frames}");
                let _ = writeln!(out, "mpjpe_mm = {mpjpe_mm:?}");
                let _ = writeln!(out, "pa_mpjpe_mm = {pa_mpjpe_mm:?}");
                let _ = writeln!(out, "rmse_cm = {rmse_cm:?}");
                let _ = writeln!(out, "mae_cm = {mae_cm:?}");
                for (j, e) in per_keypoint_mae_cm.iter().enumerate() {
                    let _ = writeln!(out, "mae_cm.keypoint_{j} = {e:?}");
                }
            }
            EvalReport::Activity {
                frames,
                accuracy,
                cross_entropy,
            } => {
                let _ = writeln!(out, "task = activity");
                let _ = writeln!(out, "frames = {frames}");
                let _ = writeln!(out, "accuracy = {accuracy:?}");
                let _ = writeln!(out, "cross_entropy = {cross_entropy:?}");
            }
        }
        out
    }
}

/// Every prediction key must be present in the ground truth.
fn join<'a, P, G>(preds: &'a BTreeMap<FrameKey, P>, gt: &'a BTreeMap<FrameKey, G>) -> Result<Vec<(&'a P, &'a G)>> {
    if preds.is_empty() {
        return Err(Error::EmptyInput);
    }
    preds
        .iter()
        .map(|(key, p)| {
            gt.get(key).map(|g| (p, g)).ok_or(Error::IdMismatch {
                sequence_id: key.0,
                frame_id: key.1,
            })
        })
        .collect()
}

/// Scores a predictions file against ground truth, joining on
/// `(sequence_id, frame_id)` so file order does not matter.
pub fn cmd_eval(predictions: &Path, ground_truth: &Path, task: Task, config: &ConfigFile) -> Result<EvalReport> {
    let pred_text = io::read_text(predictions)?;
    let gt_text = io::read_text(ground_truth)?;
    eval_text(&pred_text, &gt_text, task, config)
}

pub fn eval_text(pred_text: &str, gt_text: &str, task: Task, config: &ConfigFile) -> Result<EvalReport> {
    match task {
        Task::Pose => {
            let mid_hip = config.model.mid_hip_index;
            let preds = io::parse_poses(pred_text, mid_hip)?;
            let gt = io::parse_poses(gt_text, mid_hip)?;
            let pairs = join(&preds, &gt)?;
            let batch = PoseBatch::new(
                pairs.iter().map(|(p, _)| (*p).clone()).collect(),
                pairs.iter().map(|(_, g)| (*g).clone()).collect(),
            )?;
            Ok(EvalReport::Pose {
                frames: batch.len(),
                mpjpe_mm: metrics::mpjpe(&batch)? * MM_PER_M,
                pa_mpjpe_mm: metrics::pa_mpjpe(&batch)? * MM_PER_M,
                rmse_cm: metrics::pose_rmse(&batch)? * CM_PER_M,
                mae_cm: metrics::pose_mae(&batch)? * CM_PER_M,
                per_keypoint_mae_cm: metrics::per_keypoint_errors(&batch).iter().map(|e| e.mae * CM_PER_M).collect(),
            })
        }
        Task::Activity => {
            let preds = io::parse_scores(pred_text)?;
            let classes = preds.values().next().map_or(config.model.classes, Vec::len);
            let gt = io::parse_activity_labels(gt_text, classes)?;
            let pairs = join(&preds, &gt)?;
            let scores: Vec<Vec<f64>> = pairs.iter().map(|(p, _)| (*p).clone()).collect();
            let labels: Vec<_> = pairs.iter().map(|(_, g)| **g).collect();
            let accuracy = metrics::accuracy(&scores, &labels)?;
            let mut ce = 0.0;
            for (s, l) in scores.iter().zip(&labels) {
                ce += metrics::cross_entropy(s, *l)?;
            }
            Ok(EvalReport::Activity {
                frames: labels.len(),
                accuracy,
                cross_entropy: ce / labels.len() as f64,
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticOutputs {
    pub frames: PathBuf,
    pub poses: PathBuf,
    pub activities: PathBuf,
}

/// Writes `frames.csv`, `poses.csv` and `activities.csv` into `out_dir`.
pub fn cmd_gen_synthetic(spec: &SyntheticSpec, out_dir: &Path) -> Result<SyntheticOutputs> {
    let data = synthetic::generate(spec)?;
    create_dir(out_dir)?;
    let outputs = SyntheticOutputs {
        frames: out_dir.join(FRAMES_FILE),
        poses: out_dir.join(POSES_FILE),
        activities: out_dir.join(ACTIVITIES_FILE),
    };
    io::write_file(&outputs.frames, io::write_frames(&data.frames).as_bytes())?;
    io::write_file(&outputs.poses, io::write_poses(data.poses.iter().map(|(k, s)| (*k, s))).as_bytes())?;
    io::write_file(
        &outputs.activities,
        io::write_activity_labels(data.activities.iter().copied()).as_bytes(),
    )?;
    Ok(outputs)
}

/// Parameter grid for the benchmark. `None` in `downsample_q` means
/// downsampling off.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchGrid {
    pub downsample_q: Vec<Option<usize>>,
    pub k: Vec<usize>,
    pub fusion_window: Vec<usize>,
}

impl Default for BenchGrid {
    fn default() -> Self {
        Self {
            downsample_q: vec![Some(1), Some(5), None],
            k: vec![20],
            fusion_window: vec![1],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub q: Option<usize>,
    pub k: usize,
    pub fusion_window: usize,
    pub frames: usize,
    pub points_before: usize,
    pub points_after: usize,
    pub edges: usize,
    pub timings: StageTimings,
    /// Largest per-frame working set: distance matrix, feature tables and
    /// edge list, in bytes.
    pub peak_bytes: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NaiveComparison {
    pub frames: usize,
    pub identical: bool,
    pub shared: Duration,
    pub naive: Duration,
}

impl NaiveComparison {
    pub fn speedup(&self) -> f64 {
        self.naive.as_secs_f64() / self.shared.as_secs_f64().max(f64::MIN_POSITIVE)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    pub comparison: Option<NaiveComparison>,
}

pub const BENCH_CSV_HEADER: &str = "q,k,f,frames,points_before,points_after,edges,fusion_s,downsample_s,distance_s,knn_s,node_s,edge_s,frame_s,total_s,peak_bytes";

impl BenchReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{BENCH_CSV_HEADER}");
        for r in &self.rows {
            let q = r.q.map_or_else(|| "off".to_string(), |q| q.to_string());
            let _ = write!(out, "{q},{},{},{},{},{},{}", r.k, r.fusion_window, r.frames, r.points_before, r.points_after, r.edges);
            for (_, d) in r.timings.entries() {
                let _ = write!(out, ",{:?}", d.as_secs_f64());
            }
            let _ = writeln!(out, ",{:?},{}", r.timings.total().as_secs_f64(), r.peak_bytes);
        }
        out
    }

    pub fn comparison_text(&self) -> String {
        match &self.comparison {
            None => String::new(),
            Some(c) => format!(
                "frames = {}\nidentical = {}\nshared_s = {:?}\nnaive_s = {:?}\nspeedup = {:?}\n",
                c.frames,
                c.identical,
                c.shared.as_secs_f64(),
                c.naive.as_secs_f64(),
                c.speedup()
            ),
        }
    }
}

fn working_set_bytes(g: &PointGraph) -> usize {
    let n = g.num_nodes();
    8 * (n * n + g.node_features.len() + g.edge_features.len() + g.frame_features.len()) + 16 * g.num_edges()
}

/// Times the pipeline over each grid point and compares the shared distance
/// matrix against per-stage recomputation on the base configuration.
pub fn bench_frames(frames: &[RadarFrame], base: &PipelineConfig, grid: &BenchGrid) -> Result<BenchReport> {
    if frames.is_empty() {
        return Ok(BenchReport::default());
    }
    let mut report = BenchReport::default();
    for &q in &grid.downsample_q {
        for &k in &grid.k {
            for &f in &grid.fusion_window {
                let cfg = PipelineConfig {
                    k,
                    fusion_window: f,
                    downsample_enabled: q.is_some(),
                    q: q.unwrap_or(base.q),
                    ..base.clone()
                };
                cfg.validate()?;
                let mut row = BenchRow {
                    q,
                    k,
                    fusion_window: f,
                    frames: 0,
                    points_before: 0,
                    points_after: 0,
                    edges: 0,
                    timings: StageTimings::default(),
                    peak_bytes: 0,
                };
                for window in fusion_windows(frames, f) {
                    match build_graph_timed(window, &cfg) {
                        Ok((g, stats, t)) => {
                            row.frames += 1;
                            row.points_before += stats.points_fused;
                            row.points_after += stats.points_kept;
                            row.edges += stats.edges;
                            row.timings.add(&t);
                            row.peak_bytes = row.peak_bytes.max(working_set_bytes(&g));
                        }
                        Err(Error::EmptyInput) => {}
                        Err(e) => return Err(e),
                    }
                }
                report.rows.push(row);
            }
        }
    }
    let mut cmp = NaiveComparison {
        frames: 0,
        identical: true,
        shared: Duration::ZERO,
        naive: Duration::ZERO,
    };
    let cfg = PipelineConfig {
        downsample_enabled: false,
        fusion_window: 1,
        ..base.clone()
    };
    for frame in frames.iter().filter(|f| !f.is_empty()) {
        let done = crate::pipeline::Pipeline::new(&cfg)?;
        let fast = timed(&mut cmp.shared, || done.graph_from_frame(frame, None))?;
        let slow = timed(&mut cmp.naive, || naive::graph_from_frame(frame, &cfg, None))?;
        cmp.identical &= fast == slow;
        cmp.frames += 1;
    }
    report.comparison = Some(cmp);
    Ok(report)
}

pub fn cmd_bench(input: &Path, base: &PipelineConfig, grid: &BenchGrid) -> Result<BenchReport> {
    let frames = io::read_frames(input)?.into_iter().map(validate_frame).collect::<Result<Vec<_>>>()?;
    bench_frames(&frames, base, grid)
}
