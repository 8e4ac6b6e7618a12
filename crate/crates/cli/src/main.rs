use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pcfex_core::commands::{self, BenchGrid, InferMode, Task};
use pcfex_core::config::ConfigFile;
use pcfex_core::gnn::{save_params, ModelParams};
use pcfex_core::synthetic::{MotionModel, SyntheticSpec};
use pcfex_core::{Error, Result, SeededRng};

/// Radar point clouds as graphs: feature extraction, inference and scoring.
#[derive(Parser)]
#[command(name = "pcfex", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Config file (`key = value`); defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the seed of the config or generator.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

impl Common {
    fn load(&self) -> Result<ConfigFile> {
        let mut cfg = match &self.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        if let Some(seed) = self.seed {
            cfg.pipeline.seed = seed;
        }
        Ok(cfg)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Framewise,
    Sequential,
}

#[derive(Clone, Copy, ValueEnum)]
enum TaskArg {
    Pose,
    Activity,
}

#[derive(Clone, Copy, ValueEnum)]
enum Motion {
    Stand,
    Walk,
    Wave,
    Squat,
}

#[derive(Subcommand)]
enum Command {
    /// Build one graph record per frame (or fusion window) plus a manifest.
    Extract {
        /// Frames file (`sequence_id,frame_id,x,y,z,v,I`).
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Run the network over a directory of graph records.
    Infer {
        graphs: PathBuf,
        #[arg(long)]
        weights: PathBuf,
        #[arg(long, value_enum, default_value = "framewise")]
        mode: Mode,
        #[command(flatten)]
        common: Common,
    },
    /// Score predictions against ground truth, joined on frame ids.
    Eval {
        predictions: PathBuf,
        ground_truth: PathBuf,
        #[arg(long, value_enum, default_value = "pose")]
        task: TaskArg,
        #[command(flatten)]
        common: Common,
    },
    /// Write synthetic frames, poses and activity labels into a directory.
    GenSynthetic {
        #[arg(long, default_value_t = 1)]
        sequences: usize,
        #[arg(long, default_value_t = 10)]
        frames: usize,
        #[arg(long, default_value_t = 64)]
        points: usize,
        /// One motion for every sequence; cycles through all when omitted.
        #[arg(long, value_enum)]
        motion: Option<Motion>,
        /// Position noise standard deviation in meters.
        #[arg(long, default_value_t = 0.02)]
        noise: f64,
        #[arg(long, default_value_t = 0.05)]
        doppler_noise: f64,
        /// Sample points exactly on joints instead of along bones.
        #[arg(long)]
        on_joints: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Time the pipeline over a parameter grid and compare against
    /// per-stage distance recomputation.
    Bench {
        input: PathBuf,
        /// Points per cell; `off` disables downsampling.
        #[arg(long, value_delimiter = ',', default_value = "1,5,off")]
        q: Vec<String>,
        #[arg(long, value_delimiter = ',')]
        k: Vec<usize>,
        #[arg(long, value_delimiter = ',')]
        f: Vec<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Write a seeded random (or all-zero) weights file for the config's
    /// model shape.
    InitWeights {
        #[arg(long)]
        zero: bool,
        #[command(flatten)]
        common: Common,
    },
}

fn write_out(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn parse_q(values: &[String]) -> Result<Vec<Option<usize>>> {
    values
        .iter()
        .map(|v| match v.as_str() {
            "off" => Ok(None),
            n => n
                .parse()
                .map(Some)
                .map_err(|_| Error::InvalidConfig(format!("invalid Q `{n}`"))),
        })
        .collect()
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Extract { input, common } => {
            let cfg = common.load()?;
            let manifest = commands::cmd_extract(&input, &cfg, &common.out)?;
            println!(
                "{} graphs written ({} skipped, {} edges)",
                manifest.frames_out, manifest.frames_skipped, manifest.edges
            );
        }
        Command::Infer { graphs, weights, mode, common } => {
            let cfg = common.load()?;
            let mode = match mode {
                Mode::Framewise => InferMode::Framewise,
                Mode::Sequential => InferMode::Sequential,
            };
            let n = commands::cmd_infer(&graphs, &weights, &cfg, mode, &common.out)?;
            println!("{n} predictions written to {}", common.out.display());
        }
        Command::Eval { predictions, ground_truth, task, common } => {
            let cfg = common.load()?;
            let task = match task {
                TaskArg::Pose => Task::Pose,
                TaskArg::Activity => Task::Activity,
            };
            let report = commands::cmd_eval(&predictions, &ground_truth, task, &cfg)?.to_text();
            write_out(&common.out, &report)?;
            print!("{report}");
        }
        Command::GenSynthetic {
            sequences,
            frames,
            points,
            motion,
            noise,
            doppler_noise,
            on_joints,
            common,
        } => {
            let motion = motion.map(|m| match m {
                Motion::Stand => MotionModel::Stand,
                Motion::Walk => MotionModel::Walk,
                Motion::Wave => MotionModel::Wave,
                Motion::Squat => MotionModel::Squat,
            });
            let spec = SyntheticSpec {
                sequences,
                frames_per_sequence: frames,
                points_per_frame: points,
                motion,
                position_noise: noise,
                doppler_noise,
                on_joints,
                seed: common.seed.unwrap_or(0),
                ..SyntheticSpec::default()
            };
            let out = commands::cmd_gen_synthetic(&spec, &common.out)?;
            println!("wrote {}", out.frames.display());
        }
        Command::Bench { input, q, k, f, common } => {
            let cfg = common.load()?;
            let mut grid = BenchGrid {
                downsample_q: parse_q(&q)?,
                ..BenchGrid::default()
            };
            if !k.is_empty() {
                grid.k = k;
            }
            if !f.is_empty() {
                grid.fusion_window = f;
            }
            let report = commands::cmd_bench(&input, &cfg.pipeline, &grid)?;
            write_out(&common.out, &report.to_csv())?;
            print!("{}", report.comparison_text());
        }
        Command::InitWeights { zero, common } => {
            let cfg = common.load()?;
            let dims = cfg.pipeline.feature_dims();
            let params = if zero {
                ModelParams::zeros(&cfg.model, dims)?
            } else {
                ModelParams::init(&cfg.model, dims, &mut SeededRng::new(cfg.pipeline.seed))?
            };
            save_params(&params, &common.out)?;
            println!("{} parameters written to {}", params.num_parameters(), common.out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
