use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};

use offlinemania::dataset::{self, Dataset};
use offlinemania::env::EnvConfig;
use offlinemania::error::{Error, Result};
use offlinemania::harness::{self, Trajectory};
use offlinemania::policy;
use offlinemania::track::TrackDef;

#[derive(Parser)]
#[command(name = "offlinemania", version, about = "Headless racing environment and offline-RL dataset tools")]
struct Cli {
    /// JSON file overriding physics, ray, reward or episode constants.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Record one episode of a builtin policy as a JSON trajectory.
    Rollout {
        #[arg(long)]
        policy: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Replay a trajectory's actions and check its rewards bit for bit.
    VerifyReplay { trajectory: PathBuf },
    /// Run seeded episodes and report returns, laps and collisions.
    Evaluate {
        #[arg(long)]
        policy: String,
        #[arg(long, default_value_t = 5)]
        episodes: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Record `n` transitions of a builtin policy into an .omd file.
    GenDataset {
        #[arg(long)]
        policy: String,
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the six-dataset suite into a directory.
    GenSuite {
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Sample transitions from several datasets at fixed ratios.
    MixDataset {
        #[arg(long = "input", required = true)]
        inputs: Vec<PathBuf>,
        /// Comma-separated fractions, one per input, summing to 1.
        #[arg(long, value_delimiter = ',', required = true)]
        ratios: Vec<f64>,
        #[arg(long)]
        total: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print header, provenance and field statistics of an .omd file.
    InspectDataset {
        path: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Load and validate a track file.
    ValidateTrack { path: PathBuf },
    /// Measure steps per second with random actions.
    Bench {
        #[arg(long, default_value_t = 1)]
        n_envs: usize,
        #[arg(long, default_value_t = 100_000)]
        n_steps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Draw a trajectory as a top-down SVG.
    RenderReplay {
        trajectory: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::UnknownPolicy(_) | Error::Config(_) | Error::LengthMismatch { .. } => 1,
        Error::Geometry(_) | Error::ReplayMismatch { .. } => 3,
        _ => 2,
    }
}

fn env_config(path: Option<&PathBuf>) -> Result<Arc<EnvConfig>> {
    let track = harness::resolve_track()?;
    Ok(Arc::new(match path {
        Some(p) => EnvConfig::from_config_file(track, p)?,
        None => EnvConfig::with_track(track)?,
    }))
}

fn print_json<T: serde::Serialize>(v: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let cfg = || env_config(cli.config.as_ref());
    match cli.cmd {
        Cmd::Rollout { policy, seed, out } => {
            let cfg = cfg()?;
            let p = policy::builtin(&policy, &cfg.track, &cfg.physics)?;
            let t = harness::record(&cfg, &*p, seed);
            t.save(&out)?;
            let ret: f64 = t.steps.iter().map(|s| s.reward).sum();
            println!("{} steps, return {ret:.3} -> {}", t.steps.len(), out.display());
        }
        Cmd::VerifyReplay { trajectory } => {
            let t = Trajectory::load(trajectory)?;
            harness::verify_replay(&cfg()?, &t)?;
            println!("replay matches: {} steps", t.steps.len());
        }
        Cmd::Evaluate { policy, episodes, seed, json } => {
            let cfg = cfg()?;
            let p = policy::builtin(&policy, &cfg.track, &cfg.physics)?;
            let r = harness::evaluate(&cfg, &*p, episodes, seed)?;
            if json {
                print_json(&r)?;
            } else {
                println!("{r}");
            }
        }
        Cmd::GenDataset { policy, n, seed, out } => {
            let cfg = cfg()?;
            let p = policy::builtin(&policy, &cfg.track, &cfg.physics)?;
            dataset::generate(&*p, &cfg, n, seed)?.save(&out)?;
            println!("{n} transitions -> {}", out.display());
        }
        Cmd::GenSuite { out_dir, seed } => {
            for p in dataset::write_suite(&cfg()?, seed, &out_dir)? {
                println!("{}", p.display());
            }
        }
        Cmd::MixDataset { inputs, ratios, total, seed, out } => {
            let loaded = inputs.iter().map(Dataset::load).collect::<Result<Vec<_>>>()?;
            let refs: Vec<&Dataset> = loaded.iter().collect();
            let mixed = dataset::mix(&refs, &ratios, total, seed)?;
            mixed.save(&out)?;
            for p in &mixed.header.provenance {
                println!("{:<10} {:>8}", p.policy, p.count);
            }
        }
        Cmd::InspectDataset { path, json } => {
            let s = dataset::stats(&path)?;
            if json {
                return print_json(&s);
            }
            println!("count         {}", s.count);
            println!("env_version   {}", s.env_version);
            println!("episodes      {}", s.episodes);
            println!("terminals     {}", s.terminals);
            println!("total reward  {:.3}", s.total_reward);
            if let Some(m) = s.mean_episode_return {
                println!("episode return mean {m:.3}");
            }
            println!("reward        min {:.4} max {:.4} mean {:.4}", s.reward.min, s.reward.max, s.reward.mean);
            for (i, a) in s.action.iter().enumerate() {
                println!("action[{i}]     min {:.4} max {:.4} mean {:.4}", a.min, a.max, a.mean);
            }
            println!("provenance");
            for p in &s.provenance {
                println!("  {:<10} {:>8}  seed {}", p.policy, p.count, p.seed);
            }
        }
        Cmd::ValidateTrack { path } => {
            let t = TrackDef::from_path(&path)?;
            println!(
                "ok: {} ({} vertices, length {:.3} m, half width {} m)",
                t.name,
                t.centerline.len(),
                t.total_length,
                t.half_width
            );
        }
        Cmd::Bench { n_envs, n_steps, seed, json } => {
            let r = harness::bench(&cfg()?, n_envs, n_steps, seed);
            if json {
                return print_json(&r);
            }
            match (r.single_steps_per_sec, r.batched_steps_per_sec) {
                (Some(s), Some(b)) => {
                    println!("single   {s:>12.0} steps/s");
                    println!("batched  {b:>12.0} steps/s ({n_envs} envs, {} threads)", r.threads);
                }
                _ => println!("nothing to run"),
            }
        }
        Cmd::RenderReplay { trajectory, out } => {
            let t = Trajectory::load(trajectory)?;
            let cfg = cfg()?;
            std::fs::write(&out, harness::render_svg(&cfg.track, &t)?)?;
            println!("{}", out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
