use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use twinbeam::experiment::{
    experiment_preset, experiment_preset_names, run_experiment, validate, ExperimentConfig, RunMode, Task,
};
use twinbeam::model::crystal_preset_names;
use twinbeam::{Error, Result};

#[derive(Parser)]
#[command(name = "twinbeam", version, about = "Spatial quantum correlations of high-gain parametric down-conversion")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone, Debug)]
struct Common {
    /// Experiment configuration (TOML).
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Shipped experiment preset instead of a file.
    #[arg(long)]
    preset: Option<String>,
    /// Master seed override.
    #[arg(long)]
    seed: Option<u64>,
    /// Trajectory count override.
    #[arg(long)]
    n_traj: Option<u64>,
    /// Output directory override.
    #[arg(long)]
    out: Option<PathBuf>,
    /// pwpa, mc or both.
    #[arg(long)]
    mode: Option<RunMode>,
    /// Worker threads (0: all cores).
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Analytic plane-wave-pump tables and curves.
    Pwpa(Common),
    /// Run the configured experiment.
    Simulate(Common),
    /// Pixel-size scan and (Δz, Δy) surface.
    Scan(Common),
    /// Check a configuration and echo its dimensionless groups.
    Validate(Common),
    /// List shipped presets, or print one as TOML.
    Presets {
        #[arg(long)]
        dump: Option<String>,
    },
}

fn load(c: &Common) -> Result<ExperimentConfig> {
    let mut cfg = match (&c.config, &c.preset) {
        (Some(p), _) => ExperimentConfig::load(p)?,
        (None, Some(name)) => experiment_preset(name)?,
        (None, None) => return Err(Error::Config("give --config PATH or --preset NAME".into())),
    };
    if let Some(s) = c.seed {
        cfg.run.master_seed = s;
    }
    if let Some(n) = c.n_traj {
        cfg.run.n_traj = n;
    }
    if let Some(m) = c.mode {
        cfg.run.mode = m;
    }
    if let Some(w) = c.workers {
        cfg.run.workers = w;
    }
    if let Some(o) = &c.out {
        cfg.output.dir = o.display().to_string();
    }
    Ok(cfg)
}

fn execute(c: &Common, task: Task) -> Result<()> {
    let cfg = load(c)?;
    let out = PathBuf::from(&cfg.output.dir);
    let summary = run_experiment(&cfg, task, &out)?;
    for n in &summary.notes {
        log::warn!("{n}");
    }
    for f in &summary.files {
        println!("{}", f.display());
    }
    eprintln!("done in {:.2} s", summary.wall_time);
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Pwpa(c) => execute(&c, Task::Pwpa),
        Cmd::Simulate(c) => execute(&c, Task::Simulate),
        Cmd::Scan(c) => execute(&c, Task::Scan),
        Cmd::Validate(c) => {
            let cfg = load(&c)?;
            let ratios = validate(&cfg)?;
            println!("ok");
            for (k, v) in ratios {
                println!("{k} = {v:.6}");
            }
            Ok(())
        }
        Cmd::Presets { dump: Some(name) } => {
            print!("{}", experiment_preset(&name)?.to_toml()?);
            Ok(())
        }
        Cmd::Presets { dump: None } => {
            println!("experiments:");
            for p in experiment_preset_names() {
                println!("  {:<20} {}", p.name, p.summary);
            }
            println!("crystals: {}", crystal_preset_names().join(", "));
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config() { 2 } else { 3 })
        }
    }
}
