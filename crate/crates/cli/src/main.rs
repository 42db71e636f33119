mod commands;
mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};

use crate::commands::Status;

#[derive(Parser)]
#[command(name = "euler2c", version, about = "Two-centre problem: simulation, phase portraits, secular averaging, collision risk")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// JSON config (one document or an array of documents)
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides output.dir)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a trajectory and report conservation of the first integrals
    Simulate(Common),
    /// Level curves of the planar Euler integral, as CSV and SVG
    Portrait(Common),
    /// First-order secular prediction against direct integration
    Secular(Common),
    /// Distance of the orbit's G0 level from the collision level
    Risk {
        #[command(flatten)]
        common: Common,
        /// Normalized distance below which the orbit is at risk
        #[arg(long)]
        margin: Option<f64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    euler2c::par::init_from_env();
    let (name, common, margin) = match &cli.command {
        Command::Simulate(c) => ("simulate", c, None),
        Command::Portrait(c) => ("portrait", c, None),
        Command::Secular(c) => ("secular", c, None),
        Command::Risk { common, margin } => ("risk", common, *margin),
    };
    match run(name, common, margin) {
        Ok(Status::Done) => ExitCode::SUCCESS,
        Ok(Status::Collision) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(name: &str, common: &Common, margin: Option<f64>) -> anyhow::Result<Status> {
    let text = std::fs::read_to_string(&common.config).with_context(|| format!("reading {}", common.config.display()))?;
    let configs = config::parse(&text)?;
    for c in &configs {
        c.check_mode(name)?;
    }
    let many = configs.len() > 1;
    let jobs: Vec<(PathBuf, &config::Config)> = configs
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let base = common.out.clone().or_else(|| c.output.dir.as_ref().map(PathBuf::from)).unwrap_or_else(|| PathBuf::from("."));
            let dir = if many { base.join(c.name.clone().unwrap_or_else(|| format!("{i:03}"))) } else { base };
            (dir, c)
        })
        .collect();
    let results = euler2c::par::map(&jobs, |(dir, c)| run_one(name, c, dir, margin));
    let mut status = Status::Done;
    let mut first_err = None;
    for r in results {
        match r {
            Ok(Status::Collision) => status = Status::Collision,
            Ok(Status::Done) => {}
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    match first_err {
        Some(e) => Err(e),
        None => Ok(status),
    }
}

fn run_one(name: &str, c: &config::Config, dir: &Path, margin: Option<f64>) -> anyhow::Result<Status> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    match name {
        "simulate" => commands::simulate(c, dir),
        "portrait" => commands::portrait(c, dir),
        "secular" => commands::secular(c, dir),
        _ => commands::risk(c, dir, margin),
    }
}
