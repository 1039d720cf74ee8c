use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use bkmhd::checkpoint::load_checkpoint;
use bkmhd::config::{LabConfig, SimConfig};
use bkmhd::runner::{self, Halt, ResumeOptions};
use bkmhd::timeseries::{render, Metadata};
use bkmhd_core::spectral::Sampling;

#[derive(Parser)]
#[command(name = "bkmhd", version, about = "Spectral E-MHD / Hall-MHD solver with blow-up criterion diagnostics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output directory, overriding the configuration.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Replace the seed of random initial conditions.
    #[arg(long, global = true)]
    seed_override: Option<u64>,
    /// Evaluate sup norms on the grid only.
    #[arg(long, global = true)]
    no_oversample: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run a simulation described by a key=value configuration file.
    Run { config: PathBuf },
    /// Continue a run from a checkpoint.
    Resume {
        checkpoint: PathBuf,
        #[arg(long)]
        t_end: f64,
        /// Take stepping and diagnostics settings from this configuration.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Sweep the inequality lab over a field corpus.
    Lab { config: PathBuf },
    /// Print the diagnostics row of a checkpoint.
    Diagnose { checkpoint: PathBuf },
}

fn sim_config(path: &PathBuf, cli: &Cli) -> bkmhd::Result<SimConfig> {
    let mut cfg = SimConfig::parse(&fs::read_to_string(path)?)?;
    if let Some(dir) = &cli.out_dir {
        cfg.out_dir = dir.clone();
    }
    if let Some(seed) = cli.seed_override {
        cfg.override_seed(seed);
    }
    if cli.no_oversample {
        cfg.oversample = false;
    }
    Ok(cfg)
}

fn finish(r: &runner::RunResult) -> ExitCode {
    print!("{}", runner::summary(r));
    match r.halt {
        Halt::Completed => ExitCode::SUCCESS,
        Halt::BlowUp(_) => ExitCode::from(3),
    }
}

fn execute(cli: &Cli) -> bkmhd::Result<ExitCode> {
    match &cli.command {
        Command::Run { config } => {
            let cfg = sim_config(config, cli)?;
            Ok(finish(&runner::run(&cfg)?))
        }
        Command::Resume { checkpoint, t_end, config } => {
            let cp = load_checkpoint(checkpoint)?;
            let (mut opts, hash) = match config {
                Some(path) => {
                    let cfg = sim_config(path, cli)?;
                    (ResumeOptions::from_config(&cfg, *t_end), cfg.hash())
                }
                None => (ResumeOptions::defaults(*t_end, Some(PathBuf::from("out"))), String::from("none")),
            };
            if let Some(dir) = &cli.out_dir {
                opts.out_dir = Some(dir.clone());
            }
            if cli.no_oversample {
                opts.sampling = Sampling::Grid;
            }
            Ok(finish(&runner::resume(cp, &opts, hash)?))
        }
        Command::Lab { config } => {
            let mut cfg = LabConfig::parse(&fs::read_to_string(config)?)?;
            if let Some(dir) = &cli.out_dir {
                cfg.out_dir = dir.clone();
            }
            if let Some(seed) = cli.seed_override {
                cfg.seed = seed;
            }
            if cli.no_oversample {
                cfg.oversample = false;
            }
            let out = runner::run_lab(&cfg)?;
            println!("inequality_id,n,max_ratio,median_ratio,trend");
            for c in &out.constants {
                let trend = c.trend.map_or_else(String::new, |t| format!("{t:.4}"));
                println!("{},{},{:.6e},{:.6e},{}", c.inequality_id, c.n, c.max_ratio, c.median_ratio, trend);
            }
            println!("reports written to {}", cfg.out_dir.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Diagnose { checkpoint } => {
            let cp = load_checkpoint(checkpoint)?;
            let sampling = Sampling::from_flag(!cli.no_oversample);
            let record = runner::diagnose(&cp, sampling)?;
            let mut meta = Metadata::new(String::from("none"));
            meta.extra.push(("checkpoint".into(), checkpoint.display().to_string()));
            print!("{}", render(&[record], &meta));
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
