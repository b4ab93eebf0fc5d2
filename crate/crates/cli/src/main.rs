//! `bdmc`: batch driver for rate-distortion and backward-channel
//! experiments.

mod config;
mod failure;
mod plot;
mod run;
mod table;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::ExperimentConfig;
use failure::Failure;

#[derive(Parser)]
#[command(name = "bdmc", version, about = "Rate-distortion codes and their backward channel")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Experiment configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory, created if missing.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Replace the configured seeds with this one.
    #[arg(long)]
    seed: Option<u64>,
    /// Replace the configured enumeration budget (blocks).
    #[arg(long)]
    budget: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// R(D) over a grid of distortion levels, with backward channels.
    RdCurve(Common),
    /// Divergence between the code-induced and backward-channel laws over n.
    Theorem2Sweep(Common),
    /// Error probability of codes read as channel codes, over n.
    Theorem6Experiment(Common),
    /// Build one code and write it in text form.
    CodeBuild {
        #[command(flatten)]
        common: Common,
        /// Blocklength; defaults to the first entry of `n_grid`.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Summarize a code file, and evaluate it against a configuration.
    CodeInspect {
        code: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Redraw the chart for a table written by one of the experiments.
    Replot {
        csv: PathBuf,
        /// Defaults to the CSV path with an `.svg` extension.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
}

fn load(path: &Path, seed: Option<u64>, budget: Option<u64>) -> Result<ExperimentConfig, Failure> {
    let mut cfg = ExperimentConfig::load(path)?;
    if let Some(s) = seed {
        cfg.seeds = vec![s];
    }
    if let Some(b) = budget {
        cfg.budget = b;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn prepare(c: &Common) -> Result<ExperimentConfig, Failure> {
    let cfg = load(&c.config, c.seed, c.budget)?;
    std::fs::create_dir_all(&c.out)
        .map_err(|e| Failure::Io(format!("{}: {e}", c.out.display())))?;
    std::fs::write(c.out.join("effective_config.toml"), cfg.to_toml())?;
    Ok(cfg)
}

fn execute(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::RdCurve(c) => run::rd_curve(&prepare(&c)?, &c.out),
        Command::Theorem2Sweep(c) => run::theorem2_sweep(&prepare(&c)?, &c.out),
        Command::Theorem6Experiment(c) => run::theorem6_experiment(&prepare(&c)?, &c.out),
        Command::CodeBuild { common, n } => {
            let path = run::code_build(&prepare(&common)?, n, &common.out)?;
            println!("{}", path.display());
            Ok(())
        }
        Command::CodeInspect { code, config, seed, budget } => {
            let cfg = config.map(|p| load(&p, seed, budget)).transpose()?;
            print!("{}", run::code_inspect(&code, cfg.as_ref())?);
            Ok(())
        }
        Command::Replot { csv, svg } => {
            let text = std::fs::read_to_string(&csv)
                .map_err(|e| Failure::Config(format!("{}: {e}", csv.display())))?;
            let svg = svg.unwrap_or_else(|| csv.with_extension("svg"));
            std::fs::write(svg, run::replot(&text)?)?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("bdmc: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
