//! `cueball`: train, recall and inspect one-shot associative memories.

mod commands;
mod config;
mod error;

use clap::{Args, Parser, Subcommand};
use config::RunConfig;
use cueball_core::imaging::Half;
use error::CliError;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "cueball",
    version,
    about = "Train, recall and inspect cue-ball associative memories"
)]
struct Cli {
    /// Flat key = value config file; command-line flags override it
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Learn every pattern of an image corpus and write both weight files
    Train(ConfigArgs),
    /// Present one stored image (optionally half-hidden) and replay all
    /// images associated with the winning cue
    Recall(ConfigArgs),
    /// Report weight-file provenance and memory accounting
    Inspect(ConfigArgs),
    /// Write the cue-response profile of one presentation as CSV
    ExportProfile(ConfigArgs),
}

#[derive(Args, Default)]
struct ConfigArgs {
    /// IDX image file
    #[arg(long)]
    images: Option<PathBuf>,
    /// IDX label file, validated and reported only; the model is label-free
    #[arg(long)]
    labels: Option<PathBuf>,
    /// Directory holding forward.cueball and backward.cueball
    #[arg(long)]
    weights_dir: Option<PathBuf>,
    /// Directory recall outputs are written into
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Output CSV path for export-profile
    #[arg(long)]
    out: Option<PathBuf>,
    /// Number of recall nets (pattern groups)
    #[arg(long)]
    groups: Option<usize>,
    /// Cue neurons per group
    #[arg(long)]
    cues_per_group: Option<usize>,
    /// Pixels per image
    #[arg(long)]
    pixels: Option<usize>,
    /// Learning target for the cue response
    #[arg(long)]
    theta: Option<f64>,
    /// Cue activation threshold
    #[arg(long)]
    activation_threshold: Option<f64>,
    /// Learning rate for cue-to-recall weights
    #[arg(long)]
    forward_rate: Option<f64>,
    /// Learning rate for recall-to-cue weights
    #[arg(long)]
    backward_rate: Option<f64>,
    /// Winning response required before images are replayed
    #[arg(long)]
    recall_threshold: Option<f64>,
    /// Global number of the pattern to present
    #[arg(long)]
    pattern: Option<usize>,
    /// Group (recall net) the probe is presented to
    #[arg(long)]
    group: Option<usize>,
    /// Hide all but one half of the probe: top, bottom, left or right
    #[arg(long)]
    mask: Option<Half>,
    /// Rescale a masked probe back to unit norm before presenting it
    #[arg(long)]
    renormalize: bool,
    /// Seed for sampling commands (reserved)
    #[arg(long)]
    seed: Option<u64>,
}

impl ConfigArgs {
    fn into_run_config(self) -> RunConfig {
        RunConfig {
            images: self.images,
            labels: self.labels,
            weights_dir: self.weights_dir,
            out_dir: self.out_dir,
            out: self.out,
            groups: self.groups,
            cues_per_group: self.cues_per_group,
            pixels: self.pixels,
            theta: self.theta,
            activation_threshold: self.activation_threshold,
            forward_rate: self.forward_rate,
            backward_rate: self.backward_rate,
            recall_threshold: self.recall_threshold,
            pattern: self.pattern,
            group: self.group,
            mask: self.mask,
            renormalize: self.renormalize,
            seed: self.seed,
        }
    }
}

fn run(cli: Cli) -> Result<i32, CliError> {
    let base = match &cli.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    match cli.command {
        Command::Train(args) => commands::cmd_train(&base.merge(args.into_run_config())),
        Command::Recall(args) => commands::cmd_recall(&base.merge(args.into_run_config())),
        Command::Inspect(args) => commands::cmd_inspect(&base.merge(args.into_run_config())),
        Command::ExportProfile(args) => {
            commands::cmd_export_profile(&base.merge(args.into_run_config()))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
