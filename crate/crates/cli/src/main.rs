//! `spiral`: build spiral-stretch maps and run the rotation, distortion,
//! modulus, Hölder and sharpness checks on them.
//!
//! Exit status 0 when every check passes, 1 when a mathematical check
//! fails, 2 for usage, configuration and I/O errors.

mod commands;
mod config;

use clap::{Parser, Subcommand, ValueEnum};
use commands::{Format, Output};
use config::RunConfig;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(version, about = "Spiral-stretch homeomorphisms of finite distortion and their rotation bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON run configuration; omitted fields take their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Seed for every sampled quantity (overrides the config).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory (default: current directory).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Table format where a command offers a choice.
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,

    /// Distortion integrability exponent (overrides the config).
    #[arg(long, global = true)]
    p: Option<f64>,

    /// Number of blocks (overrides the config).
    #[arg(long = "n-blocks", global = true)]
    n_blocks: Option<usize>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Generate a plan, check its constraints and write plan.json and map.json.
    Build,
    /// Unwrapped argument along a ray with the rotation bound alongside.
    RotationProfile,
    /// Closed-form and Monte-Carlo L^p norms of the distortion, and series tests.
    DistortionReport,
    /// Lower and upper modulus bounds at a set of base points.
    ModulusCheck,
    /// Hölder exponent fits for the map, its inverse and the stretch factor.
    HolderFit,
    /// Accumulated rotation at each block radius against the sharpness target.
    Sharpness,
}

#[derive(ValueEnum, Clone, Copy)]
enum FormatArg {
    Csv,
    Json,
}

fn run(cli: &Cli) -> anyhow::Result<bool> {
    let mut cfg = RunConfig::load(cli.config.as_deref())?;
    if let Some(s) = cli.seed {
        cfg.seed = Some(s);
    }
    if let Some(p) = cli.p {
        cfg.p = p;
    }
    if let Some(n) = cli.n_blocks {
        cfg.n_blocks = n;
    }
    cfg.validate()?;
    let out = Output {
        dir: commands::out_dir(cli.out.as_deref()),
        format: cli.format.map(|f| match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }),
    };
    match cli.command {
        Command::Build => commands::build(&cfg, &out),
        Command::RotationProfile => commands::rotation_profile(&cfg, &out),
        Command::DistortionReport => commands::distortion_report(&cfg, &out),
        Command::ModulusCheck => commands::modulus_check(&cfg, &out),
        Command::HolderFit => commands::holder_fit(&cfg, &out),
        Command::Sharpness => commands::sharpness(&cfg, &out),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
