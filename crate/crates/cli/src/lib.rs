//! Experiment driver: config parsing, subcommands, run directories and manifests.

pub mod commands;
pub mod config;
pub mod manifest;
pub mod output;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, ValueEnum};

use crate::manifest::{bytes_digest, config_digest, RunManifest};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("unknown subcommand {0:?}")]
    UnknownSubcommand(String),
    #[error("config error at line {line}: {message}")]
    ConfigParse { line: usize, message: String },
    #[error(transparent)]
    Core(#[from] apcl::Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Simulate,
    Contract,
    Decay,
    Invariant,
    Ndscan,
    Isometry,
    Energy,
    Convergence,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Contract => "contract",
            Command::Decay => "decay",
            Command::Invariant => "invariant",
            Command::Ndscan => "ndscan",
            Command::Isometry => "isometry",
            Command::Energy => "energy",
            Command::Convergence => "convergence",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "apcl", version, about = "Stochastic almost-periodic conservation law laboratory")]
pub struct Cli {
    /// simulate | contract | decay | invariant | ndscan | isometry | energy | convergence
    pub subcommand: String,
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides the noise seed of the config.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value = "runs")]
    pub out: PathBuf,
    /// Worker threads for ensembles (defaults to all cores).
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Write a snapshot every M steps (0: initial and final only).
    #[arg(long)]
    pub stride: Option<usize>,
}

/// Outcome of a completed run.
#[derive(Debug)]
pub struct RunOutcome {
    pub dir: PathBuf,
    pub manifest: RunManifest,
}

pub fn run(cli: &Cli) -> Result<RunOutcome, CliError> {
    let cmd = Command::from_str(&cli.subcommand, false)
        .map_err(|_| CliError::UnknownSubcommand(cli.subcommand.clone()))?;
    let text = fs::read_to_string(&cli.config)?;
    let base = cli.config.parent().unwrap_or(Path::new("."));
    let mut cfg = config::parse_config(&text, base)?;
    if let Some(seed) = cli.seed {
        cfg.solver.seed = seed;
    }
    if let Some(stride) = cli.stride {
        cfg.solver.snapshot_stride = stride;
    }
    let start = unix_now();
    let report = match cli.jobs {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k.max(1))
            .build()
            .map_err(|e| CliError::Io(std::io::Error::other(e)))?
            .install(|| commands::execute(cmd, &cfg))?,
        None => commands::execute(cmd, &cfg)?,
    };

    // the digest covers the config text and the command-line overrides
    let mut keyed = text.clone();
    keyed.push_str(&format!("\n#cli {} seed={:?} stride={:?}\n", cmd.name(), cli.seed, cli.stride));
    let digest = config_digest(&keyed);
    let dir = cli.out.join(&digest[..16]);
    fs::create_dir_all(&dir)?;
    let mut outputs = Vec::new();
    for (name, body) in &report.files {
        let path = dir.join(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(&path, body)?;
        outputs.push((name.clone(), bytes_digest(body)));
    }
    let manifest = RunManifest {
        config_digest: digest,
        version: VERSION,
        subcommand: cmd.name().into(),
        seeds: report.seeds,
        start_unix: start,
        end_unix: unix_now(),
        tasks: report.tasks,
        outputs,
    };
    fs::write(dir.join("manifest.txt"), manifest.to_text())?;
    Ok(RunOutcome { dir, manifest })
}

fn unix_now() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0)
}

/// Parses `args`, runs, reports on stderr and returns the process exit code:
/// 0 when every audit passes, 2 when one fails, 1 on any error.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(out) => {
            for t in out.manifest.tasks.iter().filter(|t| !t.pass) {
                eprintln!("audit failed: {} ({})", t.name, t.detail);
            }
            eprintln!("run directory {}", out.dir.display());
            if out.manifest.passed() {
                0
            } else {
                2
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
