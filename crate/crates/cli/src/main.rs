//! `ustar`: gallery self-tests, the U*(2m) transform, hyperkähler-side checks
//! and holonomy surveys, with JSON/CSV reports.
//!
//! Exit codes: 0 all checks pass, 1 a check failed, 2 usage or config error.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::Flags;
use output::Format;

/// How a command ended when it did not produce a passing report.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags, config, manifest or entry: exit 2.
    Usage(String),
    /// A computation could not be carried out: exit 1.
    Runtime(String),
}

#[derive(Parser)]
#[command(name = "ustar", version, about = "Quaternionic Kähler to U*(2m) geometry toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Inspect the gallery manifest.
    Gallery {
        #[command(subcommand)]
        command: GalleryCommand,
    },
    /// Run an entry's expected-invariant table.
    Verify(VerifyArgs),
    /// Build the torsion-free U*(2m) connection from an entry's Killing field.
    Transform(TransformArgs),
    /// Survey holonomy membership over random loops.
    Holonomy(HolonomyArgs),
    /// Hyperkähler-side checks: flat spaces, Swann bundles, the Calabi quotient.
    Hk(HkArgs),
}

#[derive(Subcommand)]
enum GalleryCommand {
    /// List entries with dimensions, charts and domains.
    List {
        /// Manifest file instead of the bundled gallery.
        #[arg(long)]
        manifest: Option<PathBuf>,
        /// Render an empty gallery.
        #[arg(long)]
        empty: bool,
    },
}

#[derive(Args)]
struct Common {
    /// Gallery entry id.
    #[arg(long)]
    entry: Option<String>,
    /// Number of sample points (default 20).
    #[arg(long)]
    samples: Option<usize>,
    /// Sampling seed (default 0).
    #[arg(long)]
    seed: Option<u64>,
    /// Override every check tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Report format (default json).
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Flat key-value TOML file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Manifest file instead of the bundled gallery.
    #[arg(long)]
    manifest: Option<PathBuf>,
}

impl Common {
    fn flags(&self, check: Vec<String>) -> Flags {
        Flags {
            entry: self.entry.clone(),
            samples: self.samples,
            seed: self.seed,
            tol: self.tol,
            format: self.format,
            out: self.out.clone(),
            check,
            manifest: self.manifest.clone(),
        }
    }
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: Common,
    /// Restrict to checks whose name starts with NAME (repeatable).
    #[arg(long = "check", value_name = "NAME")]
    check: Vec<String>,
}

#[derive(Args)]
struct TransformArgs {
    #[command(flatten)]
    common: Common,
    /// Killing field by the chart it is written in (default: all).
    #[arg(long, value_name = "CHART")]
    killing: Option<String>,
}

#[derive(Args)]
struct HolonomyArgs {
    #[command(flatten)]
    common: Common,
    /// Number of random loops (default 200).
    #[arg(long)]
    loops: Option<usize>,
    #[arg(long, value_enum, default_value = "modified")]
    connection: commands::holonomy::ConnectionKind,
    /// Base point, comma separated (default: centre of the sampling box).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    base: Option<Vec<f64>>,
}

#[derive(Args)]
struct HkArgs {
    #[command(flatten)]
    common: Common,
    /// Quaternionic dimension of the Calabi quotient (entry `calabi`).
    #[arg(long, default_value_t = 1)]
    m: usize,
    /// Level of the Calabi quotient.
    #[arg(long, default_value_t = 1.0)]
    level: f64,
}

fn resolve(common: &Common, check: Vec<String>) -> Result<config::SuiteConfig, Failure> {
    let file = match &common.config {
        Some(p) => config::ConfigFile::load(p)?,
        None => config::ConfigFile::default(),
    };
    config::SuiteConfig::resolve(common.flags(check), file)
}

fn run(cli: Cli) -> Result<bool, Failure> {
    match cli.command {
        Command::Gallery { command: GalleryCommand::List { manifest, empty } } => {
            commands::gallery::list(manifest.as_deref(), empty)
        }
        Command::Verify(a) => commands::verify::run(&resolve(&a.common, a.check.clone())?),
        Command::Transform(a) => commands::transform::run(&resolve(&a.common, Vec::new())?, a.killing.as_deref()),
        Command::Holonomy(a) => {
            commands::holonomy::run(&resolve(&a.common, Vec::new())?, a.loops, a.connection, a.base.as_deref())
        }
        Command::Hk(a) => commands::hk::run(&resolve(&a.common, Vec::new())?, a.m, a.level),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
