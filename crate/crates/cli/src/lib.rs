//! Command-line front end for the grating solvers.
//!
//! Every subcommand reads a TOML [`config::RunConfig`] and writes one
//! artifact: a CSV or JSON table, or the selftest report. A one-line
//! summary goes to standard error.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rayon::prelude::*;

pub mod commands;
pub mod config;
pub mod selftest;
pub mod table;

use config::{Format, RunConfig, DEFAULT_CONFIG};

/// Failure classes, each with its own exit status.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Unreadable, malformed or physically invalid configuration.
    Config(String),
    /// A solver or evaluator error, carried verbatim.
    Numerical(String),
    /// Failure to write an artifact.
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Numerical(m) => write!(f, "{m}"),
            CliError::Io(m) => write!(f, "output error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<grating_core::Error> for CliError {
    fn from(e: grating_core::Error) -> Self {
        CliError::Numerical(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "grating",
    version,
    about = "Scattering by a grating of dielectric cylinders at oblique incidence"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Configuration file; repeat to run a sweep. Defaults to the shipped configuration.
    #[arg(long, global = true)]
    pub config: Vec<PathBuf>,

    /// Output file, or a directory when several configurations are given. Defaults to stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Output format; overrides `output.format`.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Worker threads.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Lattice sums by every available method.
    Sums,
    /// Coefficients from the exact system.
    CoeffsExact,
    /// Wavelength-independent coefficients and their reconstruction.
    CoeffsAsymptotic,
    /// Exact against asymptotic coefficients with relative errors.
    Compare {
        /// Rebuild the table from an earlier JSON output instead of solving.
        #[arg(long)]
        from_json: Option<PathBuf>,
    },
    /// Exterior axial fields on the `[grid]` of the configuration.
    FieldGrid,
    /// Invariant checks at the configured parameters.
    Selftest,
}

/// Artifact text plus a one-line summary.
struct Artifact {
    text: String,
    summary: String,
    /// Raised after the artifact is written.
    failure: Option<CliError>,
}

impl Artifact {
    fn finish(self, target: Option<&Path>) -> Result<String, CliError> {
        write_artifact(&self.text, target)?;
        match self.failure {
            Some(e) => Err(e),
            None => Ok(self.summary),
        }
    }
}

fn produce(command: &Command, cfg: &RunConfig, format: Format) -> Result<Artifact, CliError> {
    let (table, summary) = match command {
        Command::Sums => commands::sums(cfg)?,
        Command::CoeffsExact => commands::coeffs_exact(cfg)?,
        Command::CoeffsAsymptotic => commands::coeffs_asymptotic(cfg)?,
        Command::Compare { .. } => commands::compare(cfg)?,
        Command::FieldGrid => commands::field_grid_table(cfg)?,
        Command::Selftest => {
            let checks = selftest::run(cfg)?;
            let text = selftest::render(&checks, format)?;
            let failed: Vec<&str> = checks
                .iter()
                .filter(|c| c.status == selftest::Status::Fail)
                .map(|c| c.property)
                .collect();
            let failure =
                (!failed.is_empty()).then(|| CliError::Numerical(format!("selftest failed: {}", failed.join(", "))));
            let summary = format!("selftest: {} properties checked, none failed", checks.len());
            return Ok(Artifact { text, summary, failure });
        }
    };
    Ok(Artifact {
        text: table.render(format)?,
        summary,
        failure: None,
    })
}

fn write_artifact(text: &str, target: Option<&Path>) -> Result<(), CliError> {
    match target {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => {
            use std::io::Write;
            std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| CliError::Io(e.to_string()))
        }
    }
}

/// Output target of one configuration within a sweep.
fn sweep_target(cli: &Cli, path: &Path, cfg: &RunConfig, format: Format) -> Result<PathBuf, CliError> {
    if let Some(dir) = &cli.out {
        let stem = path
            .file_stem()
            .ok_or_else(|| CliError::Config(format!("{} has no file name", path.display())))?;
        return Ok(dir.join(stem).with_extension(format.extension()));
    }
    cfg.output.path.clone().ok_or_else(|| {
        CliError::Config(format!(
            "{}: output.path is required in a sweep without --out",
            path.display()
        ))
    })
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(CliError::Config("--jobs must be at least 1".into()));
        }
        // Ignore a pool that is already set up (repeated calls in one process).
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global();
    }

    if let Command::Compare { from_json: Some(path) } = &cli.command {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let (table, summary) = commands::compare_from_json(&text)?;
        let format = cli.format.unwrap_or_default();
        write_artifact(&table.render(format)?, cli.out.as_deref())?;
        eprintln!("{summary}");
        return Ok(());
    }

    if cli.config.len() <= 1 {
        let cfg = match cli.config.first() {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::parse(DEFAULT_CONFIG)?,
        };
        let format = cli.format.unwrap_or(cfg.output.format);
        let target = cli.out.clone().or_else(|| cfg.output.path.clone());
        let summary = produce(&cli.command, &cfg, format)?.finish(target.as_deref())?;
        eprintln!("{summary}");
        return Ok(());
    }

    let configs = cli
        .config
        .iter()
        .map(|path| RunConfig::load(path).map(|cfg| (path, cfg)))
        .collect::<Result<Vec<_>, _>>()?;
    let mut jobs = Vec::with_capacity(configs.len());
    for (path, cfg) in configs {
        let format = cli.format.unwrap_or(cfg.output.format);
        let target = sweep_target(cli, path, &cfg, format)?;
        if jobs.iter().any(|(_, _, _, t)| *t == target) {
            return Err(CliError::Config(format!(
                "two sweep entries write to {}",
                target.display()
            )));
        }
        jobs.push((path, cfg, format, target));
    }
    let outcomes: Vec<Result<String, CliError>> = jobs
        .par_iter()
        .map(|(path, cfg, format, target)| {
            let summary = produce(&cli.command, cfg, *format)
                .and_then(|a| a.finish(Some(target)))
                .map_err(|e| match e {
                    CliError::Numerical(m) => CliError::Numerical(format!("{}: {m}", path.display())),
                    other => other,
                })?;
            Ok(format!("{}: {summary}", path.display()))
        })
        .collect();
    let mut first_error = None;
    for outcome in outcomes {
        match outcome {
            Ok(summary) => eprintln!("{summary}"),
            Err(e) => {
                eprintln!("error: {e}");
                first_error.get_or_insert(e);
            }
        }
    }
    first_error.map_or(Ok(()), Err)
}
