//! Command-line driver: parses a JSON config, runs one command and writes
//! `report.json`, `table.csv` and, when requested, `field.dump`.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use besov_core::config::{ExperimentConfig, Kind, SelftestConfig};
use besov_core::operators::{rate_experiment, verify_domain};
use besov_core::selftest;
use clap::{Parser, Subcommand};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("cannot read `{path}`: {source}")]
    Read { path: PathBuf, source: io::Error },
    #[error("cannot write `{path}`: {source}")]
    Write { path: PathBuf, source: io::Error },
    #[error(transparent)]
    Core(#[from] besov_core::Error),
}

#[derive(Debug, Parser)]
#[command(name = "besov", version, about = "Multiscale spline approximation experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the invariant suite.
    Selftest(Args),
    /// Probe the regularity of the configured domain.
    VerifyDomain(Args),
    /// Approximation rate of the quasi-interpolant.
    RatesApprox(Args),
    /// Sampling recovery rate.
    RatesRecovery(Args),
    /// Derivative approximation tradeoff.
    Stechkin(Args),
    /// Extension residual and norm stability.
    Extend(Args),
}

impl Command {
    pub fn args(&self) -> &Args {
        match self {
            Command::Selftest(a)
            | Command::VerifyDomain(a)
            | Command::RatesApprox(a)
            | Command::RatesRecovery(a)
            | Command::Stechkin(a)
            | Command::Extend(a) => a,
        }
    }
}

#[derive(Debug, clap::Args)]
pub struct Args {
    /// JSON config file.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory, created if missing.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Overrides the seed from the config.
    #[arg(long)]
    pub seed: Option<u64>,
}

/// Rendered outputs of one command.
#[derive(Clone, Debug)]
pub struct Artifacts {
    pub passed: bool,
    pub summary: Vec<String>,
    pub report: String,
    pub table: String,
    pub field: Option<String>,
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Read { path: path.to_path_buf(), source })
}

fn experiment_config(args: &Args) -> Result<ExperimentConfig, CliError> {
    let mut cfg = ExperimentConfig::from_json(&read(&args.config)?)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn line(passed: bool, name: &str, detail: &str) -> String {
    format!("[{}] {name}: {detail}", if passed { "PASS" } else { "FAIL" })
}

/// Runs a command without touching the filesystem beyond reading the config.
pub fn execute(command: &Command) -> Result<Artifacts, CliError> {
    let args = command.args();
    let kind = match command {
        Command::Selftest(_) => {
            let mut cfg = SelftestConfig::from_json(&read(&args.config)?)?;
            if let Some(seed) = args.seed {
                cfg.seed = seed;
            }
            let report = selftest::run(cfg.seed)?;
            return Ok(Artifacts {
                passed: report.passed,
                summary: report
                    .checks
                    .iter()
                    .map(|c| line(c.passed, &c.name, &format!("{:.3e} (bound {:.1e})", c.value, c.bound)))
                    .collect(),
                report: report.to_json(),
                table: report.to_csv()?,
                field: None,
            });
        }
        Command::VerifyDomain(_) => {
            let report = verify_domain(&experiment_config(args)?)?;
            return Ok(Artifacts {
                passed: report.passed,
                summary: report.checks.iter().map(|c| line(c.passed, &c.name, &c.detail)).collect(),
                report: report.to_json(),
                table: report.to_csv()?,
                field: None,
            });
        }
        Command::RatesApprox(_) => Kind::Approx,
        Command::RatesRecovery(_) => Kind::Recovery,
        Command::Stechkin(_) => Kind::Stechkin,
        Command::Extend(_) => Kind::Extension,
    };
    let report = rate_experiment(kind, &experiment_config(args)?)?;
    Ok(Artifacts {
        passed: report.passed,
        summary: report.checks.iter().map(|c| line(c.passed, &c.name, &c.detail)).collect(),
        report: report.to_json(),
        table: report.to_csv()?,
        field: report.field_dump.clone(),
    })
}

/// Writes `contents` to `dir/name` through a temporary file and a rename.
pub fn write_atomic(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    let target = dir.join(name);
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    let err = |source| CliError::Write { path: target.clone(), source };
    fs::write(&tmp, contents).map_err(err)?;
    fs::rename(&tmp, &target).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        err(e)
    })
}

/// Runs a command and writes its artifacts; returns whether every check passed.
pub fn run(command: &Command) -> Result<bool, CliError> {
    let out = &command.args().out;
    let artifacts = execute(command)?;
    fs::create_dir_all(out).map_err(|source| CliError::Write { path: out.clone(), source })?;
    write_atomic(out, "report.json", &artifacts.report)?;
    write_atomic(out, "table.csv", &artifacts.table)?;
    if let Some(field) = &artifacts.field {
        write_atomic(out, "field.dump", field)?;
    }
    for l in &artifacts.summary {
        println!("{l}");
    }
    println!("{}", if artifacts.passed { "passed" } else { "FAILED" });
    Ok(artifacts.passed)
}
