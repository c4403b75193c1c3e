//! Command-line front end: config ingestion, experiment runs, self-checks and
//! parameter sweeps.
//!
//! Exit codes are 0 on success, 1 when a check or a numerical guard fails,
//! and 2 when the configuration is invalid.

pub mod config;
pub mod sweep;
pub mod verify;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use globalpulse::error::Error;
use globalpulse::simulator::{compare_decay, run_experiment, RateComparison};
use serde_json::json;
use thiserror::Error;

use crate::config::ConfigDocument;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("{}: {source}", guard_name(source))]
    Core {
        #[from]
        source: Error,
    },
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("{0} check(s) failed")]
    Failed(usize),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Core { source } if is_config_error(source) => 2,
            _ => 1,
        }
    }
}

fn is_config_error(e: &Error) -> bool {
    matches!(
        e,
        Error::SiteOutOfRange { .. }
            | Error::RegisterSize(_)
            | Error::InvalidDuration(_)
            | Error::InvalidAngle(_)
            | Error::InvalidRegister(_)
            | Error::InvalidParameters(_)
    )
}

/// Short name of the check that raised `e`.
fn guard_name(e: &Error) -> &'static str {
    match e {
        Error::LogBranch { .. } => "log-branch guard",
        Error::NoConvergence => "eigensolver guard",
        Error::NotHermitian { .. } => "hermiticity guard",
        Error::NotUnitary { .. } => "unitarity guard",
        Error::NotNormalized { .. } => "normalization guard",
        Error::DegenerateFit(_) => "fit-window guard",
        Error::TraceIo(_) => "trace i/o",
        Error::Unreachable { .. } | Error::NotCyclic | Error::NonCliffordPulse(_) => "compiler guard",
        Error::DimensionMismatch { .. } | Error::EmptySchedule | Error::InvalidSchedule(_) => "schedule guard",
        _ => "config",
    }
}

#[derive(Debug, Parser)]
#[command(name = "globalpulse", version, about = "Decoupling of Ising couplings by global pulses")]
pub struct Cli {
    /// JSON configuration; defaults reproduce the four-spin demonstration.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Override one config field, e.g. `--set pulse.theta=0.02`. Repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    /// Noise seed, overriding `noise.seed`.
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
    /// Output directory, overriding `output.dir`.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the free and decoupled ensembles, write both traces and a summary.
    Simulate,
    /// Check closed forms and the compiler against exact numerics.
    Verify {
        #[arg(value_enum, default_value = "all")]
        suite: verify::Suite,
    },
    /// Residual coupling and decay-rate ratio over one parameter.
    Sweep {
        #[arg(value_enum)]
        parameter: sweep::Parameter,
        /// Comma-separated parameter values.
        #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
        values: Vec<f64>,
        /// Skip the ensemble runs and leave the ratio column empty.
        #[arg(long)]
        no_simulate: bool,
    },
    /// Print the effective configuration as JSON.
    Config,
}

pub fn load_config(cli: &Cli) -> Result<ConfigDocument, CliError> {
    let mut doc = config::load(cli.config.as_deref(), &cli.overrides)?;
    if let Some(seed) = cli.seed {
        doc.noise.seed = seed;
    }
    if let Some(out) = &cli.out {
        doc.output.dir = out.clone();
    }
    Ok(doc)
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Verify { suite } => {
            let checks = verify::run(*suite)?;
            print!("{}", verify::table(&checks));
            match checks.iter().filter(|c| !c.passed()).count() {
                0 => Ok(()),
                n => Err(CliError::Failed(n)),
            }
        }
        Command::Config => {
            println!("{}", load_config(cli)?.to_json_pretty());
            Ok(())
        }
        Command::Simulate => simulate(&load_config(cli)?),
        Command::Sweep {
            parameter,
            values,
            no_simulate,
        } => {
            let doc = load_config(cli)?;
            let rows = sweep::run(&doc, *parameter, values, !no_simulate)?;
            let path = doc.output_path(&format!("sweep_{}.csv", parameter.column()));
            let mut buf = Vec::new();
            sweep::write_csv(&mut buf, *parameter, &rows).expect("writing to memory");
            write_file(&path, &buf)?;
            std::io::stdout().write_all(&buf).map_err(|e| io_error(Path::new("<stdout>"), e))
        }
    }
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    }
    fs::write(path, bytes).map_err(|e| io_error(path, e))
}

fn gnuplot_script(doc: &ConfigDocument) -> String {
    format!(
        "set datafile separator \",\"\n\
         set xlabel \"time (s)\"\n\
         set ylabel \"fidelity\"\n\
         set yrange [0:1.05]\n\
         plot \"{}\" every ::1 using 1:2 with lines title \"free\", \\\n     \
         \"{}\" every ::1 using 1:2 with lines title \"decoupled\"\n",
        doc.output.free, doc.output.decoupled
    )
}

/// Writes both traces before fitting, so a failed fit still leaves data.
pub fn simulate(doc: &ConfigDocument) -> Result<(), CliError> {
    let config = doc.experiment()?;
    let warnings: Vec<String> = config.warnings().iter().map(ToString::to_string).collect();
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    let result = run_experiment(&config)?;
    for (trace, name) in [(&result.decoupled, &doc.output.decoupled), (&result.free, &doc.output.free)] {
        let mut buf = Vec::new();
        trace.write_csv(&mut buf)?;
        write_file(&doc.output_path(name), &buf)?;
    }
    if let Some(name) = &doc.output.gnuplot {
        write_file(&doc.output_path(name), gnuplot_script(doc).as_bytes())?;
    }
    let cmp = compare_decay(&result.free, &result.decoupled, doc.experiment.fit_floor);
    let summary = summary(doc, &warnings, &cmp);
    let text = serde_json::to_string_pretty(&summary).expect("summaries serialize") + "\n";
    write_file(&doc.output_path(&doc.output.summary), text.as_bytes())?;
    let cmp = cmp?;
    println!(
        "free {:.4} /s, decoupled {:.4} /s, ratio {:.2} ({:?} model)",
        cmp.free_rate, cmp.decoupled_rate, cmp.ratio, cmp.model
    );
    Ok(())
}

fn summary(doc: &ConfigDocument, warnings: &[String], cmp: &Result<RateComparison, Error>) -> serde_json::Value {
    let mut s = json!({
        "version": env!("CARGO_PKG_VERSION"),
        "seed": doc.noise.seed,
        "warnings": warnings,
        "config": doc,
    });
    match cmp {
        Ok(c) => {
            s["model"] = json!(c.model);
            s["free_rate_per_s"] = json!(c.free_rate);
            s["decoupled_rate_per_s"] = json!(c.decoupled_rate);
            s["ratio"] = json!(c.ratio);
            s["free_fit"] = json!(c.free);
            s["decoupled_fit"] = json!(c.decoupled);
        }
        Err(e) => s["error"] = json!(e.to_string()),
    }
    s
}
