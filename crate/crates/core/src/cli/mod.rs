//! Command-line front end: `rates`, `sweep`, `reproduce`.
//!
//! Exit codes: 0 success, 1 a channel or quadrature failure (or a table
//! cell outside tolerance), 2 usage or configuration error.

pub mod config;
pub mod output;
pub mod reference;

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::report::{sweep, Channel, CoherenceReport, ReportOptions, SweepContext};
use config::{ConfigError, ConfigFile, Format, Kernel, Overrides, RunConfig};
use output::{format_sig9, render_table, report_table, rows_table, write_csv, Row};
use reference::{relative_error, ReferenceTable, REPRODUCTION_TOLERANCE};

/// Relative output paths are resolved against this directory when set.
pub const OUTPUT_DIR_ENV: &str = "NEON_COHERENCE_OUTPUT_DIR";

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "neon-coherence",
    version,
    about = "T1/T2 budget of an electron qubit on solid neon"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Channel rates at a single frequency.
    Rates(RatesArgs),
    /// Rates over an evenly spaced frequency grid.
    Sweep(SweepArgs),
    /// Compare against a published lifetime table (1: displacement, 2: modulation).
    Reproduce(ReproduceArgs),
}

#[derive(Args, Debug, Clone, Default)]
pub struct Common {
    /// Flat `key = value` configuration file; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// e.g. `g=5MHz,kappa=0.5MHz,detuning=500MHz` or `g=5MHz,kappa=0.5MHz,fr=5.9GHz`
    #[arg(long)]
    pub cavity: Option<String>,
    #[arg(long, value_enum)]
    pub kernel: Option<Kernel>,
    /// Relative tolerance of the outer integrals.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub temperature_mk: Option<f64>,
    /// Host material preset.
    #[arg(long)]
    pub material: Option<String>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct RatesArgs {
    #[arg(long)]
    pub f0_ghz: Option<f64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// GHz
    #[arg(long)]
    pub from: Option<f64>,
    /// GHz
    #[arg(long)]
    pub to: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct ReproduceArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub table: u8,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Usage(_) => EXIT_USAGE,
            CliError::Io(_) => EXIT_FAILURE,
        }
    }
}

fn load(common: &Common, mut flags: Overrides) -> Result<RunConfig, CliError> {
    let file = match &common.config {
        None => ConfigFile::default(),
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
            ConfigFile::parse(&path.display().to_string(), &text)?
        }
    };
    flags.temperature_mk = common.temperature_mk;
    flags.material = common.material.clone();
    flags.cavity = common.cavity.clone();
    flags.kernel = common.kernel;
    flags.tol = common.tol;
    flags.format = common.format;
    flags.output = common.output.clone();
    Ok(RunConfig::resolve(&file, &flags)?)
}

fn options(config: &RunConfig, channels: Vec<Channel>) -> ReportOptions {
    ReportOptions {
        channels,
        kernel: config.kernel,
        spec: config.spec(),
        ..ReportOptions::default()
    }
}

fn context(config: &RunConfig) -> SweepContext {
    SweepContext {
        temperature: config.temperature,
        material: config.material.clone(),
        pressing_field: config.pressing_field,
        cavity: config.cavity,
    }
}

fn output_path(path: &Path) -> PathBuf {
    match std::env::var_os(OUTPUT_DIR_ENV) {
        Some(dir) if path.is_relative() => PathBuf::from(dir).join(path),
        _ => path.to_path_buf(),
    }
}

fn emit(config: &RunConfig, bytes: &[u8]) -> Result<(), CliError> {
    match &config.output {
        None => io::stdout()
            .write_all(bytes)
            .map_err(|e| CliError::Io(format!("stdout: {e}"))),
        Some(p) => {
            let p = output_path(p);
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
            }
            fs::write(&p, bytes).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))
        }
    }
}

fn json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s.into_bytes()
}

fn csv_bytes(rows: &[Row], cavity: bool) -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    write_csv(&mut buf, rows, cavity).map_err(|e| CliError::Io(e.to_string()))?;
    Ok(buf)
}

#[derive(Serialize)]
struct RatesDocument<'a> {
    #[serde(flatten)]
    row: Row,
    report: &'a CoherenceReport,
}

#[derive(Serialize)]
struct PointFailure {
    f0_ghz: f64,
    error: String,
}

#[derive(Serialize)]
struct SweepDocument<'a> {
    rows: Vec<Row>,
    reports: Vec<&'a CoherenceReport>,
    failures: Vec<PointFailure>,
}

fn cmd_rates(args: &RatesArgs) -> Result<i32, CliError> {
    let flags = Overrides {
        f0_ghz: args.f0_ghz,
        ..Overrides::default()
    };
    let config = load(&args.common, flags)?;
    if config.sweep.is_some() {
        return Err(CliError::Usage(
            "`rates` takes a single --f0-ghz, not a sweep range".into(),
        ));
    }
    let f0 = config
        .f0_ghz
        .ok_or_else(|| CliError::Usage("missing --f0-ghz (or f0_ghz in the config file)".into()))?;
    let report = context(&config)
        .report_at(f0, &options(&config, Channel::ALL.to_vec()))
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let cavity = config.cavity.is_some();
    let bytes = match config.format {
        Format::Json => json_bytes(&RatesDocument {
            row: Row::from_report(&report),
            report: &report,
        }),
        Format::Csv => csv_bytes(&[Row::from_report(&report)], cavity)?,
        Format::Table => report_table(&report).into_bytes(),
    };
    emit(&config, &bytes)?;
    for f in &report.failures {
        eprintln!("{}: {}", f.channel, f.error);
    }
    Ok(if report.is_complete() { EXIT_OK } else { EXIT_FAILURE })
}

fn cmd_sweep(args: &SweepArgs) -> Result<i32, CliError> {
    let flags = Overrides {
        sweep_from: args.from,
        sweep_to: args.to,
        sweep_points: args.points,
        ..Overrides::default()
    };
    let config = load(&args.common, flags)?;
    let range = config
        .sweep
        .ok_or_else(|| CliError::Usage("sweep needs --from, --to and --points".into()))?;
    let freqs = range.frequencies();
    let results = sweep(&freqs, &context(&config), &options(&config, Channel::ALL.to_vec()))
        .map_err(|e| CliError::Usage(e.to_string()))?;

    let mut reports = Vec::new();
    let mut failures = Vec::new();
    let mut ok = true;
    for (f, r) in freqs.iter().zip(&results) {
        match r {
            Ok(rep) => {
                ok &= rep.is_complete();
                for c in &rep.failures {
                    eprintln!("{f} GHz: {}: {}", c.channel, c.error);
                }
                reports.push(rep);
            }
            Err(e) => {
                ok = false;
                eprintln!("{f} GHz: {e}");
                failures.push(PointFailure {
                    f0_ghz: *f,
                    error: e.to_string(),
                });
            }
        }
    }
    let rows: Vec<Row> = reports.iter().map(|r| Row::from_report(r)).collect();
    let cavity = config.cavity.is_some();
    let bytes = match config.format {
        Format::Json => json_bytes(&SweepDocument {
            rows,
            reports,
            failures,
        }),
        Format::Csv => csv_bytes(&rows, cavity)?,
        Format::Table => rows_table(&rows, cavity).into_bytes(),
    };
    emit(&config, &bytes)?;
    Ok(if ok { EXIT_OK } else { EXIT_FAILURE })
}

/// One compared cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub f0_ghz: f64,
    pub quantity: &'static str,
    pub computed: Option<f64>,
    pub reference: f64,
    pub relative_error: Option<f64>,
    pub within_tolerance: bool,
}

/// Evaluate one channel on the table's frequencies and compare T1 and T2 cell by cell.
pub fn compare_table(
    table: &ReferenceTable,
    context: &SweepContext,
    options: &ReportOptions,
) -> crate::Result<Vec<Comparison>> {
    let freqs: Vec<f64> = table.rows.iter().map(|r| r.f0_ghz).collect();
    let options = ReportOptions {
        channels: vec![table.channel],
        ..options.clone()
    };
    let results = sweep(&freqs, context, &options)?;
    let mut out = Vec::new();
    for (row, result) in table.rows.iter().zip(results) {
        let rate = result.ok().and_then(|r| r.channel(table.channel).cloned());
        for (quantity, computed, reference) in [
            ("t1", rate.as_ref().map(|c| c.t1), row.t1),
            ("t2", rate.as_ref().map(|c| c.t2), row.t2),
        ] {
            let rel = computed.map(|c| relative_error(c, reference));
            out.push(Comparison {
                f0_ghz: row.f0_ghz,
                quantity,
                computed,
                reference,
                relative_error: rel,
                within_tolerance: rel.is_some_and(|e| e.abs() <= REPRODUCTION_TOLERANCE),
            });
        }
    }
    Ok(out)
}

fn cmd_reproduce(args: &ReproduceArgs) -> Result<i32, CliError> {
    let config = load(&args.common, Overrides::default())?;
    let table = reference::table(args.table).ok_or_else(|| CliError::Usage(format!("unknown table {}", args.table)))?;
    let ctx = SweepContext {
        cavity: None,
        ..context(&config)
    };
    let cells = compare_table(table, &ctx, &options(&config, vec![table.channel]))
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let passed = cells.iter().filter(|c| c.within_tolerance).count();
    let bytes = match config.format {
        Format::Json => json_bytes(&serde_json::json!({
            "table": table.id,
            "channel": table.channel,
            "tolerance": REPRODUCTION_TOLERANCE,
            "cells": cells,
            "passed": passed,
            "total": cells.len(),
        })),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let mut write = || -> csv::Result<()> {
                w.write_record([
                    "f0_ghz",
                    "quantity",
                    "computed",
                    "reference",
                    "relative_error",
                    "within_tolerance",
                ])?;
                for c in &cells {
                    w.write_record([
                        output::format_float(c.f0_ghz),
                        c.quantity.to_string(),
                        c.computed.map(output::format_float).unwrap_or_default(),
                        output::format_float(c.reference),
                        c.relative_error.map(output::format_float).unwrap_or_default(),
                        c.within_tolerance.to_string(),
                    ])?;
                }
                w.flush()?;
                Ok(())
            };
            write().map_err(|e| CliError::Io(e.to_string()))?;
            w.into_inner().map_err(|e| CliError::Io(e.to_string()))?
        }
        Format::Table => {
            let header: Vec<String> = ["f0_ghz", "quantity", "computed_s", "reference_s", "rel_err", "status"]
                .into_iter()
                .map(String::from)
                .collect();
            let body: Vec<Vec<String>> = cells
                .iter()
                .map(|c| {
                    vec![
                        format!("{}", c.f0_ghz),
                        c.quantity.into(),
                        c.computed.map(format_sig9).unwrap_or_else(|| "failed".into()),
                        format!("{}", c.reference),
                        c.relative_error
                            .map(|e| format!("{:+.2}%", 100.0 * e))
                            .unwrap_or_else(|| "-".into()),
                        if c.within_tolerance { "ok" } else { "OUT" }.into(),
                    ]
                })
                .collect();
            let mut s = format!("table {}: {}\n", table.id, table.title);
            s.push_str(&render_table(&header, &body));
            s.push_str(&format!(
                "{passed}/{} cells within {}%\n",
                cells.len(),
                100.0 * REPRODUCTION_TOLERANCE
            ));
            s.into_bytes()
        }
    };
    emit(&config, &bytes)?;
    Ok(if passed == cells.len() { EXIT_OK } else { EXIT_FAILURE })
}

/// Parse `args` (including the program name) and run; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = match &cli.command {
        Command::Rates(a) => cmd_rates(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Reproduce(a) => cmd_reproduce(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if e.exit_code() == EXIT_USAGE {
                eprintln!("run with --help for usage");
            }
            e.exit_code()
        }
    }
}
