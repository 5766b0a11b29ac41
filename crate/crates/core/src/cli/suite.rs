use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use thiserror::Error;

use super::config::{CliConfig, ConfigError};
use crate::algorithms::{Algorithm, IterationTrace, TerminalReason};

#[derive(Debug, Error)]
pub enum SuiteError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("run {algorithm}/{case}: {source}")]
    Run {
        algorithm: Algorithm,
        case: String,
        source: crate::error::Error,
    },
    #[error("writing {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub algorithm: Algorithm,
    pub case: String,
    pub iterations: usize,
    pub time_s: f64,
    pub terminal_reason: TerminalReason,
    pub final_error: f64,
}

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub rows: Vec<SummaryRow>,
    pub trace_files: Vec<PathBuf>,
    pub summary_file: PathBuf,
}

impl SuiteReport {
    /// Zero iff every run stopped on tolerance or the iteration cap.
    pub fn exit_code(&self) -> i32 {
        let clean = self.rows.iter().all(|r| {
            matches!(
                r.terminal_reason,
                TerminalReason::ToleranceMet | TerminalReason::MaxIterations
            )
        });
        if clean {
            0
        } else {
            2
        }
    }
}

/// Scientific notation with 17 significant digits, enough to round-trip.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

pub const TRACE_HEADER: [&str; 4] = ["n", "E_n", "delta_n", "elapsed_s"];
pub const SUMMARY_HEADER: [&str; 7] = [
    "algorithm",
    "case",
    "iterations",
    "time_s",
    "terminal_reason",
    "final_error",
    "seed",
];

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> SuiteError + '_ {
    move |source| SuiteError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> SuiteError + '_ {
    move |e| SuiteError::Io {
        path: path.to_path_buf(),
        source: e.into(),
    }
}

pub fn trace_file_name(algorithm: Algorithm, case: &str) -> String {
    format!("{algorithm}_{case}.csv")
}

fn write_trace(path: &Path, trace: &IterationTrace, timing: bool) -> Result<(), SuiteError> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    w.write_record(TRACE_HEADER).map_err(csv_err(path))?;
    for r in &trace.records {
        let elapsed = if timing { r.elapsed_seconds } else { 0.0 };
        w.write_record([
            r.n.to_string(),
            format_float(r.error),
            format_float(r.delta),
            format_float(elapsed),
        ])
        .map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

fn write_summary(path: &Path, rows: &[SummaryRow], seed: u64) -> Result<(), SuiteError> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    w.write_record(SUMMARY_HEADER).map_err(csv_err(path))?;
    for r in rows {
        w.write_record([
            r.algorithm.to_string(),
            r.case.clone(),
            r.iterations.to_string(),
            format_float(r.time_s),
            r.terminal_reason.to_string(),
            format_float(r.final_error),
            seed.to_string(),
        ])
        .map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

/// Runs every (algorithm, case) pair of the configured experiment, writing
/// one trace CSV per run and a `summary.csv` into the output directory.
pub fn run_suite(config: &CliConfig) -> Result<SuiteReport, SuiteError> {
    let spec = config.build_experiment()?;
    let out = &config.output_dir;
    fs::create_dir_all(out).map_err(io_err(out))?;

    let jobs: Vec<_> = config
        .algorithms
        .iter()
        .flat_map(|&a| spec.initial_cases.iter().map(move |c| (a, c)))
        .collect();

    let results: Vec<(SummaryRow, PathBuf)> = jobs
        .par_iter()
        .map(|&(algorithm, case)| {
            let trace = spec
                .run_case(algorithm, case)
                .map_err(|source| SuiteError::Run {
                    algorithm,
                    case: case.name.clone(),
                    source,
                })?;
            let path = out.join(trace_file_name(algorithm, &case.name));
            write_trace(&path, &trace, config.timing)?;
            log::info!(
                "{algorithm} {}: {} iterations, E = {:e}, {}",
                case.name,
                trace.iterations(),
                trace.final_error(),
                trace.terminal_reason
            );
            let row = SummaryRow {
                algorithm,
                case: case.name.clone(),
                iterations: trace.iterations(),
                time_s: if config.timing {
                    trace.elapsed_seconds()
                } else {
                    0.0
                },
                terminal_reason: trace.terminal_reason,
                final_error: trace.final_error(),
            };
            Ok((row, path))
        })
        .collect::<Result<_, SuiteError>>()?;

    let (rows, trace_files): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    let summary_file = out.join("summary.csv");
    write_summary(&summary_file, &rows, config.seed)?;
    Ok(SuiteReport {
        rows,
        trace_files,
        summary_file,
    })
}

/// Human-readable table of a suite's summary rows.
pub fn print_table(rows: &[SummaryRow], mut out: impl Write) -> std::io::Result<()> {
    writeln!(
        out,
        "{:<14} {:<8} {:>6} {:>10} {:>14}  reason",
        "algorithm", "case", "iter", "time(s)", "E_final"
    )?;
    for r in rows {
        writeln!(
            out,
            "{:<14} {:<8} {:>6} {:>10.4} {:>14.6e}  {}",
            r.algorithm.as_str(),
            r.case,
            r.iterations,
            r.time_s,
            r.final_error,
            r.terminal_reason
        )?;
    }
    Ok(())
}
