//! Command-line front end: configuration, experiment orchestration and CSV
//! output.

mod config;
mod suite;

use std::path::PathBuf;

use clap::Parser;

pub use config::{
    default_algorithms, parse_config, CliConfig, ConfigError, DeltaSetting, NameList, Overrides,
    RawConfig,
};
pub use suite::{
    format_float, print_table, run_suite, trace_file_name, SuiteError, SuiteReport, SummaryRow,
    SUMMARY_HEADER, TRACE_HEADER,
};

/// Environment variable consulted for the output directory.
pub const OUTPUT_DIR_ENV: &str = "INERTIAL_MANN_OUT";

#[derive(Debug, Parser)]
#[command(
    name = "inertial-mann",
    version,
    about = "Run fixed-point iteration experiments"
)]
pub struct Args {
    /// TOML configuration file; flags override its keys.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// sfp, cfp or weber.
    #[arg(long)]
    pub experiment: Option<String>,
    /// Comma-separated algorithm names.
    #[arg(long = "algo")]
    pub algorithms: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long = "out", env = OUTPUT_DIR_ENV)]
    pub output_dir: Option<PathBuf>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long)]
    pub eta: Option<f64>,
    /// Number of random initial points (cfp, weber).
    #[arg(long)]
    pub repeat: Option<usize>,
    /// Write zeros in the time columns so output is reproducible byte for byte.
    #[arg(long)]
    pub no_timing: bool,
}

impl Args {
    fn as_raw(&self) -> RawConfig {
        RawConfig {
            experiment: self.experiment.clone(),
            algorithms: self.algorithms.clone().map(NameList::Joined),
            seed: self.seed,
            output_dir: self.output_dir.clone(),
            repeat: self.repeat,
            max_iter: self.max_iter,
            tol: self.tol,
            grid: self.grid,
            eta: self.eta,
            timing: self.no_timing.then_some(false),
            ..RawConfig::default()
        }
    }

    /// Reads the config file (if any) and layers the flags on top.
    pub fn resolve(&self) -> Result<CliConfig, ConfigError> {
        let file = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
                    path: path.clone(),
                    source,
                })?;
                RawConfig::parse(&text)?
            }
            None => RawConfig::default(),
        };
        CliConfig::from_raw(file.merge(self.as_raw()))
    }
}
