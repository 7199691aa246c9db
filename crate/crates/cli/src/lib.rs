//! Batch front end: read a TOML analysis config, run it, write JSON and CSV
//! reports.

pub mod config;
pub mod model;
pub mod output;
pub mod run;
pub mod suites;

use std::path::PathBuf;

use clap::Parser;

pub use config::{load_config, parse_config, AnalysisConfig, ConfigError, Format, Issue};
pub use run::{run, RunReport, RUN_REPORT_SCHEMA};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ANALYSIS_ERROR: i32 = 1;
pub const EXIT_CONFIG_ERROR: i32 = 2;

/// Output directory when neither the flag nor the config names one.
pub const DEFAULT_OUT_DIR: &str = "statconv-out";

#[derive(Debug, Parser)]
#[command(
    name = "statconv",
    version,
    about = "Statistical convergence reports from a TOML analysis config"
)]
pub struct Args {
    /// Analysis config (TOML).
    pub config: PathBuf,
    /// Replaces the config-wide horizon.
    #[arg(long)]
    pub horizon: Option<u64>,
    /// Output directory; overrides `output.dir`.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Corpus seed, decimal or 0x-prefixed hex.
    #[arg(long, value_parser = parse_seed)]
    pub seed: Option<u64>,
    /// Omit timing so identical runs give identical JSON.
    #[arg(long)]
    pub canonical: bool,
}

fn parse_seed(s: &str) -> Result<u64, String> {
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    parsed.map_err(|e| format!("invalid seed `{s}`: {e}"))
}

/// Runs the command line and returns the process exit code.
pub fn execute(args: &Args) -> i32 {
    let mut config = match load_config(&args.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("statconv: {e}");
            return EXIT_CONFIG_ERROR;
        }
    };
    if let Some(h) = args.horizon {
        config.horizon = h;
    }
    if let Some(s) = args.seed {
        config.seed = s;
    }
    let issues = config.validate();
    if !issues.is_empty() {
        eprintln!("statconv: {}", ConfigError::Invalid(issues));
        return EXIT_CONFIG_ERROR;
    }

    let report = run(&config);
    for a in &report.analyses {
        match &a.error {
            None => println!("{:<28} {:<24} {}", a.name, a.kind, a.summary),
            Some(e) => println!("{:<28} {:<24} error: {e}", a.name, a.kind),
        }
    }

    let base = args.config.parent().map(PathBuf::from).unwrap_or_default();
    let dir = match (&args.out_dir, &config.output.dir) {
        (Some(d), _) => d.clone(),
        (None, Some(d)) if d.is_relative() => base.join(d),
        (None, Some(d)) => d.clone(),
        (None, None) => PathBuf::from(DEFAULT_OUT_DIR),
    };
    let stem = config
        .output
        .stem
        .clone()
        .or_else(|| args.config.file_stem().map(|s| s.to_string_lossy().into_owned()))
        .unwrap_or_else(|| "report".into());
    let format = args.format.unwrap_or(config.output.format);
    match output::write_outputs(&report, &dir, &stem, format, args.canonical) {
        Ok(paths) => {
            for p in paths {
                println!("wrote {}", p.display());
            }
        }
        Err(e) => {
            eprintln!("statconv: cannot write outputs to {}: {e}", dir.display());
            return EXIT_ANALYSIS_ERROR;
        }
    }
    if report.has_errors() {
        EXIT_ANALYSIS_ERROR
    } else {
        EXIT_OK
    }
}
