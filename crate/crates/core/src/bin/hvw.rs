use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hvw_core::workbench::tables::{scan_csv, scan_levi, transport_csv, transport_table};
use hvw_core::workbench::{self, Format, RunConfig};
use hvw_core::Error;

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;

/// Seeded numerical verification of the workbench identities.
#[derive(Debug, Parser)]
#[command(name = "hvw", version)]
struct Cli {
    /// JSON configuration file; flags and HVW_* variables override it.
    #[arg(long, global = true, env = "HVW_CONFIG")]
    config: Option<PathBuf>,
    #[arg(long, global = true, env = "HVW_SEED")]
    seed: Option<u64>,
    /// Bound applied to every upper-bound check.
    #[arg(long, global = true, env = "HVW_TOL")]
    tol: Option<f64>,
    /// Sample count applied to every suite.
    #[arg(long, global = true, env = "HVW_SAMPLES")]
    samples: Option<usize>,
    #[arg(long, global = true, env = "HVW_OUT")]
    out: Option<PathBuf>,
    #[arg(long, global = true, env = "HVW_FORMAT")]
    format: Option<Format>,
    /// Fan sample sweeps out over threads (results are merged in index order).
    #[arg(long, global = true, env = "HVW_PARALLEL")]
    parallel: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run verification suites by name, or `all`.
    Verify {
        #[arg(required = true)]
        suites: Vec<String>,
    },
    /// Tabulate Levi-form degeneracy and critical values over admissible points.
    ScanLevi,
    /// Transport a fibre point along the configured base curves.
    Transport,
}

fn load(cli: &Cli) -> Result<RunConfig, Error> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::from_file(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if cli.tol.is_some() {
        cfg.tol = cli.tol;
    }
    if cli.samples.is_some() {
        cfg.samples = cli.samples;
    }
    if cli.out.is_some() {
        cfg.out = cli.out.clone();
    }
    if let Some(f) = cli.format {
        cfg.format = f;
    }
    cfg.parallel |= cli.parallel;
    if let Command::Verify { suites } = &cli.command {
        cfg.suites = suites.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn emit(cfg: &RunConfig, text: &str) -> Result<(), Error> {
    match &cfg.out {
        Some(p) => Ok(std::fs::write(p, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json<T: serde::Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn verify(cfg: &RunConfig) -> Result<u8, Error> {
    let report = workbench::run(cfg)?;
    let text = match cfg.format {
        Format::Json => json(&report),
        Format::Csv => report.residual_table(),
    };
    emit(cfg, &text)?;
    if cfg.out.is_some() {
        for r in &report.records {
            println!("{} {} residual={:e} tol {}", if r.passed { "PASS" } else { "FAIL" }, r.name, r.residual, r.tolerance);
        }
    }
    eprintln!("{} records, wall time {:.2} s", report.records.len(), report.wall_time_s);
    if report.passed {
        return Ok(0);
    }
    for r in report.failures() {
        match &r.error {
            Some(e) => eprintln!("check failed: {} ({e})", r.name),
            None => eprintln!("check failed: {} residual {:e}, required {}", r.name, r.residual, r.tolerance),
        }
    }
    Ok(EXIT_FAIL)
}

fn scan(cfg: &RunConfig) -> Result<u8, Error> {
    let rows = scan_levi(cfg)?;
    let text = match cfg.format {
        Format::Json => json(&rows),
        Format::Csv => scan_csv(&rows),
    };
    emit(cfg, &text)?;
    let bad: Vec<_> = rows.iter().filter(|r| !r.expected()).collect();
    for r in &bad {
        eprintln!(
            "check failed: scan-levi point {} ({}) degenerate={} detectors_agree={}",
            r.point_id, r.kind, r.degenerate, r.detectors_agree
        );
    }
    Ok(if bad.is_empty() { 0 } else { EXIT_FAIL })
}

fn transport(cfg: &RunConfig) -> Result<u8, Error> {
    match transport_table(cfg)? {
        Ok(rows) => {
            let text = match cfg.format {
                Format::Json => json(&rows),
                Format::Csv => transport_csv(&rows),
            };
            emit(cfg, &text)?;
            Ok(0)
        }
        Err(f) => {
            eprintln!("check failed: transport curve '{}': {}", f.curve, f.message);
            Ok(EXIT_FAIL)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match load(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let result = match cli.command {
        Command::Verify { .. } => verify(&cfg),
        Command::ScanLevi => scan(&cfg),
        Command::Transport => transport(&cfg),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e @ (Error::Usage(_) | Error::Json(_) | Error::Io(_))) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(e) => {
            eprintln!("check failed: {e}");
            ExitCode::from(EXIT_FAIL)
        }
    }
}
