use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use last_sphere::complexity::exponent_table_csv;
use last_sphere::harness::{results_csv, run_sweep, tail_csv, write_string, ExperimentConfig};
use last_sphere::validate::run_all;

#[derive(Parser)]
#[command(name = "lastsd", version, about = "Sphere-decoding complexity experiments for LAST-coded MIMO channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte-Carlo SNR sweep.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Aggregate results CSV.
        #[arg(long)]
        out: PathBuf,
        /// Optional complexity-tail CSV.
        #[arg(long)]
        tail: Option<PathBuf>,
    },
    /// Print the closed-form exponent table as CSV.
    Analyze {
        /// Systems as M,N,T triples.
        #[arg(long = "system", value_parser = parse_system, default_values = ["2,2,3", "3,3,5"])]
        systems: Vec<(usize, usize, usize)>,
        /// SNR points in dB for the L_out columns.
        #[arg(long = "snr-db", value_delimiter = ',', default_value = "10,20,30")]
        snr_db: Vec<f64>,
    },
    /// Run the oracle self-check suites.
    Validate {
        #[arg(long, default_value_t = 200)]
        instances: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

fn parse_system(s: &str) -> Result<(usize, usize, usize), String> {
    let v: Vec<usize> = s
        .split(',')
        .map(|p| p.trim().parse::<usize>().map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    match v[..] {
        [m, n, t] if m > 0 && n > 0 && t > 0 => Ok((m, n, t)),
        _ => Err(format!("expected M,N,T with positive entries, got {s}")),
    }
}

fn run(cli: Cli) -> last_sphere::Result<bool> {
    match cli.command {
        Command::Sweep { config, out, tail } => {
            let cfg = ExperimentConfig::from_json(&std::fs::read_to_string(config)?)?;
            let sweep = run_sweep(&cfg)?;
            write_string(&out, &results_csv(&sweep))?;
            if let Some(path) = tail {
                write_string(&path, &tail_csv(&sweep)?)?;
            }
            Ok(true)
        }
        Command::Analyze { systems, snr_db } => {
            print!("{}", exponent_table_csv(&systems, &snr_db)?);
            Ok(true)
        }
        Command::Validate { instances, seed } => {
            let reports = run_all(instances, seed)?;
            for r in &reports {
                println!("{} {}: {}", if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail);
            }
            Ok(reports.iter().all(|r| r.passed))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
