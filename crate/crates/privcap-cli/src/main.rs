//! Command-line front end: bound curves as CSV, degradability
//! certification, and decomposition verification.
//!
//! Exit codes: 0 success, 1 negative verification result (UNKNOWN
//! certification, failed decomposition check), 2 bad input or
//! configuration, 3 numeric failure or refused heuristic.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use privcap::bound::{
    bb84_threshold, bb84_threshold_bisected, bb84_upper_bound, decomposition_cost,
    depolarizing_upper_bound, linspace, pauli_weight_upper_bound, verify_decomposition, BoundCurve,
    CostOptions,
};
use privcap::certify::{certify_antidegradable, certify_degradable, CertifyOptions};
use privcap::schema::{CertificateFile, ChannelSpec, DecompositionFile, DEFAULT_MAX_DIM};
use privcap::Error;

#[derive(Parser)]
#[command(
    name = "privcap",
    version,
    about = "Private-capacity bound curves and degradability certificates"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sample an upper-bound curve onto a uniform grid and emit CSV.
    Curve {
        /// Channel family to sweep.
        #[arg(value_enum)]
        family: Family,
        /// Lower end of the parameter grid (family default when omitted).
        #[arg(long)]
        lo: Option<f64>,
        /// Upper end of the parameter grid (family default when omitted).
        #[arg(long)]
        hi: Option<f64>,
        /// Number of grid points (at least 2).
        #[arg(long, default_value_t = 1001, value_parser = clap::value_parser!(u64).range(2..))]
        steps: u64,
        /// Write CSV here instead of stdout.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Search for a degradability certificate for a channel JSON file.
    Certify {
        /// Path to a channel description (JSON).
        channel: PathBuf,
        #[arg(long, value_enum, default_value_t = DirArg::Both)]
        direction: DirArg,
        /// Residual below which a certificate is accepted.
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long, default_value_t = 5000)]
        max_iters: u32,
        /// Write the certificate here on success.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Check a decomposition file and price its capacity cost.
    Verify {
        /// Path to a decomposition description (JSON).
        decomposition: PathBuf,
        /// Mixture-vs-target tolerance.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Price unrecognized degradable pieces numerically.
        #[arg(long)]
        allow_heuristic: bool,
        /// Restarts for the numerical fallback.
        #[arg(long, default_value_t = 16)]
        restarts: usize,
        /// Seed for the numerical fallback.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Copy, Clone, ValueEnum)]
enum Family {
    Bb84,
    Depolarizing,
    Pauli,
}

#[derive(Copy, Clone, ValueEnum)]
enum DirArg {
    Degradable,
    Antidegradable,
    Both,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let max_dim = match max_dim_from_env() {
        Ok(v) => v,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let outcome = match cli.cmd {
        Cmd::Curve {
            family,
            lo,
            hi,
            steps,
            out,
        } => run_curve(family, lo, hi, steps as usize, out),
        Cmd::Certify {
            channel,
            direction,
            tol,
            max_iters,
            out,
        } => run_certify(&channel, direction, tol, max_iters, out, max_dim),
        Cmd::Verify {
            decomposition,
            tol,
            allow_heuristic,
            restarts,
            seed,
        } => run_verify(
            &decomposition,
            tol,
            allow_heuristic,
            restarts,
            seed,
            max_dim,
        ),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

/// PRIVCAP_MAX_DIM raises or lowers the dimension caps; None keeps defaults.
fn max_dim_from_env() -> Result<Option<usize>, String> {
    match std::env::var("PRIVCAP_MAX_DIM") {
        Err(_) => Ok(None),
        Ok(raw) => match raw.trim().parse::<usize>() {
            Ok(v) if (2..=32).contains(&v) => Ok(Some(v)),
            _ => Err(format!(
                "PRIVCAP_MAX_DIM must be an integer in 2..=32, got {raw:?}"
            )),
        },
    }
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::DecompositionMismatch(_) | Error::UncertifiedPiece(_) => 1,
        Error::HeuristicRefused(_) => 3,
        Error::NoSignChange | Error::NonMonotone => 3,
        _ => 2,
    }
}

fn run_curve(
    family: Family,
    lo: Option<f64>,
    hi: Option<f64>,
    steps: usize,
    out: Option<PathBuf>,
) -> privcap::Result<ExitCode> {
    let (default_lo, default_hi) = match family {
        Family::Bb84 => (0.0, 0.5),
        Family::Depolarizing => (0.0, 1.0),
        Family::Pauli => (0.0, 1.0),
    };
    let grid = linspace(lo.unwrap_or(default_lo), hi.unwrap_or(default_hi), steps);
    let (curve, threshold_line): (BoundCurve, String) = match family {
        Family::Bb84 => {
            let analytic = bb84_threshold();
            // report the bisection value too when it drifts from the formula
            let line = match bb84_threshold_bisected() {
                Ok(b) if (b - analytic).abs() > 1e-6 => {
                    format!("threshold q* = {analytic:.8} (bisection disagrees: {b:.8})")
                }
                _ => format!("threshold q* = {analytic:.8}"),
            };
            (bb84_upper_bound(&grid)?, line)
        }
        Family::Depolarizing => (
            depolarizing_upper_bound(&grid)?,
            format!("threshold p* = {:.8}", 0.25),
        ),
        Family::Pauli => (
            pauli_weight_upper_bound(&grid)?,
            format!("threshold w* = {:.8}", 0.5),
        ),
    };
    let csv = curve.to_csv();
    match out {
        Some(path) => {
            std::fs::write(&path, csv)?;
            println!("{threshold_line}");
            println!(
                "wrote {} samples to {}",
                curve.samples.len(),
                path.display()
            );
        }
        None => {
            print!("{csv}");
            eprintln!("{threshold_line}");
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn run_certify(
    channel_path: &PathBuf,
    direction: DirArg,
    tol: f64,
    max_iters: u32,
    out: Option<PathBuf>,
    max_dim: Option<usize>,
) -> privcap::Result<ExitCode> {
    let text = std::fs::read_to_string(channel_path)?;
    let spec: ChannelSpec = serde_json::from_str(&text)?;
    let channel = spec.to_channel(max_dim.unwrap_or(DEFAULT_MAX_DIM))?;
    let mut opts = CertifyOptions {
        tol,
        max_iters,
        ..CertifyOptions::default()
    };
    if let Some(cap) = max_dim {
        opts.dim_cap = cap;
    }
    let attempts: Vec<&str> = match direction {
        DirArg::Degradable => vec!["degradable"],
        DirArg::Antidegradable => vec!["antidegradable"],
        DirArg::Both => vec!["degradable", "antidegradable"],
    };
    let mut failures: Vec<(String, f64, u32)> = Vec::new();
    for dir in attempts {
        let outcome = if dir == "degradable" {
            certify_degradable(&channel, &opts)?
        } else {
            certify_antidegradable(&channel, &opts)?
        };
        if let Some(cert) = outcome.certificate {
            println!(
                "CERTIFIED {} residual = {:.3e} iterations = {}",
                cert.direction.as_str(),
                cert.residual,
                cert.iterations
            );
            if let Some(path) = out {
                let file = CertificateFile::from_certificate(&cert);
                std::fs::write(&path, serde_json::to_string_pretty(&file)?)?;
                println!("wrote certificate to {}", path.display());
            }
            return Ok(ExitCode::SUCCESS);
        }
        failures.push((dir.to_string(), outcome.best_residual, outcome.iterations));
    }
    for (dir, residual, iters) in failures {
        println!("UNKNOWN {dir} best_residual = {residual:.3e} after {iters} iterations");
    }
    Ok(ExitCode::from(1))
}

fn run_verify(
    decomposition_path: &PathBuf,
    tol: f64,
    allow_heuristic: bool,
    restarts: usize,
    seed: u64,
    max_dim: Option<usize>,
) -> privcap::Result<ExitCode> {
    let text = std::fs::read_to_string(decomposition_path)?;
    let file: DecompositionFile = serde_json::from_str(&text)?;
    let d = file.to_decomposition(max_dim.unwrap_or(DEFAULT_MAX_DIM))?;
    let residual = verify_decomposition(&d, tol)?;
    println!("residual = {residual:.6e}");
    let mut opts = CostOptions {
        allow_heuristic,
        verify_tol: tol,
        heuristic_restarts: restarts,
        seed,
        ..CostOptions::default()
    };
    if let Some(cap) = max_dim {
        opts.certify.dim_cap = cap;
    }
    let cost = decomposition_cost(&d, &opts)?;
    println!("cost = {cost:.12}");
    Ok(ExitCode::SUCCESS)
}
