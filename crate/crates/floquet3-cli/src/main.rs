//! `floquet3` — band analysis of the third-order operator
//! `i∂³ + ε(ip∂ + i∂p + q)` with small periodic coefficients.
//!
//! Subcommands: `h` (coefficient functionals and the multiplicity
//! prediction), `rho-scan` (discriminant over a real λ interval), `band`
//! (multiplicity-3 interval endpoints), `sweep` (width-law fit over
//! decreasing couplings), `verify` (invariant suite).
//!
//! Exit codes: 0 success, 1 usage/parse error, 2 numerical failure,
//! 3 verification failure. `FLOQUET3_THREADS` caps the worker pool.

// `!(x > 0.0)` guards reject NaN along with out-of-range flag values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod output;

use clap::{Args, Parser, Subcommand};
use config::SpecError;
use output::Format;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug)]
pub enum AppError {
    Usage(String),
    Numerical(floquet3_core::Error),
    Io(std::io::Error),
}

#[derive(Parser)]
#[command(
    name = "floquet3",
    version,
    about = "Floquet band analysis for a third-order periodic operator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Coefficient spec file (TOML; see the repository README for the schema)
    #[arg(long)]
    spec: PathBuf,
    /// Write output here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format: csv or text
    #[arg(long, default_value = "csv")]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Print h, kappa, and the predicted multiplicity structure
    H {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Scan the discriminant over a real lambda interval
    RhoScan {
        #[command(flatten)]
        common: CommonArgs,
        /// Coupling constant
        #[arg(long, allow_negative_numbers = true)]
        eps: f64,
        /// Real interval `lo:hi`
        #[arg(long, default_value = "-1:1", allow_hyphen_values = true)]
        lambda_range: String,
        /// Number of grid points
        #[arg(long, default_value_t = 200)]
        points: usize,
        /// Local integrator tolerance
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Locate the endpoints of the multiplicity-3 interval
    Band {
        #[command(flatten)]
        common: CommonArgs,
        /// Coupling constant
        #[arg(long, allow_negative_numbers = true)]
        eps: f64,
        /// Half-width of the search window around lambda = 0
        #[arg(long, default_value_t = 1.0)]
        window: f64,
        /// Endpoint refinement tolerance in lambda
        #[arg(long, default_value_t = 1e-12)]
        tol_lambda: f64,
    },
    /// Sweep decreasing couplings and fit the width law
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma-separated decreasing couplings
        #[arg(long, default_value = "0.16,0.08,0.04,0.02")]
        eps_list: String,
        /// Endpoint refinement tolerance in lambda
        #[arg(long, default_value_t = 1e-12)]
        tol_lambda: f64,
    },
    /// Run the invariant suite; exit 0 iff all checks pass
    Verify {
        /// Coefficient spec file
        #[arg(long)]
        spec: PathBuf,
    },
}

fn parse_range(s: &str) -> Result<(f64, f64), AppError> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| AppError::Usage(format!("lambda range `{s}` is not of the form lo:hi")))?;
    let lo: f64 = lo
        .trim()
        .parse()
        .map_err(|_| AppError::Usage(format!("cannot parse `{lo}` as a real number")))?;
    let hi: f64 = hi
        .trim()
        .parse()
        .map_err(|_| AppError::Usage(format!("cannot parse `{hi}` as a real number")))?;
    if !(lo < hi) {
        return Err(AppError::Usage(format!(
            "lambda range must satisfy lo < hi, got {lo}:{hi}"
        )));
    }
    Ok((lo, hi))
}

fn parse_eps_list(s: &str) -> Result<Vec<f64>, AppError> {
    let list: Result<Vec<f64>, _> = s.split(',').map(|x| x.trim().parse::<f64>()).collect();
    list.map_err(|_| AppError::Usage(format!("cannot parse eps list `{s}`")))
}

fn load(spec: &std::path::Path) -> Result<floquet3_core::PeriodicCoefficients, AppError> {
    config::load_spec(spec).map_err(|e| match e {
        SpecError::Invalid(core) => AppError::Usage(core.to_string()),
        other => AppError::Usage(other.to_string()),
    })
}

fn init_threads() {
    if let Ok(v) = std::env::var("FLOQUET3_THREADS") {
        if let Ok(n) = v.parse::<usize>() {
            if n > 0 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, AppError> {
    match cli.command {
        Command::H { common } => {
            let c = load(&common.spec)?;
            commands::cmd_h(&c, &common.spec, common.format, common.out)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::RhoScan {
            common,
            eps,
            lambda_range,
            points,
            tol,
        } => {
            let c = load(&common.spec)?;
            let (lo, hi) = parse_range(&lambda_range)?;
            if points < 2 {
                return Err(AppError::Usage("points must be at least 2".into()));
            }
            if !(tol > 0.0) {
                return Err(AppError::Usage("tol must be positive".into()));
            }
            commands::cmd_rho_scan(
                &c,
                &common.spec,
                eps,
                lo,
                hi,
                points,
                tol,
                common.format,
                common.out,
            )?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Band {
            common,
            eps,
            window,
            tol_lambda,
        } => {
            let c = load(&common.spec)?;
            if !(window > 0.0) || !(tol_lambda > 0.0) {
                return Err(AppError::Usage(
                    "window and tol-lambda must be positive".into(),
                ));
            }
            commands::cmd_band(
                &c,
                &common.spec,
                eps,
                window,
                tol_lambda,
                common.format,
                common.out,
            )?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep {
            common,
            eps_list,
            tol_lambda,
        } => {
            let c = load(&common.spec)?;
            let eps = parse_eps_list(&eps_list)?;
            if !(tol_lambda > 0.0) {
                return Err(AppError::Usage("tol-lambda must be positive".into()));
            }
            commands::cmd_sweep(&c, &common.spec, &eps, tol_lambda, common.format, common.out)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { spec } => {
            let c = load(&spec)?;
            let all_passed = commands::cmd_verify(&c, &spec)?;
            Ok(if all_passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(3)
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help/version requests are not errors.
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    init_threads();
    match run(cli) {
        Ok(code) => code,
        Err(AppError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(AppError::Io(e)) => {
            eprintln!("i/o error: {e}");
            ExitCode::from(1)
        }
        Err(AppError::Numerical(e)) => {
            eprintln!("numerical failure: {e}");
            ExitCode::from(2)
        }
    }
}
