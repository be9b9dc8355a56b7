//! `sbint`: single integrals, table runs, convergence scans and
//! three-centre integrals from a params file.
//!
//! Exit codes: 0 success, 1 input error, 2 tolerance or numerical failure.

mod commands;
mod output;
mod params;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use sbint::dequad::{DEConfig, Transform};

use commands::{Outcome, Settings};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("input error: {0}")]
    Input(String),
    #[error("numerical failure: {0}")]
    Numeric(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Command {
    Integral,
    Table,
    ThreeCentre,
    ErrorScan,
    PointScan,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TransformArg {
    Phi1,
    Phi2,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Text,
}

#[derive(Debug, Parser)]
#[command(name = "sbint", version, about = "Semi-infinite spherical Bessel integrals by double-exponential quadrature")]
struct Args {
    #[arg(long, value_enum)]
    command: Command,
    /// Params file; one case per line, '#' starts a comment.
    #[arg(long)]
    params: PathBuf,
    #[arg(long, value_enum, default_value = "both")]
    transform: TransformArg,
    /// Truncation and stopping tolerance, in [1e-16, 1e-6].
    #[arg(long, default_value_t = 1e-15)]
    eps0: f64,
    /// K of the first transform.
    #[arg(long = "K", default_value_t = 6.0)]
    k: f64,
    /// Number of M values the doubling schedule may try.
    #[arg(long, default_value_t = 4)]
    max_attempts: u32,
    #[arg(long, value_enum, default_value = "text")]
    output: Format,
    /// Write the result here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Largest accepted relative error against the oracle.
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    /// error-scan: first M.
    #[arg(long)]
    m_from: Option<f64>,
    /// error-scan: last M.
    #[arg(long)]
    m_to: Option<f64>,
    /// Number of scan samples.
    #[arg(long)]
    m_steps: Option<usize>,
    /// point-scan: the fixed M (default: the second M of the schedule).
    #[arg(long)]
    m: Option<f64>,
}

fn settings(a: &Args) -> Result<Settings, CliError> {
    if !(1e-16..=1e-6).contains(&a.eps0) {
        return Err(CliError::Input(format!("--eps0 {} is outside [1e-16, 1e-6]", a.eps0)));
    }
    if !(a.k > 0.0 && a.k.is_finite()) {
        return Err(CliError::Input(format!("--K {} must be positive", a.k)));
    }
    if a.max_attempts == 0 {
        return Err(CliError::Input("--max-attempts must be at least 1".into()));
    }
    if !(a.tol > 0.0) {
        return Err(CliError::Input(format!("--tol {} must be positive", a.tol)));
    }
    let m_range = match (a.m_from, a.m_to) {
        (None, None) => None,
        (Some(lo), Some(hi)) if lo > 0.0 && hi >= lo && hi.is_finite() => Some((lo, hi)),
        (Some(_), Some(_)) => return Err(CliError::Input("--m-from/--m-to need 0 < from ≤ to".into())),
        _ => return Err(CliError::Input("--m-from and --m-to go together".into())),
    };
    if a.m_steps == Some(0) {
        return Err(CliError::Input("--m-steps must be at least 1".into()));
    }
    if let Some(m) = a.m {
        if !(m > 0.0 && m.is_finite()) {
            return Err(CliError::Input(format!("--m {m} must be positive")));
        }
    }
    let tune = |mut c: DEConfig| {
        c.eps0 = a.eps0;
        c.max_attempts = a.max_attempts;
        c
    };
    let phi1 = tune(DEConfig { transform: Transform::Phi1 { k: a.k }, ..DEConfig::phi1() });
    let phi2 = tune(DEConfig::phi2());
    let transforms = match a.transform {
        TransformArg::Phi1 => vec![("phi1", phi1)],
        TransformArg::Phi2 => vec![("phi2", phi2)],
        TransformArg::Both => vec![("phi1", phi1), ("phi2", phi2)],
    };
    Ok(Settings { transforms, tol: a.tol, m_range, steps: a.m_steps, m: a.m })
}

fn run(a: &Args) -> Result<Outcome, CliError> {
    let st = settings(a)?;
    let text = std::fs::read_to_string(&a.params)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", a.params.display())))?;
    match a.command {
        Command::Integral => commands::integral(&text, &st),
        Command::Table => commands::table(&text, &st),
        Command::ThreeCentre => commands::three_centre_cmd(&text, &st),
        Command::ErrorScan => commands::error_scan(&text, &st),
        Command::PointScan => commands::point_scan(&text, &st),
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    let outcome = match run(&args) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("sbint: {e}");
            return ExitCode::from(match e {
                CliError::Input(_) => 1,
                CliError::Numeric(_) => 2,
            });
        }
    };
    let rendered = match args.output {
        Format::Csv => outcome.table.csv(),
        Format::Json => outcome.table.json(),
        Format::Text => outcome.table.text(),
    };
    match &args.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, rendered) {
                eprintln!("sbint: cannot write {}: {e}", path.display());
                return ExitCode::from(1);
            }
        }
        None => print!("{rendered}"),
    }
    for f in &outcome.failures {
        eprintln!("sbint: tolerance failure: {f}");
    }
    if outcome.failures.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    }
}
