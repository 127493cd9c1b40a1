use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use commdil::{execute, exit_code, Command, JobSpec};

/// Dilations of commuting CP maps on matrix algebras.
#[derive(Debug, Parser)]
#[command(name = "commdil", version)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// JSON file with {"theta", "phi"} Kraus families or {"system", "rep"}.
    #[arg(long)]
    input: PathBuf,
    /// Truncation level L.
    #[arg(long, default_value_t = 4)]
    depth: usize,
    /// Verification window (defaults to L - 2).
    #[arg(long)]
    window: Option<usize>,
    /// Rank and positivity tolerance.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Residual acceptance threshold.
    #[arg(long, default_value_t = 1e-8)]
    accept: f64,
    /// Padding multiplicity of the representation spaces.
    #[arg(long, default_value_t = 0)]
    mu: usize,
    /// Seed for the random test operators of `endo`.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of random operator pairs for `endo`.
    #[arg(long, default_value_t = 100)]
    samples: usize,
    /// Include V, U and the corrector blocks in the `dilate` report.
    #[arg(long)]
    operators: bool,
    /// Report path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let job = JobSpec {
        command: args.command,
        input: args.input,
        depth: args.depth,
        window: args.window,
        tol: args.tol,
        accept: args.accept,
        mu: args.mu,
        seed: args.seed,
        samples: args.samples,
        operators: args.operators,
        out: args.out,
    };
    let report = match execute(&job) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let text = report.to_json();
    match &job.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    if let Some(bad) = report.identities.iter().find(|c| !c.passed()) {
        eprintln!(
            "failed: {} (residual {:e}, threshold {:e})",
            bad.name, bad.max_residual, bad.threshold
        );
    }
    ExitCode::from(exit_code(&report) as u8)
}
