use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use bcjump::cohomology::CohomologyError;
use bcjump::deformation::DeformationError;
use bcjump::linalg::LinalgError;

mod cli;

/// Bott-Chern, Aeppli, Dolbeault and de Rham cohomology of invariant complex
/// structures, and first-order deformation obstructions.
#[derive(Parser, Debug)]
#[command(name = "bcjump", version)]
struct Cli {
    #[command(subcommand)]
    command: cli::Command,
    /// Emit the machine-readable report instead of the human view.
    #[arg(long, global = true)]
    report: bool,
    /// Leave timing out of the output.
    #[arg(long, global = true)]
    no_timing: bool,
}

fn quote(arg: &str) -> String {
    if !arg.is_empty() && arg.chars().all(|c| c.is_ascii_alphanumeric() || "-_=.,/[]^#:+".contains(c)) {
        arg.to_string()
    } else {
        format!("\"{}\"", arg.replace('"', "\\\""))
    }
}

/// Errors that point at a bug in the computation rather than in the input.
fn is_invariant_violation(err: &anyhow::Error) -> bool {
    err.chain().any(|e| {
        e.downcast_ref::<cli::Breach>().is_some()
            || matches!(e.downcast_ref::<DeformationError>(), Some(DeformationError::InvariantViolation(_)))
            || matches!(
                e.downcast_ref::<CohomologyError>(),
                Some(CohomologyError::InvariantViolation(_) | CohomologyError::Linalg(LinalgError::NotContained))
            )
            || matches!(e.downcast_ref::<LinalgError>(), Some(LinalgError::NotContained))
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let invocation = std::iter::once("bcjump".to_string())
        .chain(std::env::args().skip(1).map(|a| quote(&a)))
        .collect::<Vec<_>>()
        .join(" ");
    let start = Instant::now();
    match cli::run(&cli.command, invocation) {
        Ok(mut report) => {
            if !cli.no_timing {
                report.elapsed_ms = Some(start.elapsed().as_millis() as u64);
            }
            if cli.report {
                print!("{report}");
            } else {
                print!("{}", cli::render_human(&report));
            }
            let failed = report.get("result").and_then(|s| s.get("verdict")) == Some("FAIL");
            if failed {
                eprintln!("error: computed tables differ from the reference rows");
                return ExitCode::from(2);
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            if is_invariant_violation(&err) {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
