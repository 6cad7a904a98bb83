use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use varparam_cli::problem::{fixture, ProblemFile};
use varparam_cli::{run, run_batch, run_file, CliError, Command};

/// Order reduction for second-order ODEs by variation of parameters.
#[derive(Debug, Parser)]
#[command(name = "varparam", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// Integrator tolerance (overrides the file)
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// End of the integration interval (overrides the file)
    #[arg(long, global = true)]
    interval: Option<f64>,

    /// Write output here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Report)]
    format: Format,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Reduce and report the shape of the reduced equation
    Classify { path: PathBuf },
    /// Reduce to a first-order equation
    Reduce { path: PathBuf },
    /// Reduce and solve: closed form, implicit relation or numeric table
    Solve { path: PathBuf },
    /// Compare the reduced solution with direct integration
    Verify { path: PathBuf },
    /// Run a bundled example end to end
    Demo { name: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    /// JSON run report
    Report,
    /// CSV columns x, y, yp, residual
    Table,
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Output(p.display().to_string(), e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main_inner(cli: Cli) -> Result<i32, CliError> {
    let (cmd, path) = match &cli.command {
        Cmd::Classify { path } => (Command::Classify, path),
        Cmd::Reduce { path } => (Command::Reduce, path),
        Cmd::Solve { path } => (Command::Solve, path),
        Cmd::Verify { path } => (Command::Verify, path),
        Cmd::Demo { name } => {
            let p = ProblemFile::from_toml(fixture(name)?)?.resolve()?.with_overrides(cli.tol, cli.interval);
            let o = run(Command::Demo, &p, name)?;
            let text = match cli.format {
                Format::Report => o.report.to_json() + "\n",
                Format::Table => o.report.to_csv(),
            };
            emit(cli.out.as_deref(), &text)?;
            return Ok(o.exit_code);
        }
    };
    if path.is_dir() {
        let summary = run_batch(cmd, path, cli.tol, cli.interval)?;
        for e in &summary.entries {
            eprintln!("{}: exit {}{}", e.file, e.exit_code, e.error.as_ref().map(|m| format!(" ({m})")).unwrap_or_default());
        }
        emit(cli.out.as_deref(), &(summary.to_json() + "\n"))?;
        return Ok(summary.exit_code());
    }
    let o = run_file(cmd, path, cli.tol, cli.interval)?;
    if let Some(v) = &o.report.verification {
        for d in &v.diagnostics {
            eprintln!("{d}");
        }
    }
    let text = match cli.format {
        Format::Report => o.report.to_json() + "\n",
        Format::Table => o.report.to_csv(),
    };
    emit(cli.out.as_deref(), &text)?;
    Ok(o.exit_code)
}

fn main() -> ExitCode {
    match main_inner(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
