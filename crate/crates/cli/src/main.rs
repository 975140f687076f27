//! `heunbound`: command-line front end.
//!
//! Exit codes: 0 ok, 2 usage, 3 no physical root, 4 verification mismatch,
//! 5 non-polynomial solution, 1 anything else.

mod args;
mod commands;
mod format;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use heunbound_core::Error;

use args::{Cli, Invocation, RunConfig, Source};
use commands::Envelope;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(Error),
    Io(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io(_) => 1,
            CliError::Core(e) => match e {
                Error::InvalidConfig(_)
                | Error::ZeroCoupling
                | Error::DegenerateOperator
                | Error::InvalidDomain(_) => 2,
                Error::NoPhysicalRoot { .. } | Error::BracketExhausted { .. } => 3,
                Error::Mismatch(_) => 4,
                Error::NotTruncated => 5,
                _ => 1,
            },
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Io(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

fn load_json(path: &std::path::Path, inv: &Invocation) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let env: Envelope<serde_json::Value> = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    if env.config.command != inv.command {
        return Err(CliError::Usage(format!(
            "{} holds a '{}' run, not '{}'",
            path.display(),
            env.config.command.name(),
            inv.command.name()
        )));
    }
    Ok(env.config)
}

fn execute() -> Result<i32, CliError> {
    let argv = args::splice_config(std::env::args_os().collect())?;
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return Ok(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let inv = cli.into_invocation()?;
    let cfg = match &inv.source {
        Source::Flags(cfg) => cfg.clone(),
        Source::Json(path) => load_json(path, &inv)?,
    };
    let outcome = commands::run(&cfg)?;
    for note in &outcome.notes {
        eprintln!("{note}");
    }
    match &inv.output {
        Some(path) => std::fs::write(path, &outcome.body)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?,
        None => {
            let mut out = std::io::stdout().lock();
            match out.write_all(outcome.body.as_bytes()).and_then(|_| out.flush()) {
                Ok(()) => {}
                // a closed downstream pipe is not an error of ours
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => {}
                Err(e) => return Err(CliError::Io(e.to_string())),
            }
        }
    }
    Ok(outcome.exit)
}

fn main() -> ExitCode {
    match execute() {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            if matches!(e, CliError::Usage(_)) {
                eprintln!("run 'heunbound <command> --help' for usage");
            }
            ExitCode::from(e.exit_code())
        }
    }
}
