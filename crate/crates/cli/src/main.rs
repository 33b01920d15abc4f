//! `clext`: command-line front end for clext-core.
//!
//! Exit codes: 0 when every check passes, 1 when any check fails, 2 for
//! usage or validation errors, 3 for I/O errors.

mod commands;
mod config;
mod output;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use config::{parse_config, Cli};

pub enum Failure {
    Usage(anyhow::Error),
    Io(anyhow::Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Io(_) => 3,
        }
    }

    pub fn into_error(self) -> anyhow::Error {
        match self {
            Failure::Usage(e) | Failure::Io(e) => e,
        }
    }
}

fn run(cli: Cli) -> Result<bool, Failure> {
    let cfg = parse_config(cli)?;
    let report = commands::run(&cfg)?;
    let bytes = output::render(&report, cfg.format)?;
    match &cfg.out {
        Some(path) => {
            output::write_atomic(path, &bytes)?;
            let mut stdout = std::io::stdout().lock();
            for line in &report.summary {
                let _ = writeln!(stdout, "{line}");
            }
            let _ = writeln!(stdout, "{}: {}", cfg.command.name(), if report.pass { "PASS" } else { "FAIL" });
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(&bytes)
                .and_then(|_| stdout.flush())
                .map_err(|e| Failure::Io(anyhow::anyhow!(e).context("writing report to stdout")))?;
            let mut stderr = std::io::stderr().lock();
            for line in &report.summary {
                let _ = writeln!(stderr, "{line}");
            }
        }
    }
    Ok(report.pass)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            let code = f.code();
            eprintln!("error: {:#}", f.into_error());
            ExitCode::from(code)
        }
    }
}
