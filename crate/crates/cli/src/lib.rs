//! Command-line front end for GLFR stress-strength estimation.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod ingest;
pub mod pretty;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;
use serde_json::Value;

use args::{Cli, Command};
use error::CliError;

fn write_file(path: &std::path::Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn report(out: &mut dyn Write, v: &Value, pretty: bool) -> std::io::Result<()> {
    if pretty {
        write!(out, "{}", pretty::render(v))
    } else {
        writeln!(out, "{}", serde_json::to_string_pretty(v).expect("report serializes"))
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Io {
        path: "<stdout>".into(),
        message: e.to_string(),
    };
    match &cli.command {
        Command::Fit(a) => report(out, &commands::fit(a)?, a.common.pretty).map_err(io),
        Command::Bayes(a) => report(out, &commands::bayes(a)?, a.common.pretty).map_err(io),
        Command::Censor(a) => report(out, &commands::censor(a)?, a.common.pretty).map_err(io),
        Command::Simulate(a) => {
            let table = commands::simulate(a)?;
            match &a.out {
                Some(p) => write_file(p, &table),
                None => out.write_all(table.as_bytes()).map_err(io),
            }
        }
        Command::Sample(a) => {
            let (text, test) = commands::draw(a)?;
            if let Some(t) = test {
                writeln!(err, "{t}").map_err(io)?;
            }
            match &a.out {
                Some(p) => write_file(p, &text),
                None => out.write_all(text.as_bytes()).map_err(io),
            }
        }
    }
}

/// Runs the CLI and returns the process exit code. Errors go to `err` as one
/// JSON object.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = write!(out, "{e}");
            return 0;
        }
        Err(e) => {
            let msg = e.to_string();
            let text: Vec<&str> = msg
                .lines()
                .take_while(|l| !l.starts_with("Usage:"))
                .map(str::trim)
                .filter(|l| !l.is_empty())
                .collect();
            let text = text.join(" ").trim_start_matches("error: ").to_string();
            let _ = writeln!(err, "{}", CliError::Usage(text).to_json());
            return 2;
        }
    };
    match dispatch(&cli, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "{}", e.to_json());
            e.exit_code()
        }
    }
}
