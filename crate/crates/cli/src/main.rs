mod args;
mod commands;
mod config;
mod output;

use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command, Format};

const EXIT_USAGE: u8 = 2;
const EXIT_WARNING: u8 = 3;

fn main() -> ExitCode {
    let argv = match config::expand(std::env::args_os().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let cli = Cli::parse_from(argv);

    let result = match &cli.command {
        Command::Beta(a) => commands::beta(a),
        Command::Couplings(a) => commands::couplings(a),
        Command::Revival(a) => commands::revival(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::Ed(a) => commands::ed(a),
    };
    let report = match result {
        Ok(r) => r,
        Err(commands::UsageError(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_USAGE);
        }
    };

    let mut text = match cli.format {
        Format::Csv => report.table.to_csv(),
        Format::Json => serde_json::to_string_pretty(&report.json).expect("JSON values serialize"),
    };
    if cli.format == Format::Json {
        text.push('\n');
    }
    let written = match &cli.out {
        Some(path) => {
            fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))
        }
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::FAILURE;
    }

    for n in &report.notes {
        eprintln!("note: {n}");
    }
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    if cli.strict && !report.warnings.is_empty() {
        return ExitCode::from(EXIT_WARNING);
    }
    ExitCode::SUCCESS
}
