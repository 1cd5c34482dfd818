//! `fidelity` command-line tool.

mod args;
mod commands;

use clap::Parser;
use fidelity::Error;
use serde_json::json;
use std::process::ExitCode;

/// Error carrying its exit status and the JSON error object.
#[derive(Debug)]
pub struct Failure {
    pub exit: u8,
    pub code: &'static str,
    pub message: String,
    pub context: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>, context: impl Into<String>) -> Failure {
        Failure { exit: 2, code: "usage", message: message.into(), context: context.into() }
    }

    pub fn from_core(e: Error, context: &str) -> Failure {
        let (exit, code) = match e {
            Error::Parameter(_) | Error::CapExceeded(_) => (2, "usage"),
            Error::NoFit(_) | Error::Convergence(_) => (4, "no_fit"),
            _ => (3, "data"),
        };
        Failure { exit, code, message: e.to_string(), context: context.to_string() }
    }

    fn to_json(&self) -> serde_json::Value {
        json!({
            "schema": commands::SCHEMA,
            "error": {"code": self.code, "message": self.message, "context": self.context},
        })
    }
}

fn main() -> ExitCode {
    let argv = match args::expand_config(std::env::args_os().collect()) {
        Ok(a) => a,
        Err(f) => return report(f),
    };
    let cli = match args::Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let msg = e.render().to_string();
            let msg = msg
                .lines()
                .take_while(|l| !l.starts_with("Usage:"))
                .map(str::trim)
                .filter(|l| !l.is_empty())
                .collect::<Vec<_>>()
                .join(" ")
                .trim_start_matches("error: ")
                .to_string();
            return report(Failure::usage(msg, "arguments"));
        }
    };
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            return report(Failure::usage(e.to_string(), "--threads"));
        }
    }
    match commands::dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => report(f),
    }
}

fn report(f: Failure) -> ExitCode {
    eprintln!("{}", serde_json::to_string(&f.to_json()).expect("json"));
    ExitCode::from(f.exit)
}
